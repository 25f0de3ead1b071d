#include "expdd/nodes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace expdd {

NodeMultiset::NodeMultiset(std::vector<double> xs) : v_(std::move(xs)) {
    for (double x : v_)
        if (!std::isfinite(x)) throw std::domain_error("node multiset: non-finite node");
    std::sort(v_.begin(), v_.end());
}

std::size_t NodeMultiset::order() const {
    if (v_.empty()) throw std::invalid_argument("node multiset: empty");
    return v_.size() - 1;
}

void NodeMultiset::insert(double x) {
    if (!std::isfinite(x)) throw std::domain_error("node multiset: non-finite node");
    v_.insert(std::upper_bound(v_.begin(), v_.end(), x), x);
}

std::vector<double> parse_nodes(const std::string& text) {
    std::string cleaned;
    cleaned.reserve(text.size());
    bool comment = false;
    for (char c : text) {
        if (c == '#') comment = true;
        if (c == '\n') comment = false;
        if (comment) continue;
        cleaned.push_back(c == ',' ? ' ' : c);
    }

    std::vector<double> out;
    std::istringstream in(cleaned);
    std::string tok;
    while (in >> tok) {
        std::string vpart = tok;
        long mult = 1;
        if (auto caret = tok.find('^'); caret != std::string::npos) {
            vpart = tok.substr(0, caret);
            std::string mpart = tok.substr(caret + 1);
            std::size_t used = 0;
            try {
                mult = std::stol(mpart, &used);
            } catch (const std::exception&) {
                throw std::invalid_argument("node token: bad multiplicity in '" + tok + "'");
            }
            if (used != mpart.size() || mult < 1 || mult > 1000000)
                throw std::invalid_argument("node token: bad multiplicity in '" + tok + "'");
        }
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(vpart, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("node token: bad value in '" + tok + "'");
        }
        if (used != vpart.size())
            throw std::invalid_argument("node token: bad value in '" + tok + "'");
        if (!std::isfinite(v)) throw std::domain_error("node token: non-finite value");
        out.insert(out.end(), static_cast<std::size_t>(mult), v);
    }
    return out;
}

}  // namespace expdd
