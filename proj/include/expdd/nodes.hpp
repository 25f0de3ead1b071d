#pragma once
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace expdd {

// Canonically sorted real node multiset. Repeated values are legal and
// detected bitwise downstream. All entries must be finite (domain_error).
class NodeMultiset {
  public:
    NodeMultiset() = default;
    explicit NodeMultiset(std::vector<double> xs);
    explicit NodeMultiset(std::span<const double> xs)
        : NodeMultiset(std::vector<double>(xs.begin(), xs.end())) {}

    std::size_t size() const { return v_.size(); }
    bool empty() const { return v_.empty(); }
    // order q of the divided difference these nodes define; size must be >= 1
    std::size_t order() const;
    double operator[](std::size_t i) const { return v_[i]; }
    const std::vector<double>& values() const { return v_; }
    std::span<const double> span() const { return v_; }
    double min() const { return v_.front(); }
    double max() const { return v_.back(); }
    double spread() const { return v_.back() - v_.front(); }

    // keeps sorted order
    void insert(double x);

  private:
    std::vector<double> v_;
};

// Token syntax: whitespace/comma separated, each "v" or "v^m" with integer
// multiplicity m >= 1; '#' starts a comment to end of line.
std::vector<double> parse_nodes(const std::string& text);

}  // namespace expdd
