#pragma once
#include <cstddef>
#include <vector>

#include "expdd/nodes.hpp"
#include "expdd/scaled_value.hpp"

namespace expdd {

// Mean-centered coordinates: x_i = mu + y_i, rhat = max |y_i|.
struct Centered {
    std::vector<double> y;
    double mu = 0.0;
    double rhat = 0.0;
};

Centered shift_normalize(const NodeMultiset& xs);

// Divided difference of u -> e^{t u} over the node multiset, order q = size-1.
// Sign is sign(t^q); exact zero for t = 0, q >= 1. Division-free evaluation,
// so repeated nodes need no special casing by the caller.
ScaledValue dd_exp(const NodeMultiset& xs, double t = 1.0);

// q! t^{-q} e^{t[x_0..x_q]}; always positive, equals q!*dd at t = 1, and is
// computed without the q! log-shift so huge q loses nothing to lgamma.
ScaledValue dd_exp_factorial(const NodeMultiset& xs, double t = 1.0);

// log of dd_exp_factorial; the precision carrier for large-q asymptotics
double dd_exp_factorial_log(const NodeMultiset& xs, double t = 1.0);

// Incremental Newton table over an insertion-ordered node sequence.  frontier(j)
// is e^{t[x_0..x_j]} over the first j+1 inserted nodes.  append() extends by one
// node in O(q) (one Newton sweep); a bitwise-repeated node falls back to a single
// division-free engine evaluation of the new entry.
//
// Conditioning: each sweep level subtracts adjacent entries whose ratio is
// roughly e^{t*gap}, so when |t|*gap is small the difference cancels and
// roundoff is amplified by ~2/(e^{|t|*gap}-1) per level. Forward error
// therefore grows geometrically with order whenever t is small or nodes are
// tight, and the frontier degrades beyond a few tens of nodes. That is
// inherent to incremental differencing, not to the value: dd_exp evaluates
// each frontier directly, stays fully accurate at any order, and is the
// reference the table is tested against.
class DDTable {
  public:
    DDTable(const NodeMultiset& xs, double t);

    double t() const { return t_; }
    std::size_t order() const { return nodes_.size() - 1; }
    const std::vector<double>& nodes() const { return nodes_; }
    const ScaledValue& frontier(std::size_t j) const { return f_.at(j); }
    const ScaledValue& value() const { return f_.back(); }

    void append(double x);

  private:
    std::vector<double> nodes_;  // insertion order
    std::vector<ScaledValue> f_;
    double t_;
};

inline void dd_append(DDTable& table, double x) { table.append(x); }

}  // namespace expdd
