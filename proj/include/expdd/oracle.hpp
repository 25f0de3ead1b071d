#pragma once
#include <cstdint>
#include <span>

#include "expdd/nodes.hpp"
#include "expdd/rng.hpp"
#include "expdd/scaled_value.hpp"

// Two independent cross-checks for the engine: a high-precision confluent
// Newton table (different algorithm, different arithmetic) and a Monte Carlo
// estimator of the simplex integral representation. Plus high-precision
// recheck helpers used to adjudicate margin-sweep failures.

namespace expdd {

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

// Uniform barycentric point of the standard simplex, lambda.size() coordinates,
// consuming generator indices base .. base+lambda.size()-1.
void simplex_sample(const CounterRng& rng, std::uint64_t base, std::span<double> lambda);

// Monte Carlo mean of the simplex representation: estimates e^{t[x_0..x_q]}.
// Deterministic for fixed (seed, samples): block-wise compensated partial sums
// merged in block order, so the result is independent of thread count.
Estimate hg_monte_carlo(const NodeMultiset& xs, std::uint64_t samples, std::uint64_t seed,
                        double t = 1.0);
// serial twin of the same reduction; bitwise-identical to the parallel version
Estimate hg_monte_carlo_serial(const NodeMultiset& xs, std::uint64_t samples,
                               std::uint64_t seed, double t = 1.0);

// Confluent Newton divided-difference table evaluated in precision_bits-bit
// floating point (>= 64, else invalid_argument). O(q^2) divisions: an
// algorithm disjoint from the engine's division-free series.
ScaledValue newton_highprec(const NodeMultiset& xs, long precision_bits, double t = 1.0);

// |table(bits_a) - table(bits_b)| / |table(bits_b)|, formed in high precision
// so agreement far below double resolution is measurable.
double newton_rel_diff(const NodeMultiset& xs, double t, long bits_a, long bits_b);

// --- high-precision margin rechecks (normalized by the largest term) ---

double tn2_margin_highprec(std::span<const double> prefix, int p, int q, double x1,
                           double x2, double y1, double y2, long bits);
double supermodular_margin_highprec(std::span<const double> prefix, int p, int q, double x1,
                                    double x2, double y1, double y2, long bits);
double fourpoint_f_highprec(double a, double b, double c, double d, long bits);
double triangle_margin_highprec(double a, double b, double c, long bits);
double phi_product_highprec(double x, double y, double z, long bits);
double h_product_highprec(double a, double b, double c, double d, long bits);

struct SandwichSlacksHP {
    double lower = 0.0;
    double upper = 0.0;
};
SandwichSlacksHP sandwich_slacks_highprec(const NodeMultiset& xs, long bits);

}  // namespace expdd
