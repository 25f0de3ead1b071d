#include "expdd/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "expdd/identities.hpp"
#include "expdd/oracle.hpp"
#include "expdd/rng.hpp"

namespace expdd {
namespace {

constexpr long kRecheckBits = 320;
constexpr std::size_t kMaxAdjudicated = 32;

// per-trial draw cursor; every trial owns an independent counter stream
struct Draw {
    CounterRng rng;
    std::uint64_t k = 0;
    Draw(std::uint64_t seed, std::uint64_t salt, std::uint64_t trial)
        : rng(seed ^ (0x9e3779b97f4a7c15ULL * (salt + 1)), trial) {}
    double unit() { return rng.unit(k++); }
    double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
    std::uint64_t below(std::uint64_t n) { return rng.u64(k++) % n; }
    double normal() {
        double u1 = 1.0 - unit();  // (0, 1]
        double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
};

struct RectTrial {
    KernelSpec spec;
    double x1, x2, y1, y2;
    bool degenerate = false;
};

RectTrial draw_rect(Draw& d) {
    RectTrial t;
    t.spec.p = static_cast<int>(1 + d.below(3));
    t.spec.q = static_cast<int>(1 + d.below(3));
    std::size_t np = d.below(7);
    for (std::size_t i = 0; i < np; ++i) {
        double m = d.unit();
        double v;
        if (i > 0 && m < 0.2)
            v = t.spec.prefix[d.below(i)];
        else if (i > 0 && m < 0.3)
            v = t.spec.prefix[d.below(i)] + 1e-6 * d.unit();
        else
            v = d.range(-8.0, 8.0);
        t.spec.prefix.push_back(v);
    }
    double xa = d.range(-8.0, 8.0), xb = d.range(-8.0, 8.0);
    t.x1 = std::min(xa, xb);
    t.x2 = std::max(xa, xb);
    double ya = d.range(-8.0, 8.0), yb = d.range(-8.0, 8.0);
    t.y1 = std::min(ya, yb);
    t.y2 = std::max(ya, yb);
    double m = d.unit();
    if (m < 0.075) {
        t.x2 = t.x1;
        t.degenerate = true;
    } else if (m < 0.15) {
        t.y2 = t.y1;
        t.degenerate = true;
    }
    return t;
}

std::vector<double> rect_inputs(const RectTrial& t) {
    std::vector<double> in{static_cast<double>(t.spec.p), static_cast<double>(t.spec.q),
                           t.x1, t.x2, t.y1, t.y2};
    in.insert(in.end(), t.spec.prefix.begin(), t.spec.prefix.end());
    return in;
}

RectTrial rect_from_inputs(const std::vector<double>& in) {
    RectTrial t;
    t.spec.p = static_cast<int>(in.at(0));
    t.spec.q = static_cast<int>(in.at(1));
    t.x1 = in.at(2);
    t.x2 = in.at(3);
    t.y1 = in.at(4);
    t.y2 = in.at(5);
    t.spec.prefix.assign(in.begin() + 6, in.end());
    return t;
}

SweepRecord one_trial(SweepKind kind, std::uint64_t seed, std::uint64_t i, double tol) {
    Draw d(seed, static_cast<std::uint64_t>(kind), i);
    SweepRecord rec;
    rec.index = i;
    switch (kind) {
        case SweepKind::tn2:
        case SweepKind::supermodular: {
            RectTrial t = draw_rect(d);
            Margin m = (kind == SweepKind::tn2)
                           ? tn2_margin(t.spec, t.x1, t.x2, t.y1, t.y2, tol)
                           : supermodular_margin(t.spec, t.x1, t.x2, t.y1, t.y2, tol);
            rec.value = m.value;
            rec.scale = m.scale;
            rec.pass = m.pass;
            rec.degenerate = t.degenerate;
            rec.inputs = rect_inputs(t);
            break;
        }
        case SweepKind::fourpoint: {
            double mode = d.unit();
            double a[4];
            if (mode < 0.6) {
                for (auto& v : a) v = d.range(-10.0, 10.0);
                std::sort(a, a + 4);
            } else if (mode < 0.8) {
                a[0] = d.range(-10.0, 10.0);
                for (int k = 1; k < 4; ++k) a[k] = a[k - 1] + 1e-3 * d.unit();
            } else {
                for (auto& v : a) v = d.range(-10.0, 10.0);
                std::sort(a, a + 4);
                std::size_t pair = d.below(3);
                a[pair + 1] = a[pair];
                rec.degenerate = true;
            }
            Margin m = four_point_f(a[0], a[1], a[2], a[3], tol);
            rec.value = m.value;
            rec.scale = m.scale;
            rec.pass = m.pass;
            rec.inputs = {a[0], a[1], a[2], a[3]};
            break;
        }
        case SweepKind::triangle: {
            double v[3];
            for (auto& x : v) x = d.range(-3.0, 3.0);
            std::sort(v, v + 3);
            double mode = d.unit();
            if (mode < 0.15) {
                v[1] = v[0];
                rec.degenerate = true;
            } else if (mode < 0.3) {
                v[1] = v[2];
                rec.degenerate = true;
            }
            Margin m = triangle_h_margin(v[0], v[1], v[2], tol);
            rec.value = m.value;
            rec.scale = m.scale;
            rec.pass = m.pass;
            rec.inputs = {v[0], v[1], v[2]};
            break;
        }
        case SweepKind::phiproduct: {
            double x = d.range(0.0, 5.0), y = d.range(0.0, 5.0), z = d.range(0.0, 5.0);
            double mode = d.unit();
            if (mode < 0.1) {
                y = 0.0;
                rec.degenerate = true;
            } else if (mode < 0.2) {
                x = z = 0.0;
                rec.degenerate = true;
            }
            Margin m = phi_product_margin(x, y, z, tol);
            rec.value = m.value;
            rec.scale = m.scale;
            rec.pass = m.pass;
            rec.inputs = {x, y, z};
            break;
        }
        case SweepKind::hproduct: {
            double a = d.range(-3.0, 0.0);
            double b = a + d.range(0.05, 2.0);
            double c = b + d.range(0.05, 2.0);
            double e = c + d.range(0.05, 2.0);
            Margin m = h_product_margin(a, b, c, e, tol);
            rec.value = m.value;
            rec.scale = m.scale;
            rec.pass = m.pass;
            rec.inputs = {a, b, c, e};
            break;
        }
        case SweepKind::sandwich: {
            std::size_t q = 1 + d.below(40);
            std::uint64_t shape = d.below(4);
            double mu = d.range(-3.0, 3.0);
            double sigma = d.range(0.1, 5.0);
            std::vector<double> nodes(q + 1);
            switch (shape) {
                case 0:
                    for (auto& x : nodes) x = mu + sigma * d.normal();
                    break;
                case 1:
                    for (auto& x : nodes)
                        x = mu + sigma * std::numbers::sqrt3 * (2.0 * d.unit() - 1.0);
                    break;
                case 2:
                    for (auto& x : nodes)
                        x = mu + (d.below(2) ? sigma : -sigma) + 0.01 * sigma * d.normal();
                    break;
                default: {
                    double sq = std::sqrt(static_cast<double>(q));
                    nodes[0] = mu + sigma * sq;
                    for (std::size_t k = 1; k <= q; ++k)
                        nodes[k] = mu - sigma / sq + 0.05 * sigma * d.normal();
                    break;
                }
            }
            SandwichReport rep = sandwich_check(NodeMultiset(nodes), tol);
            rec.value = std::min(rep.slack_lower, rep.slack_upper);
            rec.scale = 1.0;
            rec.pass = rep.pass;
            rec.inputs = nodes;
            break;
        }
    }
    return rec;
}

double recheck_value(SweepKind kind, const SweepRecord& r) {
    switch (kind) {
        case SweepKind::tn2: {
            RectTrial t = rect_from_inputs(r.inputs);
            return tn2_margin_highprec(t.spec.prefix, t.spec.p, t.spec.q, t.x1, t.x2, t.y1,
                                       t.y2, kRecheckBits);
        }
        case SweepKind::supermodular: {
            RectTrial t = rect_from_inputs(r.inputs);
            return supermodular_margin_highprec(t.spec.prefix, t.spec.p, t.spec.q, t.x1,
                                                t.x2, t.y1, t.y2, kRecheckBits);
        }
        case SweepKind::fourpoint:
            return fourpoint_f_highprec(r.inputs[0], r.inputs[1], r.inputs[2], r.inputs[3],
                                        kRecheckBits);
        case SweepKind::triangle:
            return triangle_margin_highprec(r.inputs[0], r.inputs[1], r.inputs[2],
                                            kRecheckBits);
        case SweepKind::phiproduct:
            return phi_product_highprec(r.inputs[0], r.inputs[1], r.inputs[2], kRecheckBits);
        case SweepKind::hproduct:
            return h_product_highprec(r.inputs[0], r.inputs[1], r.inputs[2], r.inputs[3],
                                      kRecheckBits);
        case SweepKind::sandwich: {
            auto s = sandwich_slacks_highprec(NodeMultiset(r.inputs), kRecheckBits);
            return std::min(s.lower, s.upper);
        }
    }
    return 0.0;
}

}  // namespace

const char* sweep_kind_name(SweepKind k) {
    switch (k) {
        case SweepKind::tn2: return "tn2";
        case SweepKind::supermodular: return "supermodular";
        case SweepKind::fourpoint: return "fourpoint";
        case SweepKind::triangle: return "triangle";
        case SweepKind::phiproduct: return "phiproduct";
        case SweepKind::hproduct: return "hproduct";
        case SweepKind::sandwich: return "sandwich";
    }
    return "?";
}

std::optional<SweepKind> sweep_kind_from(const std::string& name) {
    for (SweepKind k : {SweepKind::tn2, SweepKind::supermodular, SweepKind::fourpoint,
                        SweepKind::triangle, SweepKind::phiproduct, SweepKind::hproduct,
                        SweepKind::sandwich})
        if (name == sweep_kind_name(k)) return k;
    return std::nullopt;
}

SweepResult run_certify(SweepKind kind, std::uint64_t trials, std::uint64_t seed, double tol) {
    if (trials == 0) throw std::invalid_argument("certify: trials must be >= 1");
    SweepResult res;
    res.kind = kind;
    res.trials = trials;
    res.records.resize(trials);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (long long i = 0; i < static_cast<long long>(trials); ++i)
        res.records[static_cast<std::size_t>(i)] =
            one_trial(kind, seed, static_cast<std::uint64_t>(i), tol);

    res.min_value = res.records.front().value;
    res.argmin = res.records.front();
    for (const auto& r : res.records) {
        if (!r.pass) ++res.failures;
        if (r.degenerate) {
            ++res.degenerate_trials;
            if (r.value == 0.0) ++res.degenerate_exact;
        }
        if (r.value < res.min_value) {
            res.min_value = r.value;
            res.argmin = r;
        }
    }
    for (const auto& r : res.records) {
        if (r.pass || res.failing.size() >= kMaxAdjudicated) continue;
        SweepFailure f;
        f.record = r;
        f.recheck = recheck_value(kind, r);
        f.cls = (f.recheck >= -1e-25) ? FailureClass::working_precision_artifact
                                      : FailureClass::confirmed_negative;
        res.failing.push_back(std::move(f));
    }
    res.pass = res.failures == 0;
    return res;
}

namespace {

const char* kIdentityNames[7] = {"convolution",     "repeated_sum", "weighted_sum",
                                 "parametric_derivative", "double_sum",   "leibniz",
                                 "rescaling"};

IdentityRecord identity_trial(std::size_t id, std::uint64_t seed, std::uint64_t i,
                              double tol) {
    Draw d(seed, 100 + id, i);
    std::size_t q;
    if (id == 0)
        q = 1 + d.below(6);  // convolution exercised on q <= 6
    else if (id == 3)
        q = 1 + d.below(8);
    else
        q = d.below(9);
    std::vector<double> nodes(q + 1);
    for (std::size_t k = 0; k <= q; ++k) {
        if (k > 0 && d.unit() < 0.2)
            nodes[k] = nodes[d.below(k)];
        else
            nodes[k] = d.range(-5.0, 5.0);
    }
    // rotate so every position serves as x_0 across the battery
    std::rotate(nodes.begin(), nodes.begin() + static_cast<long>(d.below(q + 1)),
                nodes.end());

    IdentityRecord rec;
    rec.identity = kIdentityNames[id];
    rec.index = i;
    rec.q = q;
    Residual r;
    switch (id) {
        case 0: {
            std::size_t j = d.below(q);
            double beta = d.range(0.1, 3.0);
            rec.tau = beta;
            r = convolution_residual(nodes, j, beta, 64, tol);
            break;
        }
        case 1:
            rec.tau = d.range(0.0, 3.0);
            r = repeated_sum_residual(nodes, rec.tau, tol);
            break;
        case 2:
            rec.tau = d.range(0.0, 3.0);
            r = weighted_sum_residual(nodes, rec.tau, tol);
            break;
        case 3:
            // away from tau = 0, where both sides of the derivative identity
            // vanish to order q and a fixed fd_step has nothing to resolve
            rec.tau = d.range(0.1, 3.0);
            r = parametric_derivative_residual(nodes, rec.tau, 1e-5, 10.0 * tol);
            break;
        case 4:
            rec.tau = d.range(0.0, 3.0);
            r = double_sum_residual(nodes, rec.tau, tol);
            break;
        case 5: {
            double t1 = d.range(-2.0, 2.0), t2 = d.range(-2.0, 2.0);
            rec.tau = t1 + t2;
            r = leibniz_residual(nodes, t1, t2, tol);
            break;
        }
        default: {
            double t = d.range(-2.0, 2.0);
            double alpha = (d.below(2) ? 1.0 : -1.0) * d.range(0.5, 2.0);
            rec.tau = alpha;
            r = rescaling_residual(nodes, t, alpha, tol);
            break;
        }
    }
    rec.residual = r.rel_residual;
    rec.pass = r.pass;
    return rec;
}

}  // namespace

SelftestResult run_selftest(std::uint64_t trials, std::uint64_t seed, double tol) {
    if (trials == 0) throw std::invalid_argument("selftest: trials must be >= 1");
    SelftestResult res;
    res.records.resize(7 * trials);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
    for (long long flat = 0; flat < static_cast<long long>(7 * trials); ++flat) {
        std::size_t id = static_cast<std::size_t>(flat) / trials;
        std::uint64_t i = static_cast<std::uint64_t>(flat) % trials;
        res.records[static_cast<std::size_t>(flat)] = identity_trial(id, seed, i, tol);
    }

    res.pass = true;
    for (std::size_t id = 0; id < 7; ++id) {
        IdentityRow row;
        row.identity = kIdentityNames[id];
        row.trials = trials;
        row.tol = (id == 3) ? 10.0 * tol : tol;
        row.pass = true;
        for (std::uint64_t i = 0; i < trials; ++i) {
            const auto& r = res.records[id * trials + i];
            row.max_rel = std::max(row.max_rel, r.residual);
            row.pass = row.pass && r.pass;
        }
        res.pass = res.pass && row.pass;
        res.rows.push_back(std::move(row));
    }
    return res;
}

}  // namespace expdd
