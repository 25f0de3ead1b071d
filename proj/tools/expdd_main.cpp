// Command-line front end: evaluate divided differences of the exponential,
// report two-sided bounds, run randomized inequality certification sweeps,
// run the exact-identity self-test battery, and benchmark the kernels.
//
// Exit codes: 0 success, 1 a check failed, 2 usage or domain error,
// 3 numeric failure (overflow, lost convergence).

#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "expdd/bounds.hpp"
#include "expdd/divdiff.hpp"
#include "expdd/identities.hpp"
#include "expdd/inequalities.hpp"
#include "expdd/nodes.hpp"
#include "expdd/oracle.hpp"
#include "expdd/rng.hpp"
#include "expdd/sweeps.hpp"

using json = nlohmann::ordered_json;
using namespace expdd;

namespace {

std::string g17(double v) {
    char b[64];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

std::string g6(double v) {
    char b[64];
    std::snprintf(b, sizeof b, "%.6g", v);
    return b;
}

std::uint64_t seed_from_env_or_default() {
    const char* s = std::getenv("EXPDD_SEED");
    if (s == nullptr || *s == '\0') return 12345;
    if (*s == '-') throw std::invalid_argument("EXPDD_SEED: expected an unsigned integer");
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (errno != 0 || end == s || *end != '\0')
        throw std::invalid_argument("EXPDD_SEED: expected an unsigned integer");
    return v;
}

std::vector<double> gather_nodes(const std::vector<std::string>& tokens,
                                 const std::string& inline_text, const std::string& file) {
    std::string text;
    for (const auto& t : tokens) {
        text += t;
        text += ' ';
    }
    text += inline_text;
    text += ' ';
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw std::invalid_argument("cannot open node file: " + file);
        std::stringstream ss;
        ss << in.rdbuf();
        text += ss.str();
    }
    return parse_nodes(text);
}

// ---------------------------------------------------------------- dd

int run_dd(const std::vector<double>& nodes, double t, bool factorial, bool jsonl) {
    if (nodes.empty()) throw std::invalid_argument("dd: no nodes given");
    NodeMultiset xs(nodes);
    ScaledValue v = factorial ? dd_exp_factorial(xs, t) : dd_exp(xs, t);
    double val = v.value();

    if (jsonl) {
        json j;
        j["type"] = "dd";
        j["q"] = xs.order();
        j["t"] = t;
        j["factorial"] = factorial;
        j["sign"] = v.sign();
        j["mantissa"] = v.mantissa();
        j["shift"] = v.shift();
        if (v.is_zero())
            j["log_abs"] = nullptr;
        else
            j["log_abs"] = v.log_abs();
        if (std::isfinite(val)) j["value"] = val;
        std::cout << j.dump() << "\n";
        return 0;
    }

    std::cout << "nodes      " << xs.size() << " (order " << xs.order() << ")\n";
    std::cout << "t          " << g17(t) << "\n";
    std::cout << "kind       " << (factorial ? "factorial-normalized" : "plain") << "\n";
    if (v.is_zero()) {
        std::cout << "value      0 (exact)\n";
        return 0;
    }
    std::cout << "sign       " << (v.sign() > 0 ? "+1" : "-1") << "\n";
    std::cout << "log_abs    " << g17(v.log_abs()) << "\n";
    std::cout << "scaled     " << g17(v.mantissa()) << " * e^" << g17(v.shift()) << "\n";
    if (std::isfinite(val)) std::cout << "value      " << g17(val) << "\n";
    return 0;
}

// ---------------------------------------------------------------- bounds

int run_bounds_params(std::size_t n, double sigma, bool jsonl) {
    double L = bound_L(n, sigma);
    double M = bound_M(n, sigma);
    auto [elo, ehi] = bound_expansion(n, sigma);
    if (jsonl) {
        json j;
        j["type"] = "bounds";
        j["mode"] = "parameters";
        j["n"] = n;
        j["sigma"] = sigma;
        j["L"] = L;
        j["M"] = M;
        j["expansion_lower"] = elo;
        j["expansion_upper"] = ehi;
        std::cout << j.dump() << "\n";
        return 0;
    }
    std::cout << "n          " << n << "\n";
    std::cout << "sigma      " << g17(sigma) << "\n";
    std::cout << "L          " << g17(L) << "\n";
    std::cout << "M          " << g17(M) << "\n";
    std::cout << "expansion  [" << g17(elo) << ", " << g17(ehi) << "]\n";
    return 0;
}

int run_bounds_nodes(const std::vector<double>& nodes, double tol, bool jsonl) {
    NodeMultiset xs(nodes);
    SummaryStats st = summary(xs);
    SandwichReport rep = sandwich_check(xs, tol);
    ScaledValue asym = asymptotic_estimate(st);

    if (jsonl) {
        json j;
        j["type"] = "bounds";
        j["mode"] = "nodes";
        j["n"] = st.n;
        j["mu"] = st.mu;
        j["sigma"] = std::sqrt(st.sigma2);
        j["log_value"] = rep.value.log_abs();
        j["log_lower"] = rep.lower.log_abs();
        j["log_upper"] = rep.upper.log_abs();
        j["slack_lower"] = rep.slack_lower;
        j["slack_upper"] = rep.slack_upper;
        j["log_asymptotic"] = asym.log_abs();
        j["pass"] = rep.pass;
        std::cout << j.dump() << "\n";
        return rep.pass ? 0 : 1;
    }

    std::cout << "nodes        " << xs.size() << " (order " << st.n << ")\n";
    std::cout << "mu           " << g17(st.mu) << "\n";
    std::cout << "sigma        " << g17(std::sqrt(st.sigma2)) << "\n";
    std::cout << "log value    " << g17(rep.value.log_abs())
              << "   (n! times the divided difference)\n";
    std::cout << "log lower    " << g17(rep.lower.log_abs()) << "   slack "
              << g6(rep.slack_lower) << "\n";
    std::cout << "log upper    " << g17(rep.upper.log_abs()) << "   slack "
              << g6(rep.slack_upper) << "\n";
    std::cout << "log asympt   " << g17(asym.log_abs()) << "\n";
    std::cout << "sandwich     " << (rep.pass ? "PASS" : "FAIL") << "\n";
    return rep.pass ? 0 : 1;
}

// ---------------------------------------------------------------- certify

const char* failure_class_name(FailureClass c) {
    return c == FailureClass::working_precision_artifact ? "working_precision_artifact"
                                                         : "confirmed_negative";
}

int run_certify_cmd(const std::string& kind_name, std::uint64_t trials, std::uint64_t seed,
                    double tol, bool jsonl) {
    auto kind = sweep_kind_from(kind_name);
    if (!kind)
        throw std::invalid_argument("certify: unknown kind '" + kind_name +
                                    "' (expect tn2|supermodular|fourpoint|triangle|"
                                    "phiproduct|hproduct|sandwich)");
    SweepResult res = run_certify(*kind, trials, seed, tol);

    if (jsonl) {
        for (const auto& r : res.records) {
            json j;
            if (*kind == SweepKind::sandwich) {
                j["type"] = "sandwich";
                j["index"] = r.index;
                j["slack"] = r.value;
                j["pass"] = r.pass;
                j["nodes"] = r.inputs;
            } else {
                j["type"] = "margin";
                j["kind"] = sweep_kind_name(*kind);
                j["index"] = r.index;
                j["value"] = r.value;
                j["scale"] = r.scale;
                j["pass"] = r.pass;
                j["degenerate"] = r.degenerate;
                j["inputs"] = r.inputs;
            }
            std::cout << j.dump() << "\n";
        }
        for (const auto& f : res.failing) {
            json j;
            j["type"] = "failure";
            j["kind"] = sweep_kind_name(*kind);
            j["index"] = f.record.index;
            j["value"] = f.record.value;
            j["recheck"] = f.recheck;
            j["class"] = failure_class_name(f.cls);
            std::cout << j.dump() << "\n";
        }
        json j;
        j["type"] = "summary";
        j["kind"] = sweep_kind_name(*kind);
        j["trials"] = res.trials;
        j["failures"] = res.failures;
        j["degenerate_trials"] = res.degenerate_trials;
        j["degenerate_exact"] = res.degenerate_exact;
        j["min_value"] = res.min_value;
        j["argmin_index"] = res.argmin.index;
        j["argmin_inputs"] = res.argmin.inputs;
        j["tolerance"] = tol;
        j["pass"] = res.pass;
        std::cout << j.dump() << "\n";
        return res.pass ? 0 : 1;
    }

    std::cout << "certify " << sweep_kind_name(*kind) << ": trials " << res.trials
              << ", tolerance " << g6(tol) << "\n";
    std::cout << "min " << (*kind == SweepKind::sandwich ? "slack" : "margin") << "  "
              << g17(res.min_value) << " at trial " << res.argmin.index << "\n";
    std::cout << "  inputs:";
    for (double v : res.argmin.inputs) std::cout << ' ' << g17(v);
    std::cout << "\n";
    if (res.degenerate_trials > 0)
        std::cout << "degenerate draws " << res.degenerate_trials << ", exact zeros "
                  << res.degenerate_exact << "\n";
    std::cout << "failures " << res.failures << "\n";
    for (const auto& f : res.failing) {
        std::cout << "  trial " << f.record.index << ": value " << g6(f.record.value)
                  << ", recheck " << g6(f.recheck) << " -> " << failure_class_name(f.cls)
                  << "\n  inputs:";
        for (double v : f.record.inputs) std::cout << ' ' << g17(v);
        std::cout << "\n";
    }
    std::cout << "result " << (res.pass ? "PASS" : "FAIL") << "\n";
    return res.pass ? 0 : 1;
}

// ---------------------------------------------------------------- selftest

int run_selftest_cmd(std::uint64_t trials, std::uint64_t seed, double tol, bool jsonl) {
    SelftestResult res = run_selftest(trials, seed, tol);

    if (jsonl) {
        for (const auto& r : res.records) {
            json j;
            j["type"] = "identity";
            j["identity"] = r.identity;
            j["index"] = r.index;
            j["q"] = r.q;
            j["tau"] = r.tau;
            j["rel_residual"] = r.residual;
            j["pass"] = r.pass;
            std::cout << j.dump() << "\n";
        }
        for (const auto& row : res.rows) {
            json j;
            j["type"] = "identity_summary";
            j["identity"] = row.identity;
            j["trials"] = row.trials;
            j["max_rel"] = row.max_rel;
            j["tolerance"] = row.tol;
            j["pass"] = row.pass;
            std::cout << j.dump() << "\n";
        }
        return res.pass ? 0 : 1;
    }

    std::cout << "selftest: " << trials << " trials per identity, tolerance " << g6(tol)
              << " (finite-difference " << g6(10.0 * tol) << ")\n";
    for (const auto& row : res.rows) {
        std::printf("%-24s max rel %-12s %s\n", row.identity.c_str(),
                    g6(row.max_rel).c_str(), row.pass ? "PASS" : "FAIL");
    }
    std::cout << "result " << (res.pass ? "PASS" : "FAIL") << "\n";
    return res.pass ? 0 : 1;
}

// ---------------------------------------------------------------- bench

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_bench(std::uint64_t samples, std::uint64_t seed) {
    CounterRng rng(seed, 777);
    std::cout << "prefix frontiers: independent engine evaluations vs one incremental table\n";
    for (std::size_t q : {std::size_t{8}, std::size_t{64}, std::size_t{512}}) {
        std::vector<double> xs(q + 1);
        for (std::size_t i = 0; i <= q; ++i) xs[i] = rng.range(1000 * q + i, -2.0, 2.0);

        auto t0 = std::chrono::steady_clock::now();
        double acc_batch = 0.0;
        ScaledValue last_batch = ScaledValue::zero();
        for (std::size_t k = 1; k <= q + 1; ++k) {
            last_batch = dd_exp(NodeMultiset(std::vector<double>(xs.begin(), xs.begin() + k)));
            acc_batch += last_batch.shift();
        }
        double batch_s = seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        DDTable table(NodeMultiset(std::vector<double>{xs[0]}), 1.0);
        for (std::size_t k = 1; k <= q; ++k) dd_append(table, xs[k]);
        double incr_s = seconds_since(t0);

        double rel = ScaledValue::rel_diff(last_batch, table.value());
        std::printf("  q=%-4zu batch %9.3f ms   incremental %9.3f ms   final rel diff %s\n",
                    q, 1e3 * batch_s, 1e3 * incr_s, g6(rel).c_str());
        (void)acc_batch;
    }

    std::vector<double> nodes{-1.5, -0.4, 0.0, 0.3, 0.9, 1.7, 2.2};
    NodeMultiset xs(nodes);
    auto t0 = std::chrono::steady_clock::now();
    Estimate serial = hg_monte_carlo_serial(xs, samples, seed);
    double serial_s = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    Estimate parallel = hg_monte_carlo(xs, samples, seed);
    double par_s = seconds_since(t0);
    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("monte carlo %llu samples, order %zu: serial %8.2f ms   parallel %8.2f ms (threads %d)\n",
                static_cast<unsigned long long>(samples), xs.order(), 1e3 * serial_s,
                1e3 * par_s, threads);
    bool same = serial.mean == parallel.mean && serial.std_error == parallel.std_error;
    std::printf("parallel reduction bitwise equals serial: %s\n", same ? "yes" : "NO");
    return same ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"divided differences of the exponential: evaluation, certified bounds, "
                 "inequality margins, exact-identity self-tests"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "random seed (default: EXPDD_SEED or 12345)");
    std::string format = "text";
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text", "jsonl"}));
    int threads = 0;
    app.add_option("--threads", threads, "worker thread count (0 = library default)");

    // dd
    auto* cmd_dd = app.add_subcommand("dd", "evaluate exp[x_0..x_q] over a node multiset");
    std::vector<std::string> dd_tokens;
    std::string dd_nodes_text, dd_file;
    double dd_t = 1.0;
    bool dd_factorial = false;
    cmd_dd->add_option("tokens", dd_tokens, "node tokens: v or v^m");
    cmd_dd->add_option("--nodes", dd_nodes_text, "node tokens in one string");
    cmd_dd->add_option("--file", dd_file, "read node tokens from a file");
    cmd_dd->add_option("--t", dd_t, "scalar t in e^{t[x_0..x_q]} (default 1)");
    cmd_dd->add_flag("--factorial", dd_factorial,
                     "report q! t^{-q} e^{t[..]} (always positive)");

    // bounds
    auto* cmd_bounds = app.add_subcommand(
        "bounds", "two-sided envelope at fixed mean and variance; sandwich check on nodes");
    std::vector<std::string> b_tokens;
    std::string b_nodes_text, b_file;
    std::size_t b_n = 0;
    double b_sigma = -1.0;
    double b_tol = 1e-10;
    cmd_bounds->add_option("tokens", b_tokens, "node tokens: v or v^m");
    cmd_bounds->add_option("--nodes", b_nodes_text, "node tokens in one string");
    cmd_bounds->add_option("--file", b_file, "read node tokens from a file");
    cmd_bounds->add_option("--n", b_n, "order n of the divided difference");
    cmd_bounds->add_option("--sigma", b_sigma, "standard deviation of the node multiset");
    cmd_bounds->add_option("--tolerance", b_tol, "sandwich slack tolerance (default 1e-10)");

    // certify
    auto* cmd_certify = app.add_subcommand(
        "certify", "randomized margin sweep with high-precision failure adjudication");
    std::string c_kind;
    std::uint64_t c_trials = 1000;
    double c_tol = 1e-10;
    cmd_certify->add_option("kind", c_kind,
                            "tn2|supermodular|fourpoint|triangle|phiproduct|hproduct|sandwich")
        ->required();
    cmd_certify->add_option("--trials", c_trials, "number of random trials (default 1000)");
    cmd_certify->add_option("--tolerance", c_tol, "margin tolerance (default 1e-10)");

    // selftest
    auto* cmd_selftest =
        app.add_subcommand("selftest", "exact-identity battery over random node multisets");
    std::uint64_t s_trials = 200;
    double s_tol = 1e-8;
    cmd_selftest->add_option("--trials", s_trials, "trials per identity (default 200)");
    cmd_selftest->add_option("--tolerance", s_tol,
                             "relative residual tolerance (default 1e-8)");

    // bench
    auto* cmd_bench = app.add_subcommand("bench", "timing: engine vs incremental table, "
                                                  "serial vs parallel Monte Carlo");
    std::uint64_t bench_samples = 200000;
    cmd_bench->add_option("--samples", bench_samples,
                          "Monte Carlo sample count (default 200000)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (seed_opt->count() == 0) seed = seed_from_env_or_default();
        if (threads > 0) {
#ifdef _OPENMP
            omp_set_num_threads(threads);
#endif
        }
        bool jsonl = format == "jsonl";

        if (*cmd_dd) {
            return run_dd(gather_nodes(dd_tokens, dd_nodes_text, dd_file), dd_t,
                          dd_factorial, jsonl);
        }
        if (*cmd_bounds) {
            std::vector<double> nodes = gather_nodes(b_tokens, b_nodes_text, b_file);
            bool have_params = cmd_bounds->count("--n") > 0 || cmd_bounds->count("--sigma") > 0;
            if (!nodes.empty() && have_params)
                throw std::invalid_argument("bounds: give nodes or --n/--sigma, not both");
            if (nodes.empty()) {
                if (cmd_bounds->count("--n") == 0 || cmd_bounds->count("--sigma") == 0)
                    throw std::invalid_argument("bounds: need nodes, or both --n and --sigma");
                return run_bounds_params(b_n, b_sigma, jsonl);
            }
            return run_bounds_nodes(nodes, b_tol, jsonl);
        }
        if (*cmd_certify) return run_certify_cmd(c_kind, c_trials, seed, c_tol, jsonl);
        if (*cmd_selftest) return run_selftest_cmd(s_trials, seed, s_tol, jsonl);
        if (*cmd_bench) return run_bench(bench_samples, seed);
        throw std::invalid_argument("no subcommand given");
    } catch (const std::range_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::runtime_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
