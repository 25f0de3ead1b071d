#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "expdd/bounds.hpp"
#include "expdd/inequalities.hpp"

// Randomized certification sweeps and the exact-identity self-test battery.
// Trial i is a pure function of (seed, i): results are byte-identical for a
// fixed seed regardless of thread count, because records are stored by index.

namespace expdd {

enum class SweepKind { tn2, supermodular, fourpoint, triangle, phiproduct, hproduct, sandwich };
const char* sweep_kind_name(SweepKind k);
std::optional<SweepKind> sweep_kind_from(const std::string& name);

struct SweepRecord {
    std::uint64_t index = 0;
    double value = 0.0;  // margin (sandwich: the smaller slack)
    double scale = 1.0;
    bool pass = false;
    bool degenerate = false;     // drawn as an exact-equality case
    std::vector<double> inputs;  // replay data; layout fixed per kind
};

enum class FailureClass { working_precision_artifact, confirmed_negative };

struct SweepFailure {
    SweepRecord record;
    double recheck = 0.0;  // normalized high-precision margin
    FailureClass cls = FailureClass::working_precision_artifact;
};

struct SweepResult {
    SweepKind kind{};
    std::uint64_t trials = 0;
    std::uint64_t failures = 0;
    std::uint64_t degenerate_trials = 0;
    std::uint64_t degenerate_exact = 0;  // degenerate draws whose margin was exactly 0
    double min_value = 0.0;
    SweepRecord argmin;
    std::vector<SweepRecord> records;
    std::vector<SweepFailure> failing;  // adjudicated at high precision, capped
    bool pass = false;
};

SweepResult run_certify(SweepKind kind, std::uint64_t trials, std::uint64_t seed,
                        double tol = 1e-10);

struct IdentityRecord {
    std::string identity;
    std::uint64_t index = 0;
    std::size_t q = 0;
    double tau = 0.0;
    double residual = 0.0;
    bool pass = false;
};

struct IdentityRow {
    std::string identity;
    std::uint64_t trials = 0;
    double max_rel = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct SelftestResult {
    std::vector<IdentityRecord> records;
    std::vector<IdentityRow> rows;
    bool pass = false;
};

// tol applies to the six direct identities; the finite-difference check runs
// at 10*tol
SelftestResult run_selftest(std::uint64_t trials, std::uint64_t seed, double tol = 1e-8);

}  // namespace expdd
