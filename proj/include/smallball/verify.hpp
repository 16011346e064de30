#pragma once

// Acceptance suite, claim report, constant fitting and parameter sweeps.
// Every report is a deterministic function of (seed, constants); nothing
// time- or thread-dependent is written.

#include "smallball/bounds.hpp"
#include "smallball/kernels.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace smallball {

/// Seed of the committed constants and of verify-all without --seed.
inline constexpr std::uint64_t default_seed = 1;

inline constexpr int criterion_count = 13;

struct CriterionResult {
    int number = 0;
    std::string title;
    bool pass = false;
    /// Ordered (key, value) pairs; values are JSON scalars serialized as text.
    std::vector<std::pair<std::string, std::string>> details;

    /// "A01".."A13"
    [[nodiscard]] std::string id() const;
    /// One line: "<id> PASS|FAIL <title> key=value ..."
    [[nodiscard]] std::string summary_line() const;
};

struct VerifyContext {
    std::uint64_t seed = default_seed;
    ConstantSet constants;
    kernels::Backend backend = kernels::Backend::OpenMP;
};

std::string criterion_title(int number);

/// OutOfRange outside 1..criterion_count.
CriterionResult run_criterion(int number, const VerifyContext& context);

/// Criteria 1..criterion_count in order.
std::vector<CriterionResult> verify_all(const VerifyContext& context);

/// Deterministic JSON report of a verify run.
std::string verify_report_json(std::uint64_t seed, const std::vector<CriterionResult>& results);

// ---------------------------------------------------------------------------

struct ClaimOutcome {
    std::string id;
    std::size_t instances = 0;
    /// Largest amount by which the checked relation is exceeded (lhs - rhs for
    /// inequalities, |difference| for identities).
    double max_violation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Runs every proof-level check on seeded instances. `budget` bounds the
/// number of paths enumerated per instance.
std::vector<ClaimOutcome> verify_claims(std::uint64_t seed, double budget = 1e6,
                                        kernels::Backend backend = kernels::Backend::OpenMP);
/// {claim id: {"instances", "max_violation", "tolerance", "pass"}}
std::string claims_report_json(const std::vector<ClaimOutcome>& claims);

// ---------------------------------------------------------------------------

/// One fitting point: probability and the formula value with its constant set to 1.
struct FamilyPoint {
    std::string id;
    double probability = 0.0;
    double shape = 0.0;
};

std::vector<FamilyPoint> equal_family(std::uint64_t seed, bool include_extremal = true,
                                      kernels::Backend backend = kernels::Backend::OpenMP);
std::vector<FamilyPoint> diff_family(std::uint64_t seed, kernels::Backend backend = kernels::Backend::OpenMP);
std::vector<FamilyPoint> prg_family(kernels::Backend backend = kernels::Backend::OpenMP);
std::vector<FamilyPoint> esseen_family(std::uint64_t seed, bool include_extremal = true,
                                       kernels::Backend backend = kernels::Backend::OpenMP);
std::vector<FamilyPoint> cosine_family();
std::vector<FamilyPoint> coord_family();
std::vector<FamilyPoint> prg_size_family();

/// Every constant, each the supremum of its family rounded up to 6 significant digits.
/// Seeded families are taken over 32 consecutive seeds starting at `seed`.
ConstantSet fit_all(std::uint64_t seed = default_seed, kernels::Backend backend = kernels::Backend::OpenMP);

/// Sup of probability / shape, unrounded.
double family_supremum(const std::vector<FamilyPoint>& family);

// ---------------------------------------------------------------------------

struct TightnessRow {
    double lambda = 0.0;
    std::size_t n = 0;
    /// P(sum = 0) for the two-state chain with all-ones weights
    double center_mass = 0.0;
    /// center_mass * sqrt((1 - lambda) n / (1 + lambda))
    double scaled = 0.0;
};

std::vector<TightnessRow> tightness_sweep(const std::vector<double>& lambdas, const std::vector<std::size_t>& ns,
                                          kernels::Backend backend = kernels::Backend::OpenMP);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace smallball
