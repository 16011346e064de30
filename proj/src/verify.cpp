#include "smallball/verify.hpp"

#include "smallball/error.hpp"
#include "smallball/instances.hpp"
#include "smallball/oracles.hpp"
#include "smallball/prg.hpp"
#include "smallball/sampler.hpp"
#include "smallball/transfer.hpp"
#include "text.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace smallball {

using nlohmann::ordered_json;

namespace {

using Details = std::vector<std::pair<std::string, std::string>>;

std::string num(double x) {
    if (std::isfinite(x)) return text::format_double(x);
    return x > 0 ? "\"inf\"" : (x < 0 ? "\"-inf\"" : "\"nan\"");
}
std::string num(std::size_t x) { return std::to_string(x); }
std::string str(const std::string& s) { return ordered_json(s).dump(); }
std::string boolean(bool b) { return b ? "true" : "false"; }

MarkovChain fair_iid() { return make_independent_chain(Vector::Constant(2, 0.5)); }

DistributionOptions dist_options(kernels::Backend backend) {
    DistributionOptions o;
    o.backend = backend;
    return o;
}

SumDistribution all_ones_distribution(const MarkovChain& chain, std::span<const int> labeling, std::size_t n,
                                      kernels::Backend backend) {
    const auto signs = SignSystem::repeated(labeling, n, chain);
    return exact_sum_distribution(chain, signs, WeightSystem::all_ones(n), dist_options(backend));
}

constexpr int alternating_labels[2] = {1, -1};

// Target spectral parameters inside each bucket.
double bucket_lambda(double centre, std::uint64_t seed, std::uint64_t index) {
    CounterRng rng(seed, StreamId::Instances, index);
    const double lo = std::max(0.0, centre - 0.05);
    const double hi = centre + 0.05;
    return lo + (hi - lo) * rng.uniform();
}

// Instance index ranges kept apart so families never share a stream.
constexpr std::uint64_t equal_index_base = 1'000'000;
constexpr std::uint64_t diff_index_base = 2'000'000;
constexpr std::uint64_t xi_index_base = 3'000'000;

}  // namespace

// ---------------------------------------------------------------------------
// Families

double family_supremum(const std::vector<FamilyPoint>& family) {
    if (family.empty()) throw Error(ErrorCode::EmptyFamily, "cannot take a supremum over no instances");
    double best = 0.0;
    for (const auto& p : family) best = std::max(best, p.probability / p.shape);
    return best;
}

std::vector<FamilyPoint> equal_family(std::uint64_t seed, bool include_extremal, kernels::Backend backend) {
    std::vector<FamilyPoint> out;
    std::uint64_t index = equal_index_base;
    for (std::size_t states = 2; states <= 4; ++states) {
        for (double centre : {0.0, 0.2, 0.5, 0.8}) {
            for (int rep = 0; rep < 3; ++rep) {
                const double target = bucket_lambda(centre, seed, index);
                const auto bc = balanced_chain_with_lambda(states, target, seed, index);
                const double lam = spectral_lambda(bc.chain);
                for (std::size_t n = 8; n <= 16; ++n) {
                    const auto dist = all_ones_distribution(bc.chain, bc.labeling, n, backend);
                    out.push_back({"eq-N" + std::to_string(states) + "-i" + std::to_string(index) + "-n" +
                                       std::to_string(n),
                                   max_window_probability(dist, 1.0),
                                   bound_shape(BoundKind::ScalarHalfUnit, {n, 1, lam, 1.0})});
                }
                ++index;
            }
        }
    }
    if (include_extremal) {
        const auto iid = fair_iid();
        for (std::size_t n = 4; n <= 20; n += 2) {
            const auto dist = all_ones_distribution(iid, alternating_labels, n, backend);
            out.push_back({"eq-iid-n" + std::to_string(n), max_window_probability(dist, 1.0),
                           bound_shape(BoundKind::ScalarHalfUnit, {n, 1, 0.0, 1.0})});
        }
    }
    return out;
}

std::vector<FamilyPoint> diff_family(std::uint64_t seed, kernels::Backend backend) {
    std::vector<FamilyPoint> out;
    const auto iid = fair_iid();
    for (std::size_t n = 1; n <= 49; ++n) {
        const auto signs = SignSystem::alternating(n, iid);
        const auto dist = exact_sum_distribution(iid, signs, WeightSystem::arange(n), dist_options(backend));
        out.push_back({"diff-iid-n" + std::to_string(n), dist.max_point_mass(),
                       bound_shape(BoundKind::DistinctInt, {n, 1, 0.0, 0.0})});
    }
    std::uint64_t index = diff_index_base;
    for (std::size_t states = 2; states <= 4; ++states) {
        for (double centre : {0.0, 0.2, 0.5}) {
            const auto bc = balanced_chain_with_lambda(states, bucket_lambda(centre, seed, index), seed, index);
            const double lam = spectral_lambda(bc.chain);
            for (std::size_t n = 4; n <= 12; ++n) {
                const auto signs = SignSystem::repeated(bc.labeling, n, bc.chain);
                const auto dist =
                    exact_sum_distribution(bc.chain, signs, WeightSystem::arange(n), dist_options(backend));
                out.push_back({"diff-N" + std::to_string(states) + "-i" + std::to_string(index) + "-n" +
                                   std::to_string(n),
                               dist.max_point_mass(), bound_shape(BoundKind::DistinctInt, {n, 1, lam, 0.0})});
            }
            ++index;
        }
    }
    return out;
}

std::vector<FamilyPoint> prg_family(kernels::Backend backend) {
    std::vector<FamilyPoint> out;
    for (unsigned k : {2U, 4U, 6U}) {
        auto graph = std::make_shared<const ExpanderGraph>(build_mgg_expander(k));
        for (std::size_t n = k; n <= 18; n += k) {
            const PrgSpec spec(graph, n);
            const double p = prg_smallball_exact(spec, std::vector<double>(n, 1.0), 0.0, 1.0, 0, walk_budget, backend);
            out.push_back({"prg-k" + std::to_string(k) + "-n" + std::to_string(n), p,
                           bound_shape(BoundKind::Prg, {n, 1, 0.0, 1.0})});
        }
    }
    return out;
}

std::vector<FamilyPoint> esseen_family(std::uint64_t seed, bool include_extremal, kernels::Backend backend) {
    std::vector<FamilyPoint> out;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto inst = random_integer_instance(seed, i);
        const auto values = integer_step_values(inst.signs, inst.weights);
        const auto dist = exact_sum_distribution(inst.chain, values, dist_options(backend));
        const double integral = charfn_modulus_integral(inst.chain, values.cast<double>(), 1.0);
        out.push_back({inst.id, max_window_probability(dist, 1.0), 2.0 * integral});
    }
    if (include_extremal) {
        const auto iid = fair_iid();
        for (std::size_t n = 1; n <= 64; ++n) {
            const auto signs = SignSystem::alternating(n, iid);
            const auto values = integer_step_values(signs, WeightSystem::all_ones(n));
            const auto dist = exact_sum_distribution(iid, values, dist_options(backend));
            out.push_back({"esseen-iid-n" + std::to_string(n), max_window_probability(dist, 1.0),
                           2.0 * charfn_modulus_integral(iid, values.cast<double>(), 1.0)});
        }
    }
    return out;
}

std::vector<FamilyPoint> cosine_family() {
    std::vector<FamilyPoint> out;
    for (std::size_t k = 1; k <= 100; ++k) {
        out.push_back({"cos-k" + std::to_string(k), cosine_product_integral(std::vector<double>(k, 1.0)),
                       1.0 / std::sqrt(static_cast<double>(k))});
    }
    return out;
}

std::vector<FamilyPoint> coord_family() {
    // |x_1|^2 of a uniform unit vector is Beta(1/2, (d-1)/2); t_d is its median's root.
    std::vector<FamilyPoint> out;
    for (std::size_t d = 2; d <= 64; ++d) {
        const double t = std::sqrt(boost::math::ibeta_inv(0.5, (static_cast<double>(d) - 1.0) / 2.0, 0.5));
        out.push_back({"coord-d" + std::to_string(d), 1.0 / t, std::sqrt(static_cast<double>(d))});
    }
    return out;
}

namespace {

// log2 |D| with k = prg_k_for(n) and n padded to a multiple of k; degree 8.
double padded_log2_size(std::size_t n) {
    const unsigned k = prg_k_for(n);
    const std::size_t blocks = (n + k - 1) / k;
    return static_cast<double>(k) + 3.0 * static_cast<double>(blocks - 1);
}

}  // namespace

std::vector<FamilyPoint> prg_size_family() {
    std::vector<FamilyPoint> out;
    for (std::size_t n = 1; n <= 1024; ++n) {
        out.push_back({"size-n" + std::to_string(n), padded_log2_size(n), std::sqrt(static_cast<double>(n))});
    }
    return out;
}

namespace {

// Seeded families are fitted over this many consecutive seeds.
constexpr std::uint64_t fit_seed_count = 32;

template <class Family>
std::vector<FamilyPoint> over_seeds(std::uint64_t seed, Family&& family) {
    std::vector<FamilyPoint> out;
    for (std::uint64_t s = seed; s < seed + fit_seed_count; ++s) {
        auto part = family(s);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

}  // namespace

ConstantSet fit_all(std::uint64_t seed, kernels::Backend backend) {
    namespace cn = constant_names;
    const std::string s = std::to_string(seed);
    const std::string seeds = R"("seeds":[)" + s + "," + std::to_string(seed + fit_seed_count - 1) + "]";
    auto make = [](const char* name, const std::vector<FamilyPoint>& family, const std::string& description,
                   const std::string& grid) {
        return FittedConstant{name, round_up_significant(family_supremum(family), 6), description, grid};
    };
    ConstantSet out;
    out.set(make(cn::equal, over_seeds(seed, [&](std::uint64_t x) { return equal_family(x, true, backend); }),
                 "max-window probability (R=1) x (1-lambda) sqrt(n); balanced reversible chains, all-ones weights, "
                 "plus the fair independent chain",
                 "{" + seeds +
                     R"(,"states":[2,3,4],"lambda_buckets":[0,0.2,0.5,0.8],"bucket_halfwidth":0.05,"chains_per_cell":3,"n":[8,16],"independent_n":[4,6,8,10,12,14,16,18,20]})"));
    out.set(make(cn::diff, over_seeds(seed, [&](std::uint64_t x) { return diff_family(x, backend); }),
                 "max point mass x (1-lambda)^3 n^1.5; weights 1..n, fair independent chain and balanced reversible "
                 "chains",
                 "{" + seeds + R"(,"independent_n":[1,49],"states":[2,3,4],"lambda_buckets":[0,0.2,0.5],"n":[4,12]})"));
    out.set(make(cn::prg, prg_family(backend),
                 "P(|sum| <= 1) x sqrt(n) under the expander walk measure, all-ones weights",
                 R"({"k":[2,4,6],"n":"multiples of k up to 18","x0":0,"R":1})"));
    out.set(make(cn::esseen, over_seeds(seed, [&](std::uint64_t x) { return esseen_family(x, true, backend); }),
                 "max-window probability (R=1) / (2 x integral over [-1,1] of |charfn|); random integer instances "
                 "and all-ones independent sums",
                 "{" + seeds + R"(,"random_instances":200,"max_states":4,"max_steps":8,"max_weight":5,"independent_n":[1,64]})"));
    out.set(make(cn::cosine, cosine_family(), "sqrt(k) x integral over [-1,1] of |cos(2 pi xi)|^k",
                 R"({"k":[1,100]})"));
    out.set(make(cn::coord, coord_family(),
                 "1 / (t_d sqrt(d)) where t_d is the median of |first coordinate| of a uniform unit vector",
                 R"({"d":[2,64]})"));
    out.set(make(cn::prg_size, prg_size_family(),
                 "log2 of the walk count / sqrt(n), k = smallest even integer >= sqrt(n), degree 8, n padded to a "
                 "multiple of k",
                 R"({"n":[1,1024]})"));
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<TightnessRow> tightness_sweep(const std::vector<double>& lambdas, const std::vector<std::size_t>& ns,
                                          kernels::Backend backend) {
    std::vector<TightnessRow> out;
    for (const double lam : lambdas) {
        const auto chain = make_two_state_chain(lam);
        for (const std::size_t n : ns) {
            const auto dist = all_ones_distribution(chain, alternating_labels, n, backend);
            const double p0 = dist.at(0);
            out.push_back({lam, n, p0, p0 * std::sqrt((1.0 - lam) * static_cast<double>(n) / (1.0 + lam))});
        }
    }
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw Error(ErrorCode::PreconditionViolated, "need at least two matching points for a slope");
    }
    double mx = 0.0;
    double my = 0.0;
    const double m = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= m;
    my /= m;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Criteria

std::string CriterionResult::id() const {
    return std::string("A") + (number < 10 ? "0" : "") + std::to_string(number);
}

std::string CriterionResult::summary_line() const {
    std::string line = id() + (pass ? " PASS " : " FAIL ") + title;
    for (const auto& [k, v] : details) line += " " + k + "=" + v;
    return line;
}

std::string criterion_title(int number) {
    switch (number) {
        case 1: return "transfer operator matches path enumeration";
        case 2: return "central mass of the all-ones independent sum";
        case 3: return "stationary chain window bound with fitted constant";
        case 4: return "distinct-integer point mass scaling";
        case 5: return "binomial negative moment bound";
        case 6: return "cosine product integral scaling";
        case 7: return "product splitting inequality and averaging identities";
        case 8: return "switching string domination";
        case 9: return "expander walk generator bound and size";
        case 10: return "two-state chain tightness scaling";
        case 11: return "coordinate tail of a random unit vector";
        case 12: return "Fourier window bound and residue domination";
        case 13: return "report determinism";
        default: throw Error(ErrorCode::OutOfRange, "no criterion " + std::to_string(number));
    }
}

namespace {

CriterionResult oracle_equivalence(const VerifyContext& ctx) {
    double char_diff = 0.0;
    double mass_diff = 0.0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto inst = random_integer_instance(ctx.seed, i);
        const auto ivalues = integer_step_values(inst.signs, inst.weights);
        const Matrix values = ivalues.cast<double>();
        CounterRng rng(ctx.seed, StreamId::Instances, xi_index_base + i);
        for (double xi : {0.0, 0.5, rng.uniform(), rng.uniform(), 4.0 * rng.uniform() - 2.0}) {
            const auto a = char_fn(inst.chain, values, xi).value;
            const auto b = brute_force_char_fn(inst.chain, values, xi).value;
            char_diff = std::max(char_diff, std::abs(a - b));
        }
        const auto dp = exact_sum_distribution(inst.chain, ivalues, dist_options(ctx.backend));
        const auto brute = brute_force_distribution(inst.chain, ivalues);
        const std::int64_t lo = std::min(dp.lowest(), brute.lowest());
        const std::int64_t hi = std::max(dp.highest(), brute.highest());
        for (std::int64_t s = lo; s <= hi; ++s) mass_diff = std::max(mass_diff, std::abs(dp.at(s) - brute.at(s)));
    }
    CriterionResult r;
    r.pass = char_diff <= 1e-10 && mass_diff <= 1e-10;
    r.details = {{"instances", "200"}, {"max_charfn_diff", num(char_diff)}, {"max_mass_diff", num(mass_diff)}};
    return r;
}

CriterionResult central_mass(const VerifyContext& ctx) {
    const auto iid = fair_iid();
    const auto dist = all_ones_distribution(iid, alternating_labels, 10, ctx.backend);
    const double p0 = dist.at(0);
    const double expected = 252.0 / 1024.0;
    const auto signs = SignSystem::alternating(10, iid);
    const auto exact = exact_sum_distribution_rational(iid, integer_step_values(signs, WeightSystem::all_ones(10)));
    const Rational centre = exact.masses[static_cast<std::size_t>(0 - exact.offset)];
    const bool rational_ok = centre == Rational(252, 1024);
    CriterionResult r;
    r.pass = std::abs(p0 - expected) <= 1e-12 && rational_ok;
    r.details = {{"p0", num(p0)}, {"expected", num(expected)}, {"abs_error", num(std::abs(p0 - expected))},
                 {"rational_exact", boolean(rational_ok)}};
    return r;
}

CriterionResult equal_bound(const VerifyContext& ctx) {
    const double c = ctx.constants.value(constant_names::equal);
    const auto family = equal_family(ctx.seed, true, ctx.backend);
    std::size_t violations = 0;
    double worst = 0.0;
    for (const auto& p : family) {
        const double ratio = p.probability / (c * p.shape);
        worst = std::max(worst, ratio);
        if (ratio > 1.0) ++violations;
    }
    const double refit = round_up_significant(family_supremum(equal_family(ctx.seed + 1, true, ctx.backend)), 6);
    const double change = std::abs(refit - c) / c;
    CriterionResult r;
    r.pass = violations == 0 && change < 0.05;
    r.details = {{"instances", num(family.size())}, {"C_equal", num(c)},         {"max_ratio", num(worst)},
                 {"violations", num(violations)},   {"refit_C_equal", num(refit)}, {"refit_change", num(change)}};
    return r;
}

CriterionResult diff_scaling(const VerifyContext& ctx) {
    const double c = ctx.constants.value(constant_names::diff);
    const auto iid = fair_iid();
    std::vector<double> xs;
    std::vector<double> ys;
    std::size_t violations = 0;
    double worst = 0.0;
    for (std::size_t n : {9U, 16U, 25U, 36U, 49U}) {
        const auto signs = SignSystem::alternating(n, iid);
        const auto dist = exact_sum_distribution(iid, signs, WeightSystem::arange(n), dist_options(ctx.backend));
        const double p = dist.max_point_mass();
        xs.push_back(static_cast<double>(n));
        ys.push_back(p);
        const double ratio = p / theorem_bound(BoundKind::DistinctInt, {n, 1, 0.0, 0.0}, ctx.constants);
        worst = std::max(worst, ratio);
        if (ratio > 1.0) ++violations;
    }
    const double slope = loglog_slope(xs, ys);
    CriterionResult r;
    r.pass = slope >= -1.7 && slope <= -1.3 && violations == 0;
    r.details = {{"slope", num(slope)}, {"C_diff", num(c)}, {"max_ratio", num(worst)}, {"violations", num(violations)}};
    return r;
}

CriterionResult negative_moment(const VerifyContext&) {
    std::size_t checks = 0;
    std::size_t violations = 0;
    double worst = 0.0;
    for (unsigned n = 1; n <= 50; ++n) {
        for (unsigned d = 1; d <= 3; ++d) {
            for (int i = 1; i <= 10; ++i) {
                const auto m = binomial_negative_moment(n, i / 10.0, d);
                ++checks;
                worst = std::max(worst, m.exact / m.bound);
                if (m.exact > m.bound * (1.0 + 1e-12)) ++violations;
            }
        }
    }
    CriterionResult r;
    r.pass = violations == 0;
    r.details = {{"checks", num(checks)}, {"max_ratio", num(worst)}, {"violations", num(violations)}};
    return r;
}

CriterionResult cosine_scaling(const VerifyContext& ctx) {
    const double c = ctx.constants.value(constant_names::cosine);
    double worst = 0.0;
    std::size_t violations = 0;
    for (const auto& p : cosine_family()) {
        const double scaled = p.probability / p.shape;
        worst = std::max(worst, scaled);
        if (scaled > c) ++violations;
    }
    CriterionResult r;
    r.pass = violations == 0;
    r.details = {{"C_cos", num(c)}, {"max_scaled_integral", num(worst)}, {"violations", num(violations)}};
    return r;
}

struct SplittingTally {
    std::size_t l1_violations = 0;
    double l1_excess = -std::numeric_limits<double>::infinity();
    std::size_t mean_violations = 0;
    double mean_excess = -std::numeric_limits<double>::infinity();
};

SplittingTally splitting_tally(std::uint64_t seed, std::size_t count) {
    SplittingTally t;
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto sides = holder_lhs_rhs(random_holder_instance(seed, i));
        t.l1_excess = std::max(t.l1_excess, sides.lhs - sides.rhs);
        t.mean_excess = std::max(t.mean_excess, sides.lhs_mean - sides.rhs);
        if (sides.lhs > sides.rhs + 1e-9) ++t.l1_violations;
        if (sides.lhs_mean > sides.rhs + 1e-9) ++t.mean_violations;
    }
    return t;
}

struct AveragingTally {
    std::size_t failures[3] = {0, 0, 0};
    double excess[3] = {0.0, -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
};

AveragingTally averaging_tally(std::uint64_t seed, std::size_t count) {
    AveragingTally t;
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto inst = random_averaging_instance(seed, i);
        const auto rep = check_averaging_identities(inst.mu, inst.u, inst.r, inst.product, 1e-10);
        t.excess[0] = std::max(t.excess[0], rep.splitting_defect);
        t.excess[1] = std::max(t.excess[1], rep.chain_lhs - rep.chain_rhs);
        t.excess[2] = std::max(t.excess[2], rep.product_lhs - rep.product_rhs);
        if (!rep.splitting_pass) ++t.failures[0];
        if (!rep.chain_pass) ++t.failures[1];
        if (!rep.product_pass) ++t.failures[2];
    }
    return t;
}

CriterionResult splitting(const VerifyContext& ctx) {
    const auto s = splitting_tally(ctx.seed, 500);
    const auto a = averaging_tally(ctx.seed, 1000);
    CriterionResult r;
    r.pass = s.l1_violations == 0 && a.failures[0] == 0 && a.failures[1] == 0 && a.failures[2] == 0;
    r.details = {{"instances", "500"},
                 {"l1_form_violations", num(s.l1_violations)},
                 {"l1_form_max_excess", num(s.l1_excess)},
                 {"mean_form_violations", num(s.mean_violations)},
                 {"mean_form_max_excess", num(s.mean_excess)},
                 {"averaging_instances", "1000"},
                 {"expectation_splitting_failures", num(a.failures[0])},
                 {"expectation_splitting_max_defect", num(a.excess[0])},
                 {"chain_product_failures", num(a.failures[1])},
                 {"chain_product_max_excess", num(a.excess[1])},
                 {"operator_product_failures", num(a.failures[2])},
                 {"operator_product_max_excess", num(a.excess[2])}};
    return r;
}

std::vector<std::vector<bool>> switching_masks(unsigned n) {
    std::vector<std::vector<bool>> masks = {std::vector<bool>(n, true)};
    std::vector<bool> alt(n);
    std::vector<bool> front(n);
    std::vector<bool> back(n);
    for (unsigned j = 0; j < n; ++j) {
        alt[j] = j % 2 == 0;
        front[j] = 2 * j < n + 1;
        back[j] = 2 * j + 1 >= n;
    }
    masks.push_back(alt);
    masks.push_back(front);
    masks.push_back(back);
    return masks;
}

struct SwitchingTally {
    std::size_t checks = 0;
    std::size_t quarter_failures = 0;
    std::size_t half_failures = 0;
    std::size_t moment_failures = 0;
    double quarter_margin = std::numeric_limits<double>::infinity();
    double half_margin = std::numeric_limits<double>::infinity();
    double moment_excess = -std::numeric_limits<double>::infinity();
};

SwitchingTally switching_tally(kernels::Backend backend) {
    SwitchingTally t;
    for (unsigned n = 1; n <= 13; ++n) {
        const auto masks = switching_masks(n);
        for (int i = 0; i <= 10; ++i) {
            for (std::size_t m = 0; m < masks.size(); ++m) {
                const auto rep = switching_stats(n, i / 10.0, masks[m], backend);
                ++t.checks;
                t.quarter_margin = std::min(t.quarter_margin, rep.domination_margin);
                if (!rep.dominated()) ++t.quarter_failures;
                if (!rep.jensen_chain()) ++t.moment_failures;
                t.moment_excess = std::max({t.moment_excess, rep.mean_inv_sqrt_r - rep.mean_inv_sqrt_r_prime,
                                            rep.mean_inv_sqrt_r_prime - rep.sqrt_mean_inv_r_prime,
                                            rep.sqrt_mean_inv_r_prime - rep.moment_bound});
                if (m == 0) {
                    t.half_margin = std::min(t.half_margin, rep.domination_margin_half);
                    if (!rep.dominated_half()) ++t.half_failures;
                }
            }
        }
    }
    return t;
}

CriterionResult switching(const VerifyContext& ctx) {
    const auto t = switching_tally(ctx.backend);
    CriterionResult r;
    r.pass = t.quarter_failures == 0 && t.moment_failures == 0;
    r.details = {{"checks", num(t.checks)},
                 {"domination_failures", num(t.quarter_failures)},
                 {"min_tail_margin", num(t.quarter_margin)},
                 {"moment_chain_failures", num(t.moment_failures)},
                 {"half_trials_failures", num(t.half_failures)},
                 {"half_trials_min_margin", num(t.half_margin)}};
    return r;
}

CriterionResult prg_check(const VerifyContext& ctx) {
    const double c = ctx.constants.value(constant_names::prg);
    const double c1 = ctx.constants.value(constant_names::prg_size);
    auto g4 = build_mgg_expander(4);
    const double lam4 = certify_lambda(g4);
    std::size_t violations = 0;
    double worst = 0.0;
    for (unsigned k : {2U, 4U}) {
        auto graph = std::make_shared<const ExpanderGraph>(build_mgg_expander(k));
        for (std::size_t n : {8U, 12U, 16U}) {
            const PrgSpec spec(graph, n);
            const double p =
                prg_smallball_exact(spec, std::vector<double>(n, 1.0), 0.0, 1.0, 0, walk_budget, ctx.backend);
            const double ratio = p / theorem_bound(BoundKind::Prg, {n, 1, 0.0, 1.0}, ctx.constants);
            worst = std::max(worst, ratio);
            if (ratio > 1.0) ++violations;
        }
    }
    std::size_t size_violations = 0;
    double size_worst = 0.0;
    for (const auto& p : prg_size_family()) {
        const double ratio = p.probability / (c1 * p.shape);
        size_worst = std::max(size_worst, ratio);
        if (ratio > 1.0) ++size_violations;
    }
    CriterionResult r;
    r.pass = lam4 < 0.884 && violations == 0 && size_violations == 0;
    r.details = {{"certified_lambda_k4", num(lam4)}, {"C_prg", num(c)},        {"max_ratio", num(worst)},
                 {"violations", num(violations)},     {"C_1", num(c1)},         {"max_size_ratio", num(size_worst)},
                 {"size_violations", num(size_violations)}};
    return r;
}

CriterionResult tightness(const VerifyContext& ctx) {
    const std::vector<double> lambdas = {0.0, 0.3, 0.6};
    const std::vector<std::size_t> ns = {64, 128, 256, 512, 1024};
    const auto rows = tightness_sweep(lambdas, ns, ctx.backend);
    bool slopes_ok = true;
    double ref = 0.0;
    double top = 0.0;
    CriterionResult r;
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        std::vector<double> xs;
        std::vector<double> ys;
        for (std::size_t ni = 0; ni < ns.size(); ++ni) {
            const auto& row = rows[li * ns.size() + ni];
            xs.push_back(static_cast<double>(row.n));
            ys.push_back(row.center_mass);
            top = std::max(top, row.scaled);
            if (li == 0) ref = std::max(ref, row.scaled);
        }
        const double slope = loglog_slope(xs, ys);
        slopes_ok = slopes_ok && slope >= -0.55 && slope <= -0.45;
        r.details.emplace_back("slope_lambda_" + text::format_double(lambdas[li]), num(slope));
    }
    r.details.emplace_back("max_scaled", num(top));
    r.details.emplace_back("independent_max_scaled", num(ref));
    r.pass = slopes_ok && top <= 2.0 * ref;
    return r;
}

CriterionResult coord_tail(const VerifyContext& ctx) {
    const double c = ctx.constants.value(constant_names::coord);
    std::size_t violations = 0;
    double lowest = 1.0;
    for (std::size_t d = 2; d <= 64; ++d) {
        const double tail = first_coord_tail_exact(d, 1.0 / (c * std::sqrt(static_cast<double>(d))));
        lowest = std::min(lowest, tail);
        if (tail < 0.5 - 1e-10) ++violations;
    }
    const double t3 = 1.0 / (c * std::sqrt(3.0));
    const double d3_error = std::abs(first_coord_tail_exact(3, t3) - (1.0 - t3));
    CriterionResult r;
    r.pass = violations == 0 && d3_error <= 1e-10;
    r.details = {{"C_coord", num(c)}, {"min_tail", num(lowest)}, {"violations", num(violations)},
                 {"d3_abs_error", num(d3_error)}};
    return r;
}

struct ZpTally {
    std::size_t instances = 0;
    std::size_t point_failures = 0;
    double route_diff = 0.0;
    double point_excess = -std::numeric_limits<double>::infinity();
};

ZpTally zp_tally(std::uint64_t seed, kernels::Backend backend) {
    ZpTally t;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto inst = random_integer_instance(seed, i);
        const auto values = integer_step_values(inst.signs, inst.weights);
        const auto dist = exact_sum_distribution(inst.chain, values, dist_options(backend));
        const std::int64_t p = find_prime(inst.weights);
        const auto zp = zp_fourier_average(inst.chain, values, p, backend);
        std::vector<double> folded(static_cast<std::size_t>(p), 0.0);
        for (std::int64_t s = dist.lowest(); s <= dist.highest(); ++s) {
            folded[static_cast<std::size_t>(((s % p) + p) % p)] += dist.at(s);
        }
        for (std::int64_t r = 0; r < p; ++r) {
            const auto ur = static_cast<std::size_t>(r);
            t.route_diff = std::max(t.route_diff, std::abs(folded[ur] - zp.residue_probabilities[ur]));
        }
        for (std::int64_t s = dist.lowest(); s <= dist.highest(); ++s) {
            const double residue = folded[static_cast<std::size_t>(((s % p) + p) % p)];
            t.point_excess = std::max(t.point_excess, dist.at(s) - residue);
            if (dist.at(s) > residue) ++t.point_failures;
        }
        ++t.instances;
    }
    return t;
}

CriterionResult esseen_domination(const VerifyContext& ctx) {
    const double c = ctx.constants.value(constant_names::esseen);
    std::size_t violations = 0;
    double worst = 0.0;
    const auto family = esseen_family(ctx.seed, false, ctx.backend);
    for (const auto& p : family) {
        const double ratio = p.probability / (c * p.shape);
        worst = std::max(worst, ratio);
        if (ratio > 1.0) ++violations;
    }
    const auto z = zp_tally(ctx.seed, ctx.backend);
    CriterionResult r;
    r.pass = violations == 0 && z.point_failures == 0 && z.route_diff <= 1e-12;
    r.details = {{"instances", num(family.size())},      {"C_esseen", num(c)},
                 {"max_ratio", num(worst)},              {"violations", num(violations)},
                 {"residue_failures", num(z.point_failures)}, {"fourier_vs_folded_max_diff", num(z.route_diff)}};
    return r;
}

CriterionResult run_numbered(int number, const VerifyContext& ctx) {
    switch (number) {
        case 1: return oracle_equivalence(ctx);
        case 2: return central_mass(ctx);
        case 3: return equal_bound(ctx);
        case 4: return diff_scaling(ctx);
        case 5: return negative_moment(ctx);
        case 6: return cosine_scaling(ctx);
        case 7: return splitting(ctx);
        case 8: return switching(ctx);
        case 9: return prg_check(ctx);
        case 10: return tightness(ctx);
        case 11: return coord_tail(ctx);
        case 12: return esseen_domination(ctx);
        default: throw Error(ErrorCode::OutOfRange, "no criterion " + std::to_string(number));
    }
}

CriterionResult labelled(int number, CriterionResult r) {
    r.number = number;
    r.title = criterion_title(number);
    return r;
}

CriterionResult safe_run(int number, const VerifyContext& ctx) {
    try {
        return labelled(number, run_numbered(number, ctx));
    } catch (const Error& e) {
        CriterionResult r;
        r.pass = false;
        r.details = {{"error", str(e.what())}};
        return labelled(number, std::move(r));
    }
}

std::vector<CriterionResult> run_first_twelve(const VerifyContext& ctx) {
    std::vector<CriterionResult> out;
    for (int i = 1; i < criterion_count; ++i) out.push_back(safe_run(i, ctx));
    return out;
}

CriterionResult determinism(const VerifyContext& ctx, const std::vector<CriterionResult>& first) {
    VerifyContext serial = ctx;
    serial.backend = kernels::Backend::Serial;
    const std::string a = verify_report_json(ctx.seed, first);
    const std::string b = verify_report_json(ctx.seed, run_first_twelve(serial));
    CriterionResult r;
    r.pass = a == b;
    r.details = {{"report_bytes", num(a.size())}, {"identical", boolean(a == b)}};
    return labelled(criterion_count, std::move(r));
}

}  // namespace

CriterionResult run_criterion(int number, const VerifyContext& context) {
    if (number == criterion_count) return determinism(context, run_first_twelve(context));
    if (number < 1 || number > criterion_count) {
        throw Error(ErrorCode::OutOfRange, "no criterion " + std::to_string(number));
    }
    return safe_run(number, context);
}

std::vector<CriterionResult> verify_all(const VerifyContext& context) {
    auto out = run_first_twelve(context);
    out.push_back(determinism(context, out));
    return out;
}

std::string verify_report_json(std::uint64_t seed, const std::vector<CriterionResult>& results) {
    ordered_json doc;
    doc["seed"] = seed;
    doc["generator_version"] = instance_generator_version;
    ordered_json list = ordered_json::array();
    bool all = true;
    for (const auto& r : results) {
        ordered_json item;
        item["id"] = r.id();
        item["title"] = r.title;
        item["pass"] = r.pass;
        ordered_json details = ordered_json::object();
        for (const auto& [k, v] : r.details) details[k] = ordered_json::parse(v);
        item["details"] = std::move(details);
        list.push_back(std::move(item));
        all = all && r.pass;
    }
    doc["criteria"] = std::move(list);
    doc["all_pass"] = all;
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Claims

std::vector<ClaimOutcome> verify_claims(std::uint64_t seed, double budget, kernels::Backend backend) {
    std::vector<ClaimOutcome> out;
    auto add = [&](std::string id, std::size_t instances, double violation, double tolerance) {
        out.push_back({std::move(id), instances, violation, tolerance, violation <= tolerance});
    };

    {
        std::size_t count = 0;
        double char_diff = 0.0;
        double mass_diff = 0.0;
        for (std::uint64_t i = 0; i < 200; ++i) {
            const auto inst = random_integer_instance(seed, i);
            const double paths = std::pow(static_cast<double>(inst.chain.n_states()),
                                          static_cast<double>(inst.signs.n_steps()));
            if (paths > budget) continue;
            const auto ivalues = integer_step_values(inst.signs, inst.weights);
            const Matrix values = ivalues.cast<double>();
            CounterRng rng(seed, StreamId::Instances, xi_index_base + i);
            const double xi = rng.uniform();
            char_diff = std::max(char_diff, std::abs(char_fn(inst.chain, values, xi).value -
                                                     brute_force_char_fn(inst.chain, values, xi, budget).value));
            const auto dp = exact_sum_distribution(inst.chain, ivalues, dist_options(backend));
            const auto brute = brute_force_distribution(inst.chain, ivalues, budget);
            for (std::int64_t s = std::min(dp.lowest(), brute.lowest()); s <= std::max(dp.highest(), brute.highest());
                 ++s) {
                mass_diff = std::max(mass_diff, std::abs(dp.at(s) - brute.at(s)));
            }
            ++count;
        }
        add("transfer.charfn-matches-enumeration", count, char_diff, 1e-10);
        add("transfer.distribution-matches-enumeration", count, mass_diff, 1e-10);
    }
    {
        double excess = -std::numeric_limits<double>::infinity();
        std::size_t count = 0;
        for (unsigned n = 1; n <= 50; ++n) {
            for (unsigned d = 1; d <= 3; ++d) {
                for (int i = 1; i <= 10; ++i) {
                    const auto m = binomial_negative_moment(n, i / 10.0, d);
                    excess = std::max(excess, m.exact - m.bound);
                    ++count;
                }
            }
        }
        add("binomial.negative-moment-bound", count, excess, 0.0);
    }
    {
        const auto s = splitting_tally(seed, 500);
        add("splitting.l1-form", 500, s.l1_excess, 1e-9);
        add("splitting.mean-form", 500, s.mean_excess, 1e-9);
        std::size_t strings = 0;
        std::size_t mismatches = 0;
        for (unsigned k = 0; k <= 12; ++k) {
            for (std::uint32_t x = 0; x < (1U << k); ++x) {
                ++strings;
                if (switching_t_set(x, k) != switching_t_set_by_cases(x, k)) ++mismatches;
            }
        }
        add("splitting.index-set-descriptions-agree", strings, static_cast<double>(mismatches), 0.0);
    }
    {
        const auto a = averaging_tally(seed, 1000);
        add("averaging.expectation-splitting", 1000, a.excess[0], 1e-10);
        add("averaging.chain-product", 1000, a.excess[1], 1e-10);
        add("averaging.operator-product", 1000, a.excess[2], 1e-10);
    }
    {
        const auto t = switching_tally(backend);
        add("switching.domination", t.checks, -t.quarter_margin, 1e-12);
        add("switching.domination-half-trials", 13 * 11, -t.half_margin, 1e-12);
        add("switching.moment-chain", t.checks, t.moment_excess, 1e-12);
    }
    {
        const auto z = zp_tally(seed, backend);
        add("residues.fourier-matches-folding", z.instances, z.route_diff, 1e-12);
        add("residues.dominate-point-mass", z.instances, z.point_excess, 0.0);
    }
    return out;
}

std::string claims_report_json(const std::vector<ClaimOutcome>& claims) {
    ordered_json doc = ordered_json::object();
    for (const auto& c : claims) {
        ordered_json item;
        item["instances"] = c.instances;
        item["max_violation"] = ordered_json::parse(num(c.max_violation));
        item["tolerance"] = c.tolerance;
        item["pass"] = c.pass;
        doc[c.id] = std::move(item);
    }
    return doc.dump(2) + "\n";
}

}  // namespace smallball
