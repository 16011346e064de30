#include "smallball/sampler.hpp"

#include "smallball/error.hpp"
#include "smallball/quadrature.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <json.hpp>

#include <cmath>
#include <numbers>

namespace smallball {

std::string McEstimate::to_json() const {
    const nlohmann::json j{{"estimate", estimate}, {"samples", samples}, {"hits", hits},
                           {"ci_low", ci_low},     {"ci_high", ci_high}, {"seed", seed}};
    return j.dump();
}

std::pair<double, double> clopper_pearson(std::uint64_t hits, std::uint64_t samples, double confidence) {
    if (samples == 0) return {0.0, 1.0};
    const double alpha = 1.0 - confidence;
    const auto k = static_cast<double>(hits);
    const auto n = static_cast<double>(samples);
    const double lo = hits == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, alpha / 2.0);
    const double hi = hits == samples ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2.0);
    return {lo, hi};
}

McEstimate McEstimate::from_counts(std::uint64_t hits, std::uint64_t samples, std::uint64_t seed, double confidence) {
    McEstimate e;
    e.samples = samples;
    e.hits = hits;
    e.seed = seed;
    e.estimate = samples == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(samples);
    std::tie(e.ci_low, e.ci_high) = clopper_pearson(hits, samples, confidence);
    e.ci_low = std::min(e.ci_low, e.estimate);
    e.ci_high = std::max(e.ci_high, e.estimate);
    return e;
}

std::vector<std::vector<int>> sample_signs(const MarkovChain& chain, const SignSystem& signs, std::uint64_t count,
                                           std::uint64_t seed) {
    if (signs.n_states() != chain.n_states()) {
        throw Error(ErrorCode::DimensionMismatch, "sign functions and chain disagree on the number of states");
    }
    const auto tables = kernels::PathTables::from(chain.transition(), chain.stationary());
    std::vector<std::vector<int>> out(count, std::vector<int>(signs.n_steps()));
    std::vector<std::uint32_t> states(signs.n_steps());
    for (std::uint64_t i = 0; i < count; ++i) {
        kernels::sample_path(tables, seed, i, states);
        for (std::size_t j = 0; j < states.size(); ++j) out[i][j] = signs.sign(j, states[j]);
    }
    return out;
}

McEstimate smallball_mc(const MarkovChain& chain, const SignSystem& signs, const WeightSystem& weights,
                        const std::vector<double>& x0, double radius, std::uint64_t count, std::uint64_t seed,
                        kernels::Backend backend) {
    if (signs.n_states() != chain.n_states() || signs.n_steps() != weights.size()) {
        throw Error(ErrorCode::DimensionMismatch, "chain, signs and weights have inconsistent sizes");
    }
    if (x0.size() != weights.dimension()) {
        throw Error(ErrorCode::DimensionMismatch, "center has dimension " + std::to_string(x0.size()) +
                                                      ", weights have dimension " +
                                                      std::to_string(weights.dimension()));
    }
    if (!(radius >= 0.0)) throw Error(ErrorCode::OutOfRange, "radius must be nonnegative");
    const auto tables = kernels::PathTables::from(chain.transition(), chain.stationary());
    std::vector<int8_t> sign_data(signs.n_steps() * signs.n_states());
    for (std::size_t j = 0; j < signs.n_steps(); ++j) {
        const auto row = signs.row(j);
        std::copy(row.begin(), row.end(), sign_data.begin() + static_cast<std::ptrdiff_t>(j * signs.n_states()));
    }
    kernels::BallQuery q{sign_data, weights.flat(), signs.n_steps(), weights.dimension(), x0, radius};
    return McEstimate::from_counts(kernels::count_ball_hits(backend, tables, q, count, seed), count, seed);
}

namespace {

void check_tail_args(std::size_t dimension, double t) {
    if (dimension == 0) throw Error(ErrorCode::UnsupportedDimension, "dimension must be at least 1");
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::OutOfRange, "threshold must lie in [0, 1]");
}

}  // namespace

double first_coord_tail_exact(std::size_t dimension, double t) {
    check_tail_args(dimension, t);
    if (dimension == 1) return 1.0;
    // With x = sin(theta) the density c_d (1 - x^2)^((d-3)/2) dx becomes
    // c_d cos^(d-2)(theta) d theta, which is bounded on the whole range.
    const double d = static_cast<double>(dimension);
    const double c = std::exp(std::lgamma(d / 2.0) - std::lgamma((d - 1.0) / 2.0)) / std::sqrt(std::numbers::pi);
    QuadratureOptions opts;
    opts.abs_tolerance = 1e-10 / (2.0 * c);
    const double power = d - 2.0;
    const double integral =
        adaptive_simpson([power](double th) { return std::pow(std::cos(th), power); }, std::asin(t),
                         std::numbers::pi / 2.0, opts)
            .value;
    return std::min(1.0, 2.0 * c * integral);
}

McEstimate first_coord_tail_mc(std::size_t dimension, double t, std::uint64_t count, std::uint64_t seed,
                               kernels::Backend backend) {
    check_tail_args(dimension, t);
    return McEstimate::from_counts(kernels::count_sphere_tail(backend, dimension, t, count, seed), count, seed);
}

}  // namespace smallball
