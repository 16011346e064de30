#include "smallball/transfer.hpp"

#include "smallball/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace smallball {

namespace {

void check_shapes(const MarkovChain& chain, const SignSystem& signs, const WeightSystem& weights) {
    if (signs.n_states() != chain.n_states()) {
        throw Error(ErrorCode::DimensionMismatch, "sign functions are defined on " + std::to_string(signs.n_states()) +
                                                      " states but the chain has " +
                                                      std::to_string(chain.n_states()));
    }
    if (signs.n_steps() != weights.size()) {
        throw Error(ErrorCode::DimensionMismatch, std::to_string(signs.n_steps()) + " sign functions but " +
                                                      std::to_string(weights.size()) + " weights");
    }
}

void check_values(const MarkovChain& chain, Eigen::Index cols) {
    if (static_cast<std::size_t>(cols) != chain.n_states()) {
        throw Error(ErrorCode::DimensionMismatch, "step values have " + std::to_string(cols) +
                                                      " columns but the chain has " +
                                                      std::to_string(chain.n_states()) + " states");
    }
}

std::int64_t reach_of(const IntStepValues& values, Eigen::Index j) {
    return values.row(j).cwiseAbs().maxCoeff();
}

std::int64_t total_span(const IntStepValues& values) {
    std::int64_t span = 0;
    for (Eigen::Index j = 0; j < values.rows(); ++j) span += reach_of(values, j);
    return span;
}

void check_budget(std::size_t n_states, std::size_t n_steps, std::int64_t span, std::uint64_t budget) {
    const long double cells = static_cast<long double>(n_states) * static_cast<long double>(n_steps) *
                              static_cast<long double>(2 * span + 1);
    if (cells > static_cast<long double>(budget)) {
        throw Error(ErrorCode::BudgetExceeded, "dynamic program needs " + std::to_string(static_cast<double>(cells)) +
                                                   " cells, budget is " + std::to_string(budget));
    }
}

}  // namespace

StepValues step_values(const SignSystem& signs, const WeightSystem& weights) {
    if (weights.dimension() != 1) {
        throw Error(ErrorCode::DimensionMismatch,
                    "scalar weights required, got dimension " + std::to_string(weights.dimension()));
    }
    if (signs.n_steps() != weights.size()) {
        throw Error(ErrorCode::DimensionMismatch, std::to_string(signs.n_steps()) + " sign functions but " +
                                                      std::to_string(weights.size()) + " weights");
    }
    const auto n = static_cast<Eigen::Index>(signs.n_steps());
    const auto states = static_cast<Eigen::Index>(signs.n_states());
    StepValues values(n, states);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double v = weights.scalar(static_cast<std::size_t>(j));
        for (Eigen::Index y = 0; y < states; ++y) {
            values(j, y) = signs.sign(static_cast<std::size_t>(j), static_cast<std::size_t>(y)) * v;
        }
    }
    return values;
}

IntStepValues integer_step_values(const SignSystem& signs, const WeightSystem& weights) {
    if (signs.n_steps() != weights.size()) {
        throw Error(ErrorCode::DimensionMismatch, std::to_string(signs.n_steps()) + " sign functions but " +
                                                      std::to_string(weights.size()) + " weights");
    }
    const std::vector<std::int64_t> ints = weights.integers();
    const auto n = static_cast<Eigen::Index>(signs.n_steps());
    const auto states = static_cast<Eigen::Index>(signs.n_states());
    IntStepValues values(n, states);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index y = 0; y < states; ++y) {
            values(j, y) = signs.sign(static_cast<std::size_t>(j), static_cast<std::size_t>(y)) *
                           ints[static_cast<std::size_t>(j)];
        }
    }
    return values;
}

CharFnValue char_fn(const MarkovChain& chain, const SignSystem& signs, const WeightSystem& weights, double xi) {
    check_shapes(chain, signs, weights);
    return char_fn(chain, step_values(signs, weights), xi);
}

CharFnValue char_fn(const MarkovChain& chain, const StepValues& values, double xi) {
    check_values(chain, values.cols());
    return {kernels::charfn_at(chain.transition(), chain.stationary(), values, xi)};
}

// ---------------------------------------------------------------------------

double SumDistribution::at(std::int64_t s) const noexcept {
    if (s < lowest() || s > highest()) return 0.0;
    return masses[static_cast<std::size_t>(s - offset)];
}

double SumDistribution::total() const noexcept {
    kernels::CompensatedSum acc;
    for (const double m : masses) acc.add(m);
    return acc.value();
}

double SumDistribution::max_point_mass() const noexcept {
    return masses.empty() ? 0.0 : *std::max_element(masses.begin(), masses.end());
}

SumDistribution RationalDistribution::to_float() const {
    SumDistribution out;
    out.offset = offset;
    out.span = span;
    out.masses.reserve(masses.size());
    for (const Rational& m : masses) out.masses.push_back(m.convert_to<double>());
    return out;
}

SumDistribution exact_sum_distribution(const MarkovChain& chain, const SignSystem& signs, const WeightSystem& weights,
                                       const DistributionOptions& options) {
    check_shapes(chain, signs, weights);
    return exact_sum_distribution(chain, integer_step_values(signs, weights), options);
}

SumDistribution exact_sum_distribution(const MarkovChain& chain, const IntStepValues& values,
                                       const DistributionOptions& options) {
    check_values(chain, values.cols());
    if (options.arithmetic == Arithmetic::ExactRational) {
        return exact_sum_distribution_rational(chain, values, std::min(options.cell_budget, rational_cell_budget))
            .to_float();
    }
    const std::size_t n_states = chain.n_states();
    const auto n_steps = static_cast<std::size_t>(values.rows());
    const std::int64_t span = total_span(values);
    if (n_steps == 0) return {0, {1.0}, 0};
    check_budget(n_states, n_steps, span, options.cell_budget);

    const auto width = static_cast<std::size_t>(2 * span + 1);
    std::vector<double> current(n_states * width, 0.0);
    std::vector<double> next(n_states * width, 0.0);
    for (std::size_t y = 0; y < n_states; ++y) {
        const std::int64_t s = values(0, static_cast<Eigen::Index>(y));
        current[y * width + static_cast<std::size_t>(s + span)] = chain.stationary()(static_cast<Eigen::Index>(y));
    }
    std::int64_t reach = reach_of(values, 0);
    std::vector<std::int64_t> shift(n_states);
    for (std::size_t j = 1; j < n_steps; ++j) {
        for (std::size_t t = 0; t < n_states; ++t) {
            shift[t] = values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(t));
        }
        std::fill(next.begin(), next.end(), 0.0);
        kernels::propagate_layer(options.backend, chain.transition(), current, next, width,
                                 static_cast<std::size_t>(span - reach), static_cast<std::size_t>(span + reach),
                                 shift);
        std::swap(current, next);
        reach += reach_of(values, static_cast<Eigen::Index>(j));
    }

    std::vector<double> masses(width);
    for (std::size_t p = 0; p < width; ++p) {
        kernels::CompensatedSum acc;
        for (std::size_t y = 0; y < n_states; ++y) acc.add(current[y * width + p]);
        masses[p] = acc.value();
    }
    std::size_t first = 0;
    while (first + 1 < width && masses[first] == 0.0) ++first;
    std::size_t last = width - 1;
    while (last > first && masses[last] == 0.0) --last;

    SumDistribution out;
    out.offset = static_cast<std::int64_t>(first) - span;
    out.masses.assign(masses.begin() + static_cast<std::ptrdiff_t>(first),
                      masses.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    out.span = span;
    return out;
}

RationalDistribution exact_sum_distribution_rational(const MarkovChain& chain, const IntStepValues& values,
                                                     std::uint64_t cell_budget) {
    check_values(chain, values.cols());
    const std::size_t n_states = chain.n_states();
    const auto n_steps = static_cast<std::size_t>(values.rows());
    const std::int64_t span = total_span(values);
    if (n_steps == 0) return {0, {Rational(1)}, 0};
    check_budget(n_states, n_steps, span, cell_budget);

    const auto width = static_cast<std::size_t>(2 * span + 1);
    std::vector<Rational> a(n_states * n_states);
    for (std::size_t y = 0; y < n_states; ++y) {
        for (std::size_t t = 0; t < n_states; ++t) a[y * n_states + t] = Rational(chain.transition(y, t));
    }
    std::vector<Rational> current(n_states * width);
    std::vector<Rational> next(n_states * width);
    for (std::size_t y = 0; y < n_states; ++y) {
        const std::int64_t s = values(0, static_cast<Eigen::Index>(y));
        current[y * width + static_cast<std::size_t>(s + span)] = Rational(chain.stationary()(static_cast<Eigen::Index>(y)));
    }
    std::int64_t reach = reach_of(values, 0);
    for (std::size_t j = 1; j < n_steps; ++j) {
        for (Rational& x : next) x = 0;
        for (std::size_t t = 0; t < n_states; ++t) {
            const std::int64_t shift = values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(t));
            for (auto p = static_cast<std::size_t>(span - reach); p <= static_cast<std::size_t>(span + reach); ++p) {
                Rational acc = 0;
                for (std::size_t y = 0; y < n_states; ++y) {
                    const Rational& m = current[y * width + p];
                    if (!m.is_zero() && !a[y * n_states + t].is_zero()) acc += m * a[y * n_states + t];
                }
                next[t * width + static_cast<std::size_t>(static_cast<std::int64_t>(p) + shift)] = acc;
            }
        }
        std::swap(current, next);
        reach += reach_of(values, static_cast<Eigen::Index>(j));
    }

    std::vector<Rational> masses(width);
    for (std::size_t p = 0; p < width; ++p) {
        for (std::size_t y = 0; y < n_states; ++y) masses[p] += current[y * width + p];
    }
    std::size_t first = 0;
    while (first + 1 < width && masses[first].is_zero()) ++first;
    std::size_t last = width - 1;
    while (last > first && masses[last].is_zero()) --last;

    RationalDistribution out;
    out.offset = static_cast<std::int64_t>(first) - span;
    out.masses.assign(masses.begin() + static_cast<std::ptrdiff_t>(first),
                      masses.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    out.span = span;
    return out;
}

// ---------------------------------------------------------------------------

double smallball_exact(const SumDistribution& dist, double x0, double radius) {
    if (!(radius >= 0.0) || dist.masses.empty()) return 0.0;
    const double lo_real = std::ceil(x0 - radius) - 1.0;
    const double hi_real = std::floor(x0 + radius) + 1.0;
    if (hi_real < static_cast<double>(dist.lowest()) || lo_real > static_cast<double>(dist.highest())) return 0.0;
    const std::int64_t lo = std::max(dist.lowest(), static_cast<std::int64_t>(lo_real));
    const std::int64_t hi = std::min(dist.highest(), static_cast<std::int64_t>(hi_real));
    kernels::CompensatedSum acc;
    for (std::int64_t s = lo; s <= hi; ++s) {
        if (std::abs(static_cast<double>(s) - x0) <= radius) acc.add(dist.at(s));
    }
    return acc.value();
}

double max_window_probability(const SumDistribution& dist, double radius) {
    if (!(radius >= 0.0) || dist.masses.empty()) return 0.0;
    // A closed window of length 2R covers at most floor(2R) + 1 consecutive lattice points.
    const double cover = std::floor(2.0 * radius);
    const std::size_t size = dist.masses.size();
    if (cover + 1.0 >= static_cast<double>(size)) return dist.total();
    const auto w = static_cast<std::size_t>(cover) + 1;
    double best = 0.0;
    for (std::size_t i = 0; i + w <= size; ++i) {
        kernels::CompensatedSum acc;
        for (std::size_t k = i; k < i + w; ++k) acc.add(dist.masses[k]);
        best = std::max(best, acc.value());
    }
    return best;
}

bool is_prime(std::int64_t p) noexcept {
    if (p < 2) return false;
    if (p < 4) return true;
    if (p % 2 == 0 || p % 3 == 0) return false;
    for (std::int64_t f = 5; f <= p / f; f += 6) {
        if (p % f == 0 || p % (f + 2) == 0) return false;
    }
    return true;
}

std::int64_t find_prime(const WeightSystem& weights) {
    const std::vector<std::int64_t> ints = weights.integers();
    std::int64_t top = 0;
    for (const std::int64_t v : ints) {
        if (v <= 0) throw Error(ErrorCode::InvalidWeights, "weights must be positive integers, got " + std::to_string(v));
        top = std::max(top, v);
    }
    std::int64_t p = 2 * top + 1;
    while (!is_prime(p)) ++p;
    return p;
}

double ZpAverage::residue_probability(std::int64_t x0) const {
    const std::int64_t r = ((x0 % prime) + prime) % prime;
    return residue_probabilities[static_cast<std::size_t>(r)];
}

ZpAverage zp_fourier_average(const MarkovChain& chain, const SignSystem& signs, const WeightSystem& weights,
                             std::int64_t prime, kernels::Backend backend) {
    check_shapes(chain, signs, weights);
    return zp_fourier_average(chain, integer_step_values(signs, weights), prime, backend);
}

ZpAverage zp_fourier_average(const MarkovChain& chain, const IntStepValues& values, std::int64_t prime,
                             kernels::Backend backend) {
    check_values(chain, values.cols());
    if (!is_prime(prime)) throw Error(ErrorCode::NotPrime, std::to_string(prime) + " is not prime");
    const std::int64_t top = values.size() == 0 ? 0 : values.cwiseAbs().maxCoeff();
    if (prime < top) {
        throw Error(ErrorCode::PreconditionViolated,
                    "prime " + std::to_string(prime) + " is below the largest weight " + std::to_string(top));
    }
    const auto p = static_cast<std::size_t>(prime);
    std::vector<double> xis(p);
    for (std::size_t x = 0; x < p; ++x) xis[x] = static_cast<double>(x) / static_cast<double>(prime);
    std::vector<std::complex<double>> phi(p);
    // Reduce each value mod p first so the phases stay small.
    IntStepValues reduced = values.unaryExpr([prime](std::int64_t v) { return ((v % prime) + prime) % prime; });
    kernels::charfn_sweep(backend, chain.transition(), chain.stationary(), reduced.cast<double>(), xis, phi);

    ZpAverage out;
    out.prime = prime;
    kernels::CompensatedSum avg;
    for (std::size_t x = 0; x < p; ++x) avg.add(std::abs(phi[x]));
    out.average = avg.value() / static_cast<double>(prime);

    out.residue_probabilities.resize(p);
    for (std::size_t r = 0; r < p; ++r) {
        kernels::CompensatedSum acc;
        for (std::size_t x = 0; x < p; ++x) {
            const auto phase = static_cast<double>((x * r) % p) / static_cast<double>(prime);
            acc.add((phi[x] * std::polar(1.0, -2.0 * std::numbers::pi * phase)).real());
        }
        out.residue_probabilities[r] = acc.value() / static_cast<double>(prime);
    }
    return out;
}

}  // namespace smallball
