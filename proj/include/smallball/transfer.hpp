#pragma once

// Exact law of S = f_1(Y_1) v_1 + ... + f_n(Y_n) v_n along a stationary chain:
// characteristic function by alternating diagonal/transition products, the
// lattice distribution by a forward dynamic program, and the averaged Fourier
// transform over Z_p.

#include "smallball/chain.hpp"
#include "smallball/kernels.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstdint>
#include <vector>

namespace smallball {

/// Per-step, per-state contribution to the sum: values(j, y) = f_j(y) v_j for
/// ordinary sign systems, or a whole block sum for walk-based generators.
using StepValues = Matrix;
using IntStepValues = IntMatrix;

StepValues step_values(const SignSystem& signs, const WeightSystem& weights);
IntStepValues integer_step_values(const SignSystem& signs, const WeightSystem& weights);

struct CharFnValue {
    std::complex<double> value;

    [[nodiscard]] double re() const noexcept { return value.real(); }
    [[nodiscard]] double im() const noexcept { return value.imag(); }
    [[nodiscard]] double modulus() const noexcept { return std::abs(value); }
};

/// E[exp(2 pi i xi S)] = <mu, U_1 A U_2 A ... A U_n 1>, U_j = diag(exp(2 pi i xi f_j(y) v_j)).
CharFnValue char_fn(const MarkovChain& chain, const SignSystem& signs, const WeightSystem& weights, double xi);
CharFnValue char_fn(const MarkovChain& chain, const StepValues& values, double xi);

/// Lattice law of an integer-valued sum. masses[i] is P(S = offset + i).
struct SumDistribution {
    std::int64_t offset = 0;
    std::vector<double> masses;
    /// Partial sums never leave [-span, span].
    std::int64_t span = 0;

    [[nodiscard]] double at(std::int64_t s) const noexcept;
    [[nodiscard]] std::int64_t lowest() const noexcept { return offset; }
    [[nodiscard]] std::int64_t highest() const noexcept {
        return offset + static_cast<std::int64_t>(masses.size()) - 1;
    }
    [[nodiscard]] double total() const noexcept;
    /// max_x P(S = x)
    [[nodiscard]] double max_point_mass() const noexcept;
};

using Rational = boost::multiprecision::cpp_rational;

struct RationalDistribution {
    std::int64_t offset = 0;
    std::vector<Rational> masses;
    std::int64_t span = 0;

    [[nodiscard]] SumDistribution to_float() const;
};

enum class Arithmetic { Float, ExactRational };

struct DistributionOptions {
    /// Bound on N * n * (2 span + 1).
    std::uint64_t cell_budget = 1'000'000'000ULL;
    Arithmetic arithmetic = Arithmetic::Float;
    kernels::Backend backend = kernels::Backend::OpenMP;
};

/// Cell budget for the exact-rational mode.
inline constexpr std::uint64_t rational_cell_budget = 1'000'000ULL;

SumDistribution exact_sum_distribution(const MarkovChain& chain, const SignSystem& signs,
                                       const WeightSystem& weights, const DistributionOptions& options = {});
SumDistribution exact_sum_distribution(const MarkovChain& chain, const IntStepValues& values,
                                       const DistributionOptions& options = {});

/// Same dynamic program over exact rationals; the chain's double entries are
/// taken as the exact dyadic rationals they represent.
RationalDistribution exact_sum_distribution_rational(const MarkovChain& chain, const IntStepValues& values,
                                                     std::uint64_t cell_budget = rational_cell_budget);

/// P(|S - x0| <= radius), closed window. Empty windows give 0.
double smallball_exact(const SumDistribution& dist, double x0, double radius);

/// sup over real x0 of P(|S - x0| <= radius).
double max_window_probability(const SumDistribution& dist, double radius);

bool is_prime(std::int64_t p) noexcept;

/// Smallest prime strictly greater than 2 max_i v_i.
std::int64_t find_prime(const WeightSystem& weights);

struct ZpAverage {
    std::int64_t prime = 0;
    /// (1/p) sum_xi |E exp(2 pi i xi S / p)|
    double average = 0.0;
    /// P(S = r mod p) for r = 0..p-1 by Fourier inversion.
    std::vector<double> residue_probabilities;

    [[nodiscard]] double residue_probability(std::int64_t x0) const;
};

/// The xi-sweep runs in parallel; the reduction is in ascending xi so the
/// result does not depend on the thread count.
ZpAverage zp_fourier_average(const MarkovChain& chain, const SignSystem& signs, const WeightSystem& weights,
                             std::int64_t prime, kernels::Backend backend = kernels::Backend::OpenMP);
ZpAverage zp_fourier_average(const MarkovChain& chain, const IntStepValues& values, std::int64_t prime,
                             kernels::Backend backend = kernels::Backend::OpenMP);

}  // namespace smallball
