#pragma once

// Monte Carlo estimates of small-ball probabilities for real and
// vector-valued weights, and the first-coordinate tail of a uniform unit
// vector.

#include "smallball/chain.hpp"
#include "smallball/kernels.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace smallball {

struct McEstimate {
    double estimate = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t hits = 0;
    /// Two-sided 99% Clopper-Pearson interval.
    double ci_low = 0.0;
    double ci_high = 1.0;
    std::uint64_t seed = 0;

    [[nodiscard]] bool covers(double p) const noexcept { return ci_low <= p && p <= ci_high; }
    [[nodiscard]] std::string to_json() const;

    static McEstimate from_counts(std::uint64_t hits, std::uint64_t samples, std::uint64_t seed,
                                  double confidence = 0.99);
};

/// Exact binomial confidence interval for hits out of samples.
std::pair<double, double> clopper_pearson(std::uint64_t hits, std::uint64_t samples, double confidence = 0.99);

/// Sign vectors (f_1(Y_1), ..., f_n(Y_n)) of samples 0..count-1.
std::vector<std::vector<int>> sample_signs(const MarkovChain& chain, const SignSystem& signs, std::uint64_t count,
                                           std::uint64_t seed);

/// Fraction of sampled sums within the closed ball of radius R about x0.
McEstimate smallball_mc(const MarkovChain& chain, const SignSystem& signs, const WeightSystem& weights,
                        const std::vector<double>& x0, double radius, std::uint64_t count, std::uint64_t seed,
                        kernels::Backend backend = kernels::Backend::OpenMP);

/// P(|X_1| >= t) for X uniform on the unit sphere in R^d, by quadrature of the
/// first-coordinate density.
double first_coord_tail_exact(std::size_t dimension, double t);

/// Same probability from normalized Gaussian samples.
McEstimate first_coord_tail_mc(std::size_t dimension, double t, std::uint64_t count, std::uint64_t seed,
                               kernels::Backend backend = kernels::Backend::OpenMP);

}  // namespace smallball
