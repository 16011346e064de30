#pragma once

// Finite-state reversible Markov chains, the sign functions read off their
// states, and the weight vectors the signs multiply.

#include "smallball/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace smallball {

namespace tol {
/// Structural checks on user data (which may be decimal-rounded).
inline constexpr double structural = 1e-9;
/// Identities that only internal arithmetic can break.
inline constexpr double derived = 1e-12;
}  // namespace tol

class MarkovChain;

MarkovChain validate_chain(const Matrix& transition, const std::optional<Vector>& stationary = {});

/// Immutable validated chain: row-stochastic transition matrix together with a
/// stationary distribution for which detailed balance holds.
class MarkovChain {
public:
    [[nodiscard]] std::size_t n_states() const noexcept { return static_cast<std::size_t>(transition_.rows()); }
    [[nodiscard]] const Matrix& transition() const noexcept { return transition_; }
    [[nodiscard]] const Vector& stationary() const noexcept { return stationary_; }
    [[nodiscard]] double transition(std::size_t from, std::size_t to) const {
        return transition_(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to));
    }

    /// Rank-one averaging operator: every row equals the stationary distribution.
    [[nodiscard]] Matrix averaging() const;

    /// True when every state carries positive stationary mass.
    [[nodiscard]] bool full_support() const noexcept;

private:
    MarkovChain(Matrix transition, Vector stationary)
        : transition_(std::move(transition)), stationary_(std::move(stationary)) {}

    friend MarkovChain validate_chain(const Matrix&, const std::optional<Vector>&);

    Matrix transition_;
    Vector stationary_;
};

/// Unique left fixed probability vector of a stochastic matrix. Throws
/// NoUniqueStationary when the fixed space is not one-dimensional.
Vector stationary_distribution(const Matrix& transition);

/// Largest |mu_i A_ij - mu_j A_ji| together with its location.
struct BalanceDefect {
    double value = 0.0;
    Eigen::Index row = 0;
    Eigen::Index col = 0;
};
BalanceDefect detailed_balance_defect(const Matrix& transition, const Vector& stationary);

/// D^{1/2} M D^{-1/2} with D = diag(mu). Requires full support.
Matrix similarity_transform(const Matrix& m, const Vector& mu);

/// Operator norm of A - E_mu on L2(mu). Equals the largest absolute
/// eigenvalue of the symmetrized matrix because the chain is reversible.
double spectral_lambda(const MarkovChain& chain);

/// Two-state chain that switches state with probability (1+lam)/2; uniform
/// stationary distribution and spectral parameter exactly lam.
MarkovChain make_two_state_chain(double lam);

/// Chain whose steps are i.i.d. draws from mu (every row equals mu).
MarkovChain make_independent_chain(const Vector& mu);

/// The functions f_1..f_n : [N] -> {-1,+1}, stored row-wise (row j holds f_j on
/// every state), with their stationary means.
class SignSystem {
public:
    /// `rows[j][y]` is f_j(y). When `require_balanced` is set every row must have
    /// stationary mean zero within tol::derived (InvalidSigns otherwise).
    SignSystem(const std::vector<std::vector<int>>& rows, const MarkovChain& chain, bool require_balanced = false);

    /// The same labeling on every step.
    static SignSystem repeated(std::span<const int> labeling, std::size_t n_steps, const MarkovChain& chain,
                               bool require_balanced = false);

    /// f(y) = +1 on even states, -1 on odd states; for two states this is the
    /// identity labeling f(1) = 1, f(2) = -1.
    static SignSystem alternating(std::size_t n_steps, const MarkovChain& chain);

    [[nodiscard]] std::size_t n_steps() const noexcept { return n_steps_; }
    [[nodiscard]] std::size_t n_states() const noexcept { return n_states_; }
    [[nodiscard]] int sign(std::size_t step, std::size_t state) const noexcept {
        return signs_[step * n_states_ + state];
    }
    [[nodiscard]] std::span<const int8_t> row(std::size_t step) const noexcept {
        return {signs_.data() + step * n_states_, n_states_};
    }
    [[nodiscard]] const std::vector<double>& balances() const noexcept { return balances_; }
    [[nodiscard]] double max_imbalance() const noexcept;
    [[nodiscard]] bool balanced(double tolerance = tol::derived) const noexcept { return max_imbalance() <= tolerance; }

private:
    std::size_t n_steps_ = 0;
    std::size_t n_states_ = 0;
    std::vector<int8_t> signs_;
    std::vector<double> balances_;
};

enum class WeightVariant { General, AtLeastUnit, HalfAtLeastUnit, DistinctPositiveIntegers };

/// n vectors in R^d, stored row-major, tagged with the hypothesis they satisfy.
class WeightSystem {
public:
    WeightSystem(std::size_t dimension, std::vector<double> flat, WeightVariant variant = WeightVariant::General);

    static WeightSystem scalars(std::vector<double> values, WeightVariant variant = WeightVariant::General);
    static WeightSystem all_ones(std::size_t n);
    /// (1, 2, ..., n), tagged distinct-positive-integers.
    static WeightSystem arange(std::size_t n);

    [[nodiscard]] std::size_t size() const noexcept { return dimension_ == 0 ? 0 : flat_.size() / dimension_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] WeightVariant variant() const noexcept { return variant_; }
    [[nodiscard]] double at(std::size_t i, std::size_t c) const noexcept { return flat_[i * dimension_ + c]; }
    [[nodiscard]] std::span<const double> vector(std::size_t i) const noexcept {
        return {flat_.data() + i * dimension_, dimension_};
    }
    [[nodiscard]] const std::vector<double>& flat() const noexcept { return flat_; }
    [[nodiscard]] double norm(std::size_t i) const noexcept;
    /// Scalar weight; requires dimension 1.
    [[nodiscard]] double scalar(std::size_t i) const;

    [[nodiscard]] bool integral() const noexcept;
    /// Integer weights; NonIntegerWeights unless d = 1 and every entry is integral.
    [[nodiscard]] std::vector<std::int64_t> integers() const;
    /// Indicator of |v_i| >= 1.
    [[nodiscard]] std::vector<bool> unit_mask() const;

private:
    std::size_t dimension_;
    std::vector<double> flat_;
    WeightVariant variant_;
};

}  // namespace smallball
