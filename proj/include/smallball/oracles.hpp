#pragma once

// Independent checks: exhaustive path enumeration, the product-splitting
// inequality with its supporting identities, the switching-string domination
// argument, and L_p(mu) norms.

#include "smallball/chain.hpp"
#include "smallball/transfer.hpp"

#include <cstdint>
#include <vector>

namespace smallball {

/// Norms on functions [N] -> C weighted by a probability vector mu.
class MuNormContext {
public:
    explicit MuNormContext(Vector mu);

    [[nodiscard]] const Vector& mu() const noexcept { return mu_; }
    [[nodiscard]] double l1(const CVector& v) const;
    [[nodiscard]] double l2(const CVector& v) const;
    /// max |v_i| over states with positive mass.
    [[nodiscard]] double linf(const CVector& v) const;
    /// <v, mu> = E_mu[v].
    [[nodiscard]] std::complex<double> mean(const CVector& v) const;
    /// ||M||_{L2(mu) -> L2(mu)} as the top singular value of D^{1/2} M D^{-1/2}.
    /// Requires full support (ZeroStationaryMass).
    [[nodiscard]] double op_norm(const Matrix& m) const;

private:
    Vector mu_;
};

/// Path-enumeration budget for the brute-force oracles.
inline constexpr double path_budget = 1e7;

/// sum over all N^n state paths of mu(y_1) prod A(y_i, y_{i+1}) exp(2 pi i xi sum_j values(j, y_j)).
CharFnValue brute_force_char_fn(const MarkovChain& chain, const Matrix& values, double xi, double budget = path_budget);
CharFnValue brute_force_char_fn(const MarkovChain& chain, const SignSystem& signs, const WeightSystem& weights,
                                double xi, double budget = path_budget);

/// Law of the integer sum by the same enumeration.
SumDistribution brute_force_distribution(const MarkovChain& chain, const IntMatrix& values,
                                         double budget = path_budget);

// ---------------------------------------------------------------------------

struct HolderInstance {
    Vector mu;
    double lam = 0.0;
    /// T_1..T_k
    std::vector<Matrix> t;
    /// u_1..u_{k+1}
    std::vector<CVector> u;

    [[nodiscard]] std::size_t k() const noexcept { return t.size(); }
};

struct HolderSides {
    /// ||U_1 (T_1 + (1-lam) E) U_2 ... U_{k+1} 1||_{L1(mu)}
    double lhs = 0.0;
    /// sum over s of prod_{s_j=1} ||T_j|| prod_{s_j=0} (1-lam) prod_{j in t(s)} |<u_j, mu>|
    double rhs = 0.0;
    /// |<mu, U_1 (T_1 + (1-lam) E) ... U_{k+1} 1>|, the modulus of the mean
    /// rather than the L1 norm.
    double lhs_mean = 0.0;
};

/// Indices j in 1..k+1 with sbar_{j-1} = sbar_j = 0, where sbar = (0, s_1, ..., s_k, 0).
/// Bit j-1 of `s` is s_j. Bit j-1 of the result marks j. Requires k <= 30.
std::uint32_t switching_t_set(std::uint32_t s, unsigned k) noexcept;

/// The same set described by its interior and boundary cases: j with
/// s_{j-1} = s_j = 0 for 2 <= j <= k, plus 1 if s_1 = 0 and k+1 if s_k = 0.
std::uint32_t switching_t_set_by_cases(std::uint32_t s, unsigned k) noexcept;

/// Evaluates both sides for k <= 16 (BudgetExceeded beyond); checks
/// ||u_j||_inf <= 1 (PreconditionViolated).
HolderSides holder_lhs_rhs(const HolderInstance& inst);

struct AveragingReport {
    /// max entry of |E diag(u) E - <u, mu> E|
    double splitting_defect = 0.0;
    double chain_lhs = 0.0;
    double chain_rhs = 0.0;
    double product_lhs = 0.0;
    double product_rhs = 0.0;
    bool splitting_pass = false;
    bool chain_pass = false;
    bool product_pass = false;

    [[nodiscard]] bool pass() const noexcept { return splitting_pass && chain_pass && product_pass; }
};

/// (i) E diag(u) E = <u, mu> E; (ii) ||R_1 E R_2 E ... E R_k 1||_{L1} <= prod ||R_i 1||_{L1};
/// (iii) ||(prod_j U_j T_j) U_{k+1} 1||_{L1} <= prod ||T_j||. `product` supplies
/// the T_j and u_j of (iii).
AveragingReport check_averaging_identities(const Vector& mu, const CVector& u, const std::vector<Matrix>& r,
                                           const HolderInstance& product, double tolerance = 1e-10);

// ---------------------------------------------------------------------------

struct SwitchingReport {
    unsigned n = 0;
    double lam = 0.0;
    /// law of r(s) + 1 on 0..n (index = value)
    std::vector<double> shifted_r;
    /// law of r' = Binomial(floor(n/4) - 1, (1-lam)^2) + 1, trials clamped at 0
    std::vector<double> r_prime;
    /// same with floor(n/2) - 1 trials
    std::vector<double> r_prime_half;
    /// min over t of P[r+1 >= t] - P[r' >= t]; nonnegative means domination
    double domination_margin = 0.0;
    double domination_margin_half = 0.0;
    /// E[(r+1)^{-1/2}], E[r'^{-1/2}], (E[1/r'])^{1/2}, and the negative-moment bound
    /// (1 / (trials p))^{1/2}; the last is infinite when trials = 0 or p = 0.
    double mean_inv_sqrt_r = 0.0;
    double mean_inv_sqrt_r_prime = 0.0;
    double sqrt_mean_inv_r_prime = 0.0;
    double moment_bound = 0.0;

    [[nodiscard]] bool dominated(double tolerance = 1e-12) const noexcept { return domination_margin >= -tolerance; }
    [[nodiscard]] bool dominated_half(double tolerance = 1e-12) const noexcept {
        return domination_margin_half >= -tolerance;
    }
    [[nodiscard]] bool jensen_chain(double tolerance = 1e-12) const noexcept;
};

/// Exact switching statistics over {0,1}^(n-1) under P[s] = prod lam^{s_j} (1-lam)^{1-s_j}.
/// r(s) counts j in 1..n-2 with s_j = s_{j+1} = 0 and unit_mask[j-1]. Requires
/// n <= 13 (BudgetExceeded) and at least n/2 unit indices (HypothesisViolated).
SwitchingReport switching_stats(unsigned n, double lam, const std::vector<bool>& unit_mask,
                                kernels::Backend backend = kernels::Backend::OpenMP);

}  // namespace smallball
