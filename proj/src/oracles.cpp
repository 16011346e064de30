#include "smallball/oracles.hpp"

#include "smallball/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

namespace smallball {

namespace {

using kernels::CompensatedSum;

void check_mu(const Vector& mu) {
    if (mu.size() == 0) throw Error(ErrorCode::InvalidDistribution, "empty distribution");
    double total = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        if (!(mu(i) >= 0.0) || !std::isfinite(mu(i))) {
            throw Error(ErrorCode::InvalidDistribution, "mu[" + std::to_string(i) + "] is negative or not finite");
        }
        total += mu(i);
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidDistribution, "mu sums to " + std::to_string(total));
    }
}

void check_budget(std::size_t n_states, std::size_t n_steps, double budget) {
    const double paths = std::pow(static_cast<double>(n_states), static_cast<double>(n_steps));
    if (paths > budget) {
        throw Error(ErrorCode::BudgetExceeded, std::to_string(n_states) + "^" + std::to_string(n_steps) +
                                                   " paths exceed the enumeration budget");
    }
}

// Calls visit(probability, states) for every path with positive probability.
template <class Visit>
void for_each_path(const MarkovChain& chain, std::size_t n_steps, Visit&& visit) {
    const Matrix& a = chain.transition();
    const Vector& mu = chain.stationary();
    const auto n = static_cast<std::size_t>(a.rows());
    if (n_steps == 0) {
        std::vector<std::size_t> none;
        visit(1.0, none);
        return;
    }
    std::vector<std::size_t> state(n_steps, 0);
    std::vector<double> prob(n_steps, 0.0);
    std::size_t level = 0;
    // state[level] is the next candidate at that level.
    while (true) {
        if (state[level] == n) {
            if (level == 0) return;
            state[level] = 0;
            --level;
            ++state[level];
            continue;
        }
        const auto y = static_cast<Eigen::Index>(state[level]);
        const double p = level == 0 ? mu(y) : prob[level - 1] * a(static_cast<Eigen::Index>(state[level - 1]), y);
        if (p == 0.0) {
            ++state[level];
            continue;
        }
        prob[level] = p;
        if (level + 1 == n_steps) {
            visit(p, state);
            ++state[level];
        } else {
            ++level;
            state[level] = 0;
        }
    }
}

CVector mean_times_ones(const MuNormContext& ctx, const CVector& w) {
    return CVector::Constant(w.size(), ctx.mean(w));
}

}  // namespace

// ---------------------------------------------------------------------------

MuNormContext::MuNormContext(Vector mu) : mu_(std::move(mu)) { check_mu(mu_); }

double MuNormContext::l1(const CVector& v) const {
    if (v.size() != mu_.size()) throw Error(ErrorCode::DimensionMismatch, "vector length differs from mu");
    CompensatedSum acc;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc.add(mu_(i) * std::abs(v(i)));
    return acc.value();
}

double MuNormContext::l2(const CVector& v) const {
    if (v.size() != mu_.size()) throw Error(ErrorCode::DimensionMismatch, "vector length differs from mu");
    CompensatedSum acc;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc.add(mu_(i) * std::norm(v(i)));
    return std::sqrt(acc.value());
}

double MuNormContext::linf(const CVector& v) const {
    if (v.size() != mu_.size()) throw Error(ErrorCode::DimensionMismatch, "vector length differs from mu");
    double best = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (mu_(i) > 0.0) best = std::max(best, std::abs(v(i)));
    }
    return best;
}

std::complex<double> MuNormContext::mean(const CVector& v) const {
    if (v.size() != mu_.size()) throw Error(ErrorCode::DimensionMismatch, "vector length differs from mu");
    CompensatedSum re;
    CompensatedSum im;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        re.add(mu_(i) * v(i).real());
        im.add(mu_(i) * v(i).imag());
    }
    return {re.value(), im.value()};
}

double MuNormContext::op_norm(const Matrix& m) const {
    const auto n = mu_.size();
    if (m.rows() != n || m.cols() != n) throw Error(ErrorCode::DimensionMismatch, "operator size differs from mu");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(mu_(i) > 0.0)) {
            throw Error(ErrorCode::ZeroStationaryMass, "mu[" + std::to_string(i) + "] = 0; L2(mu) is degenerate");
        }
    }
    const Vector root = mu_.cwiseSqrt();
    const Matrix b = root.asDiagonal() * m * root.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Matrix> svd(b);
    return svd.singularValues()(0);
}

// ---------------------------------------------------------------------------

CharFnValue brute_force_char_fn(const MarkovChain& chain, const Matrix& values, double xi, double budget) {
    if (values.rows() > 0 && values.cols() != static_cast<Eigen::Index>(chain.n_states())) {
        throw Error(ErrorCode::DimensionMismatch, "step values need one column per state");
    }
    const auto n_steps = static_cast<std::size_t>(values.rows());
    check_budget(chain.n_states(), n_steps, budget);
    const double omega = 2.0 * std::numbers::pi * xi;
    CompensatedSum re;
    CompensatedSum im;
    for_each_path(chain, n_steps, [&](double p, const std::vector<std::size_t>& states) {
        double s = 0.0;
        for (std::size_t j = 0; j < states.size(); ++j) {
            s += values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(states[j]));
        }
        re.add(p * std::cos(omega * s));
        im.add(p * std::sin(omega * s));
    });
    return {std::complex<double>(re.value(), im.value())};
}

CharFnValue brute_force_char_fn(const MarkovChain& chain, const SignSystem& signs, const WeightSystem& weights,
                                double xi, double budget) {
    return brute_force_char_fn(chain, step_values(signs, weights), xi, budget);
}

SumDistribution brute_force_distribution(const MarkovChain& chain, const IntMatrix& values, double budget) {
    if (values.rows() > 0 && values.cols() != static_cast<Eigen::Index>(chain.n_states())) {
        throw Error(ErrorCode::DimensionMismatch, "step values need one column per state");
    }
    const auto n_steps = static_cast<std::size_t>(values.rows());
    check_budget(chain.n_states(), n_steps, budget);
    std::map<std::int64_t, CompensatedSum> mass;
    for_each_path(chain, n_steps, [&](double p, const std::vector<std::size_t>& states) {
        std::int64_t s = 0;
        for (std::size_t j = 0; j < states.size(); ++j) {
            s += values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(states[j]));
        }
        mass[s].add(p);
    });
    SumDistribution out;
    std::int64_t span = 0;
    for (Eigen::Index j = 0; j < values.rows(); ++j) span += values.row(j).cwiseAbs().maxCoeff();
    out.span = span;
    if (mass.empty()) return out;
    out.offset = mass.begin()->first;
    out.masses.assign(static_cast<std::size_t>(mass.rbegin()->first - out.offset + 1), 0.0);
    for (const auto& [s, acc] : mass) out.masses[static_cast<std::size_t>(s - out.offset)] = acc.value();
    return out;
}

// ---------------------------------------------------------------------------

std::uint32_t switching_t_set(std::uint32_t s, unsigned k) noexcept {
    // sbar_0 = 0, sbar_j = s_j for 1 <= j <= k, sbar_{k+1} = 0
    auto sbar = [&](unsigned j) -> unsigned {
        if (j == 0 || j == k + 1) return 0;
        return (s >> (j - 1)) & 1U;
    };
    std::uint32_t out = 0;
    for (unsigned j = 1; j <= k + 1; ++j) {
        if (sbar(j - 1) == 0 && sbar(j) == 0) out |= std::uint32_t{1} << (j - 1);
    }
    return out;
}

std::uint32_t switching_t_set_by_cases(std::uint32_t s, unsigned k) noexcept {
    if (k == 0) return 1;
    const std::uint32_t full = (std::uint32_t{1} << k) - 1;
    const std::uint32_t zeros = ~s & full;
    std::uint32_t out = 0;
    if (zeros & 1U) out |= 1U;
    // j in 2..k: bits j-2 and j-1 of zeros
    out |= zeros & (zeros << 1) & full;
    if ((zeros >> (k - 1)) & 1U) out |= std::uint32_t{1} << k;
    return out;
}

namespace {

void check_holder(const HolderInstance& inst) {
    check_mu(inst.mu);
    const auto n = inst.mu.size();
    if (!(inst.lam >= 0.0 && inst.lam <= 1.0)) throw Error(ErrorCode::OutOfRange, "lambda must lie in [0, 1]");
    if (inst.u.size() != inst.t.size() + 1) {
        throw Error(ErrorCode::DimensionMismatch, "need k operators and k+1 multipliers");
    }
    for (std::size_t j = 0; j < inst.t.size(); ++j) {
        if (inst.t[j].rows() != n || inst.t[j].cols() != n) {
            throw Error(ErrorCode::DimensionMismatch, "T_" + std::to_string(j + 1) + " has the wrong size");
        }
    }
    for (std::size_t j = 0; j < inst.u.size(); ++j) {
        if (inst.u[j].size() != n) {
            throw Error(ErrorCode::DimensionMismatch, "u_" + std::to_string(j + 1) + " has the wrong size");
        }
        const double top = inst.u[j].cwiseAbs().maxCoeff();
        if (top > 1.0 + 1e-12) {
            throw Error(ErrorCode::PreconditionViolated,
                        "||u_" + std::to_string(j + 1) + "||_inf = " + std::to_string(top) + " exceeds 1");
        }
    }
}

}  // namespace

HolderSides holder_lhs_rhs(const HolderInstance& inst) {
    check_holder(inst);
    const unsigned k = static_cast<unsigned>(inst.k());
    if (k > 16) throw Error(ErrorCode::BudgetExceeded, "k = " + std::to_string(k) + " exceeds 16");
    const MuNormContext ctx(inst.mu);
    const double gap = 1.0 - inst.lam;

    CVector w = inst.u[k];
    for (unsigned jj = k; jj-- > 0;) {
        const CVector tw = inst.t[jj].cast<std::complex<double>>() * w;
        w = inst.u[jj].cwiseProduct(tw + gap * mean_times_ones(ctx, w));
    }
    HolderSides out;
    out.lhs = ctx.l1(w);
    out.lhs_mean = std::abs(ctx.mean(w));

    std::vector<double> t_norm(k);
    for (unsigned j = 0; j < k; ++j) t_norm[j] = ctx.op_norm(inst.t[j]);
    std::vector<double> u_mean(k + 1);
    for (unsigned j = 0; j <= k; ++j) u_mean[j] = std::abs(ctx.mean(inst.u[j]));

    CompensatedSum rhs;
    const std::uint32_t count = std::uint32_t{1} << k;
    for (std::uint32_t s = 0; s < count; ++s) {
        double term = 1.0;
        for (unsigned j = 0; j < k; ++j) term *= ((s >> j) & 1U) ? t_norm[j] : gap;
        const std::uint32_t t = switching_t_set(s, k);
        for (unsigned j = 0; j <= k; ++j) {
            if ((t >> j) & 1U) term *= u_mean[j];
        }
        rhs.add(term);
    }
    out.rhs = rhs.value();
    return out;
}

AveragingReport check_averaging_identities(const Vector& mu, const CVector& u, const std::vector<Matrix>& r,
                                           const HolderInstance& product, double tolerance) {
    const MuNormContext ctx(mu);
    const auto n = mu.size();
    if (u.size() != n) throw Error(ErrorCode::DimensionMismatch, "u has the wrong size");
    AveragingReport out;

    // (i) E = 1 mu^T
    const CMatrix e = (Vector::Ones(n) * mu.transpose()).cast<std::complex<double>>();
    const CMatrix split = e * u.asDiagonal() * e;
    const CMatrix expected = ctx.mean(u) * e;
    out.splitting_defect = (split - expected).cwiseAbs().maxCoeff();
    out.splitting_pass = out.splitting_defect <= tolerance;

    // (ii)
    if (r.empty()) {
        out.chain_lhs = ctx.l1(CVector::Ones(n));
        out.chain_rhs = 1.0;
    } else {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (r[i].rows() != n || r[i].cols() != n) {
                throw Error(ErrorCode::DimensionMismatch, "R_" + std::to_string(i + 1) + " has the wrong size");
            }
        }
        CVector w = (r.back() * Vector::Ones(n)).cast<std::complex<double>>();
        for (std::size_t ii = r.size() - 1; ii-- > 0;) {
            w = r[ii].cast<std::complex<double>>() * mean_times_ones(ctx, w);
        }
        out.chain_lhs = ctx.l1(w);
        double prod = 1.0;
        for (const auto& ri : r) prod *= ctx.l1((ri * Vector::Ones(n)).cast<std::complex<double>>());
        out.chain_rhs = prod;
    }
    out.chain_pass = out.chain_lhs <= out.chain_rhs * (1.0 + tolerance) + tolerance;

    // (iii)
    check_holder(product);
    if (product.mu.size() != n) throw Error(ErrorCode::DimensionMismatch, "product instance uses another mu");
    const std::size_t k = product.k();
    CVector w = product.u[k];
    for (std::size_t jj = k; jj-- > 0;) {
        w = product.u[jj].cwiseProduct(product.t[jj].cast<std::complex<double>>() * w);
    }
    out.product_lhs = ctx.l1(w);
    double prod = 1.0;
    for (const auto& tj : product.t) prod *= ctx.op_norm(tj);
    out.product_rhs = prod;
    out.product_pass = out.product_lhs <= out.product_rhs * (1.0 + tolerance) + tolerance;
    return out;
}

// ---------------------------------------------------------------------------

bool SwitchingReport::jensen_chain(double tolerance) const noexcept {
    const bool first = mean_inv_sqrt_r <= mean_inv_sqrt_r_prime + tolerance;
    const bool second = mean_inv_sqrt_r_prime <= sqrt_mean_inv_r_prime + tolerance;
    const bool third = sqrt_mean_inv_r_prime <= moment_bound + tolerance;
    return first && second && third;
}

namespace {

// Law of Binomial(trials, p) + 1 on 0..size-1.
std::vector<double> shifted_binomial(unsigned trials, double p, std::size_t size) {
    std::vector<double> out(std::max<std::size_t>(size, trials + 2), 0.0);
    const double q = 1.0 - p;
    for (unsigned i = 0; i <= trials; ++i) {
        const double c = std::exp(std::lgamma(trials + 1.0) - std::lgamma(i + 1.0) - std::lgamma(trials - i + 1.0));
        out[i + 1] = c * std::pow(p, static_cast<double>(i)) * std::pow(q, static_cast<double>(trials - i));
    }
    return out;
}

double min_tail_margin(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t size = std::max(a.size(), b.size());
    double ta = 0.0;
    double tb = 0.0;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t t = size; t-- > 0;) {
        if (t < a.size()) ta += a[t];
        if (t < b.size()) tb += b[t];
        margin = std::min(margin, ta - tb);
    }
    return margin;
}

double moment(const std::vector<double>& law, double power) {
    CompensatedSum acc;
    for (std::size_t t = 1; t < law.size(); ++t) acc.add(law[t] * std::pow(static_cast<double>(t), power));
    return acc.value();
}

}  // namespace

SwitchingReport switching_stats(unsigned n, double lam, const std::vector<bool>& unit_mask,
                                kernels::Backend backend) {
    if (n == 0) throw Error(ErrorCode::OutOfRange, "need n >= 1");
    if (n > 13) throw Error(ErrorCode::BudgetExceeded, "exhaustive switching check is limited to n <= 13");
    if (!(lam >= 0.0 && lam <= 1.0)) throw Error(ErrorCode::OutOfRange, "lambda must lie in [0, 1]");
    if (unit_mask.size() != n) throw Error(ErrorCode::DimensionMismatch, "unit mask needs one entry per step");
    const auto units = static_cast<unsigned>(std::count(unit_mask.begin(), unit_mask.end(), true));
    if (2 * units < n) {
        throw Error(ErrorCode::HypothesisViolated,
                    std::to_string(units) + " of " + std::to_string(n) + " weights have |v_j| >= 1");
    }
    std::uint32_t mask = 0;
    for (unsigned j = 0; j < n; ++j) {
        if (unit_mask[j]) mask |= std::uint32_t{1} << j;
    }

    SwitchingReport out;
    out.n = n;
    out.lam = lam;
    const std::vector<std::uint64_t> counts = kernels::switching_counts(backend, n, mask);
    const unsigned length = n - 1;
    out.shifted_r.assign(n + 1, 0.0);
    for (unsigned m = 0; m <= length; ++m) {
        const double p = std::pow(lam, static_cast<double>(m)) * std::pow(1.0 - lam, static_cast<double>(length - m));
        for (unsigned r = 0; r < n; ++r) {
            const std::uint64_t c = counts[static_cast<std::size_t>(m) * n + r];
            if (c != 0) out.shifted_r[r + 1] += static_cast<double>(c) * p;
        }
    }

    const double p = (1.0 - lam) * (1.0 - lam);
    const unsigned quarter = n / 4 >= 1 ? n / 4 - 1 : 0;
    const unsigned half = n / 2 >= 1 ? n / 2 - 1 : 0;
    out.r_prime = shifted_binomial(quarter, p, n + 1);
    out.r_prime_half = shifted_binomial(half, p, n + 1);
    out.domination_margin = min_tail_margin(out.shifted_r, out.r_prime);
    out.domination_margin_half = min_tail_margin(out.shifted_r, out.r_prime_half);

    out.mean_inv_sqrt_r = moment(out.shifted_r, -0.5);
    out.mean_inv_sqrt_r_prime = moment(out.r_prime, -0.5);
    out.sqrt_mean_inv_r_prime = std::sqrt(moment(out.r_prime, -1.0));
    out.moment_bound = quarter == 0 || p == 0.0 ? std::numeric_limits<double>::infinity()
                                                : std::sqrt(1.0 / (static_cast<double>(quarter) * p));
    return out;
}

}  // namespace smallball
