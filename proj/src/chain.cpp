#include "smallball/chain.hpp"

#include "smallball/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace smallball {

namespace {

std::string entry(Eigen::Index i, Eigen::Index j) {
    std::ostringstream os;
    os << "(" << i << "," << j << ")";
    return os.str();
}

void check_stochastic(const Matrix& a) {
    if (a.rows() == 0 || a.rows() != a.cols()) {
        throw Error(ErrorCode::NotStochastic, "transition matrix must be square and non-empty, got " +
                                                  std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (!std::isfinite(a(i, j)) || a(i, j) < 0.0) {
                std::ostringstream os;
                os << "entry " << entry(i, j) << " = " << a(i, j) << " is negative or not finite";
                throw Error(ErrorCode::NotStochastic, os.str());
            }
        }
    }
    double worst = 0.0;
    Eigen::Index worst_row = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        double defect = std::abs(a.row(i).sum() - 1.0);
        if (defect > worst) {
            worst = defect;
            worst_row = i;
        }
    }
    if (worst > tol::structural) {
        std::ostringstream os;
        os << "row " << worst_row << " sums to " << a.row(worst_row).sum() << " (tolerance " << tol::structural << ")";
        throw Error(ErrorCode::NotStochastic, os.str());
    }
}

void check_distribution(const Vector& mu, Eigen::Index n) {
    if (mu.size() != n) {
        throw Error(ErrorCode::DimensionMismatch,
                    "stationary vector has length " + std::to_string(mu.size()) + ", expected " + std::to_string(n));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(mu(i)) || mu(i) < 0.0) {
            throw Error(ErrorCode::InvalidDistribution,
                        "stationary entry " + std::to_string(i) + " is negative or not finite");
        }
    }
    if (std::abs(mu.sum() - 1.0) > tol::derived) {
        std::ostringstream os;
        os << "stationary vector sums to " << mu.sum() << " (tolerance " << tol::derived << ")";
        throw Error(ErrorCode::InvalidDistribution, os.str());
    }
}

}  // namespace

Matrix MarkovChain::averaging() const {
    return Vector::Ones(stationary_.size()) * stationary_.transpose();
}

bool MarkovChain::full_support() const noexcept {
    return (stationary_.array() > 0.0).all();
}

Vector stationary_distribution(const Matrix& transition) {
    const Eigen::Index n = transition.rows();
    Matrix system = transition.transpose() - Matrix::Identity(n, n);
    Eigen::FullPivLU<Matrix> lu(system);
    lu.setThreshold(1e-10);
    const Eigen::Index dim = n - lu.rank();
    if (dim != 1) {
        throw Error(ErrorCode::NoUniqueStationary,
                    "left fixed space of the transition matrix has dimension " + std::to_string(dim));
    }
    Vector mu = lu.kernel().col(0);
    if (mu.sum() < 0.0) mu = -mu;
    // Perron vector of the unique recurrent class: entries share a sign up to rounding.
    if (mu.minCoeff() < -1e-9 * mu.cwiseAbs().maxCoeff()) {
        throw Error(ErrorCode::NoUniqueStationary, "fixed vector is not sign-definite");
    }
    mu = mu.cwiseMax(0.0);
    mu /= mu.sum();
    return mu;
}

BalanceDefect detailed_balance_defect(const Matrix& transition, const Vector& stationary) {
    BalanceDefect worst;
    for (Eigen::Index i = 0; i < transition.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < transition.cols(); ++j) {
            double d = std::abs(stationary(i) * transition(i, j) - stationary(j) * transition(j, i));
            if (d > worst.value) worst = {d, i, j};
        }
    }
    return worst;
}

MarkovChain validate_chain(const Matrix& transition, const std::optional<Vector>& stationary) {
    check_stochastic(transition);
    const Eigen::Index n = transition.rows();
    Vector mu;
    if (stationary) {
        check_distribution(*stationary, n);
        mu = *stationary;
    } else {
        mu = stationary_distribution(transition);
    }

    BalanceDefect defect = detailed_balance_defect(transition, mu);
    if (defect.value > tol::structural) {
        std::ostringstream os;
        os << "detailed balance fails at " << entry(defect.row, defect.col) << ": mu_i A_ij = "
           << mu(defect.row) * transition(defect.row, defect.col)
           << " vs mu_j A_ji = " << mu(defect.col) * transition(defect.col, defect.row);
        throw Error(ErrorCode::NotReversible, os.str());
    }

    Vector drift = (mu.transpose() * transition).transpose() - mu;
    Eigen::Index worst = 0;
    double drift_max = drift.cwiseAbs().maxCoeff(&worst);
    if (drift_max > tol::structural) {
        std::ostringstream os;
        os << "mu^T A differs from mu^T by " << drift_max << " at state " << worst;
        throw Error(ErrorCode::NotStationary, os.str());
    }
    return MarkovChain(transition, mu);
}

Matrix similarity_transform(const Matrix& m, const Vector& mu) {
    Vector root = mu.cwiseSqrt();
    return root.asDiagonal() * m * root.cwiseInverse().asDiagonal();
}

double spectral_lambda(const MarkovChain& chain) {
    const Vector& mu = chain.stationary();
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        if (mu(i) <= 0.0) {
            throw Error(ErrorCode::ZeroStationaryMass,
                        "state " + std::to_string(i) + " has zero stationary mass; restrict to the support first");
        }
    }
    Vector root = mu.cwiseSqrt();
    Matrix s = similarity_transform(chain.transition(), mu) - root * root.transpose();
    Matrix sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
    double lam = solver.eigenvalues().cwiseAbs().maxCoeff();
    return std::min(lam, 1.0);
}

MarkovChain make_two_state_chain(double lam) {
    if (!(lam >= 0.0 && lam <= 1.0)) {
        throw Error(ErrorCode::OutOfRange, "two-state parameter must lie in [0,1], got " + std::to_string(lam));
    }
    const double stay = (1.0 - lam) / 2.0;
    const double move = (1.0 + lam) / 2.0;
    Matrix a(2, 2);
    a << stay, move, move, stay;
    return validate_chain(a, Vector::Constant(2, 0.5));
}

MarkovChain make_independent_chain(const Vector& mu) {
    if (mu.size() == 0) throw Error(ErrorCode::InvalidDistribution, "empty distribution");
    check_distribution(mu, mu.size());
    Matrix a = Vector::Ones(mu.size()) * mu.transpose();
    return validate_chain(a, mu);
}

// ---------------------------------------------------------------------------

SignSystem::SignSystem(const std::vector<std::vector<int>>& rows, const MarkovChain& chain, bool require_balanced)
    : n_steps_(rows.size()), n_states_(chain.n_states()) {
    signs_.reserve(n_steps_ * n_states_);
    balances_.reserve(n_steps_);
    const Vector& mu = chain.stationary();
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[j].size() != n_states_) {
            throw Error(ErrorCode::DimensionMismatch, "sign row " + std::to_string(j) + " has " +
                                                          std::to_string(rows[j].size()) + " entries, expected " +
                                                          std::to_string(n_states_));
        }
        double b = 0.0;
        for (std::size_t y = 0; y < n_states_; ++y) {
            int s = rows[j][y];
            if (s != 1 && s != -1) {
                throw Error(ErrorCode::InvalidSigns, "sign (" + std::to_string(j) + "," + std::to_string(y) +
                                                         ") = " + std::to_string(s) + " is not +1 or -1");
            }
            signs_.push_back(static_cast<int8_t>(s));
            b += mu(static_cast<Eigen::Index>(y)) * s;
        }
        balances_.push_back(b);
    }
    if (require_balanced && !balanced()) {
        throw Error(ErrorCode::InvalidSigns,
                    "sign functions are not balanced: max |E_mu[f_j]| = " + std::to_string(max_imbalance()));
    }
}

SignSystem SignSystem::repeated(std::span<const int> labeling, std::size_t n_steps, const MarkovChain& chain,
                                bool require_balanced) {
    std::vector<std::vector<int>> rows(n_steps, std::vector<int>(labeling.begin(), labeling.end()));
    return SignSystem(rows, chain, require_balanced);
}

SignSystem SignSystem::alternating(std::size_t n_steps, const MarkovChain& chain) {
    std::vector<int> labeling(chain.n_states());
    for (std::size_t y = 0; y < labeling.size(); ++y) labeling[y] = (y % 2 == 0) ? 1 : -1;
    return repeated(labeling, n_steps, chain);
}

double SignSystem::max_imbalance() const noexcept {
    double worst = 0.0;
    for (double b : balances_) worst = std::max(worst, std::abs(b));
    return worst;
}

// ---------------------------------------------------------------------------

namespace {

bool is_integer(double x) {
    return std::isfinite(x) && std::floor(x) == x && std::abs(x) < 9007199254740992.0;
}

}  // namespace

WeightSystem::WeightSystem(std::size_t dimension, std::vector<double> flat, WeightVariant variant)
    : dimension_(dimension), flat_(std::move(flat)), variant_(variant) {
    if (dimension_ == 0) throw Error(ErrorCode::UnsupportedDimension, "weight dimension must be at least 1");
    if (flat_.size() % dimension_ != 0) {
        throw Error(ErrorCode::DimensionMismatch, "weight data length " + std::to_string(flat_.size()) +
                                                      " is not a multiple of dimension " + std::to_string(dimension_));
    }
    for (std::size_t i = 0; i < flat_.size(); ++i) {
        if (!std::isfinite(flat_[i])) {
            throw Error(ErrorCode::InvalidWeights, "weight entry " + std::to_string(i) + " is not finite");
        }
    }
    const std::size_t n = size();
    switch (variant_) {
        case WeightVariant::General: break;
        case WeightVariant::AtLeastUnit:
            for (std::size_t i = 0; i < n; ++i) {
                if (norm(i) < 1.0 - tol::derived) {
                    throw Error(ErrorCode::InvalidWeights,
                                "weight " + std::to_string(i) + " has norm " + std::to_string(norm(i)) + " < 1");
                }
            }
            break;
        case WeightVariant::HalfAtLeastUnit: {
            std::size_t units = 0;
            for (std::size_t i = 0; i < n; ++i) units += norm(i) >= 1.0 - tol::derived ? 1 : 0;
            if (2 * units < n) {
                throw Error(ErrorCode::InvalidWeights, "only " + std::to_string(units) + " of " + std::to_string(n) +
                                                           " weights have norm at least 1");
            }
            break;
        }
        case WeightVariant::DistinctPositiveIntegers: {
            if (dimension_ != 1) {
                throw Error(ErrorCode::InvalidWeights, "distinct-integer weights must be scalars");
            }
            std::set<double> seen;
            for (std::size_t i = 0; i < n; ++i) {
                double v = flat_[i];
                if (!is_integer(v) || v < 1.0) {
                    throw Error(ErrorCode::InvalidWeights,
                                "weight " + std::to_string(i) + " = " + std::to_string(v) + " is not a positive integer");
                }
                if (!seen.insert(v).second) {
                    throw Error(ErrorCode::InvalidWeights, "weight " + std::to_string(i) + " = " +
                                                               std::to_string(v) + " repeats an earlier weight");
                }
            }
            break;
        }
    }
}

WeightSystem WeightSystem::scalars(std::vector<double> values, WeightVariant variant) {
    return WeightSystem(1, std::move(values), variant);
}

WeightSystem WeightSystem::all_ones(std::size_t n) {
    return WeightSystem(1, std::vector<double>(n, 1.0), WeightVariant::AtLeastUnit);
}

WeightSystem WeightSystem::arange(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i + 1);
    return WeightSystem(1, std::move(v), WeightVariant::DistinctPositiveIntegers);
}

double WeightSystem::norm(std::size_t i) const noexcept {
    double s = 0.0;
    for (double x : vector(i)) s += x * x;
    return std::sqrt(s);
}

double WeightSystem::scalar(std::size_t i) const {
    if (dimension_ != 1) throw Error(ErrorCode::UnsupportedDimension, "scalar weight requested from d > 1 system");
    return flat_[i];
}

bool WeightSystem::integral() const noexcept {
    return std::all_of(flat_.begin(), flat_.end(), is_integer);
}

std::vector<std::int64_t> WeightSystem::integers() const {
    if (dimension_ != 1) throw Error(ErrorCode::UnsupportedDimension, "integer weights must be scalars");
    std::vector<std::int64_t> out(flat_.size());
    for (std::size_t i = 0; i < flat_.size(); ++i) {
        if (!is_integer(flat_[i])) {
            throw Error(ErrorCode::NonIntegerWeights,
                        "weight " + std::to_string(i) + " = " + std::to_string(flat_[i]) + " is not an integer");
        }
        out[i] = static_cast<std::int64_t>(flat_[i]);
    }
    return out;
}

std::vector<bool> WeightSystem::unit_mask() const {
    std::vector<bool> mask(size());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = norm(i) >= 1.0 - tol::derived;
    return mask;
}

}  // namespace smallball
