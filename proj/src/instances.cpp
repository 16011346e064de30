#include "smallball/instances.hpp"

#include "smallball/error.hpp"

#include <cmath>
#include <numbers>

namespace smallball {

namespace {

double uniform_in(CounterRng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

std::size_t size_in(CounterRng& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

// Metropolis chain with a random symmetric proposal targeting mu.
Matrix metropolis(const Vector& mu, CounterRng& rng) {
    const auto n = mu.size();
    Matrix w = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) w(i, j) = w(j, i) = uniform_in(rng, 0.05, 1.0);
    }
    const double scale = std::max(1.0, w.rowwise().sum().maxCoeff());
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double off = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            a(i, j) = w(i, j) / scale * std::min(1.0, mu(j) / mu(i));
            off += a(i, j);
        }
        a(i, i) = std::max(0.0, 1.0 - off);
    }
    return a;
}

Matrix averaging(const Vector& mu) { return Vector::Ones(mu.size()) * mu.transpose(); }

CVector random_phases(CounterRng& rng, Eigen::Index n, bool unimodular) {
    CVector u(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = unimodular ? 1.0 : rng.uniform();
        u(i) = std::polar(r, 2.0 * std::numbers::pi * rng.uniform());
    }
    return u;
}

}  // namespace

MarkovChain random_reversible_chain(std::size_t n_states, CounterRng& rng) {
    if (n_states == 0) throw Error(ErrorCode::OutOfRange, "need at least one state");
    const auto n = static_cast<Eigen::Index>(n_states);
    Vector mu(n);
    for (Eigen::Index i = 0; i < n; ++i) mu(i) = uniform_in(rng, 0.1, 1.0);
    mu /= mu.sum();
    Matrix a = metropolis(mu, rng);
    const double mix = rng.uniform();
    const double amount = rng.uniform();
    if (mix < 1.0 / 3.0) {
        a = (1.0 - amount) * a + amount * Matrix::Identity(n, n);
    } else if (mix < 2.0 / 3.0) {
        a = (1.0 - amount) * a + amount * averaging(mu);
    }
    return validate_chain(a, mu);
}

BalancedChain balanced_chain_with_lambda(std::size_t n_states, double lambda, std::uint64_t seed,
                                         std::uint64_t index) {
    if (n_states < 2 || n_states > 4) throw Error(ErrorCode::OutOfRange, "balanced chains use 2 to 4 states");
    if (!(lambda >= 0.0 && lambda <= 0.9)) throw Error(ErrorCode::OutOfRange, "target lambda must lie in [0, 0.9]");
    CounterRng rng(seed, StreamId::Instances, index);
    Vector mu(static_cast<Eigen::Index>(n_states));
    std::vector<int> f;
    if (n_states == 2) {
        mu << 0.5, 0.5;
        f = {1, -1};
    } else if (n_states == 3) {
        const double a = uniform_in(rng, 0.1, 0.4);
        mu << 0.5, a, 0.5 - a;
        f = {1, -1, -1};
    } else {
        const double a = uniform_in(rng, 0.1, 0.4);
        const double b = uniform_in(rng, 0.1, 0.4);
        mu << a, 0.5 - a, b, 0.5 - b;
        f = {1, 1, -1, -1};
    }
    const auto n = mu.size();
    // Sticky part has spectral parameter in [0.9, 1); shrinking its deviation
    // from the averaging operator scales the parameter linearly.
    const Matrix sticky = 0.95 * Matrix::Identity(n, n) + 0.05 * metropolis(mu, rng);
    const double base = spectral_lambda(validate_chain(sticky, mu));
    const double t = lambda / base;
    const Matrix e = averaging(mu);
    return {validate_chain((1.0 - t) * e + t * sticky, mu), f};
}

IntegerInstance random_integer_instance(std::uint64_t seed, std::uint64_t index, std::size_t max_states,
                                        std::size_t max_steps, int max_weight) {
    if (max_states == 0 || max_steps == 0 || max_weight < 1) {
        throw Error(ErrorCode::OutOfRange, "integer instance limits must be positive");
    }
    CounterRng rng(seed, StreamId::Instances, index);
    const std::size_t n_states = size_in(rng, 1, max_states);
    const std::size_t n_steps = size_in(rng, 1, max_steps);
    MarkovChain chain = random_reversible_chain(n_states, rng);
    std::vector<std::vector<int>> rows(n_steps, std::vector<int>(n_states));
    for (auto& row : rows) {
        for (auto& x : row) x = rng.below(2) == 0 ? 1 : -1;
    }
    std::vector<double> w(n_steps);
    for (auto& x : w) x = static_cast<double>(1 + rng.below(static_cast<std::uint64_t>(max_weight)));
    SignSystem signs(rows, chain);
    std::string id = "int-s" + std::to_string(seed) + "-i" + std::to_string(index) + "-N" + std::to_string(n_states) +
                     "-n" + std::to_string(n_steps);
    return {std::move(id), std::move(chain), std::move(signs), WeightSystem::scalars(std::move(w))};
}

HolderInstance random_holder_instance(std::uint64_t seed, std::uint64_t index, std::size_t max_states,
                                      std::size_t max_k) {
    if (max_states < 2 || max_k < 1) throw Error(ErrorCode::OutOfRange, "need max_states >= 2 and max_k >= 1");
    CounterRng rng(seed, StreamId::Instances, index);
    const std::size_t n = size_in(rng, 2, max_states);
    const std::size_t k = size_in(rng, 1, max_k);
    const MarkovChain chain = random_reversible_chain(n, rng);
    HolderInstance inst;
    inst.mu = chain.stationary();
    inst.lam = spectral_lambda(chain);
    const Matrix t = chain.transition() - (1.0 - inst.lam) * chain.averaging();
    inst.t.assign(k, t);
    for (std::size_t j = 0; j <= k; ++j) inst.u.push_back(random_phases(rng, static_cast<Eigen::Index>(n), true));
    return inst;
}

AveragingInstance random_averaging_instance(std::uint64_t seed, std::uint64_t index, std::size_t max_states,
                                            std::size_t max_k) {
    if (max_states < 2 || max_k < 1) throw Error(ErrorCode::OutOfRange, "need max_states >= 2 and max_k >= 1");
    CounterRng rng(seed, StreamId::Instances, index);
    const auto n = static_cast<Eigen::Index>(size_in(rng, 2, max_states));
    const std::size_t k = size_in(rng, 1, max_k);
    AveragingInstance out;
    out.mu.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) out.mu(i) = uniform_in(rng, 0.05, 1.0);
    out.mu /= out.mu.sum();
    out.u = random_phases(rng, n, false);
    auto random_matrix = [&] {
        Matrix m(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) m(i, j) = uniform_in(rng, -1.0, 1.0);
        }
        return m;
    };
    for (std::size_t i = 0; i < k; ++i) out.r.push_back(random_matrix());
    out.product.mu = out.mu;
    out.product.lam = 0.0;
    for (std::size_t j = 0; j < k; ++j) out.product.t.push_back(random_matrix());
    for (std::size_t j = 0; j <= k; ++j) out.product.u.push_back(random_phases(rng, n, false));
    return out;
}

WeightSystem random_unit_weights(std::size_t n, std::size_t d, std::uint64_t seed) {
    if (d == 0) throw Error(ErrorCode::UnsupportedDimension, "dimension must be positive");
    std::vector<double> flat(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        CounterRng rng(seed, StreamId::Instances, i);
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                flat[i * d + c] = rng.normal();
                norm2 += flat[i * d + c] * flat[i * d + c];
            }
        } while (norm2 == 0.0);
        const double norm = std::sqrt(norm2);
        for (std::size_t c = 0; c < d; ++c) flat[i * d + c] /= norm;
    }
    return WeightSystem(d, std::move(flat), WeightVariant::General);
}

}  // namespace smallball
