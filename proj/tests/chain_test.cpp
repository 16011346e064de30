#include "smallball/chain.hpp"
#include "smallball/error.hpp"
#include "smallball/rng.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace smallball;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::ConfigError;
}

Vector random_distribution(CounterRng& rng, Eigen::Index n) {
    Vector mu(n);
    for (Eigen::Index i = 0; i < n; ++i) mu(i) = 0.05 + rng.uniform();
    return mu / mu.sum();
}

// Metropolis chain for a symmetric random proposal; reversible w.r.t. mu.
Matrix metropolis(CounterRng& rng, const Vector& mu) {
    const Eigen::Index n = mu.size();
    Matrix q = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) q(i, j) = q(j, i) = rng.uniform() / static_cast<double>(n);
    }
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double off = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            a(i, j) = q(i, j) * std::min(1.0, mu(j) / mu(i));
            off += a(i, j);
        }
        a(i, i) = 1.0 - off;
    }
    return a;
}

}  // namespace

TEST_CASE("validate_chain computes the stationary distribution") {
    auto c = validate_chain(mat2(.5, .5, .5, .5));
    CHECK(c.stationary()(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(c.stationary()(1) == doctest::Approx(0.5).epsilon(1e-14));

    auto swap = validate_chain(mat2(0, 1, 1, 0));
    CHECK(swap.stationary()(0) == doctest::Approx(0.5));
    CHECK(spectral_lambda(swap) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("validate_chain rejects non-reversible data") {
    CHECK(code_of([] { validate_chain(mat2(.9, .1, .5, .5), Vector::Constant(2, 0.5)); }) ==
          ErrorCode::NotReversible);
}

TEST_CASE("validate_chain rejects malformed matrices") {
    CHECK(code_of([] { validate_chain(mat2(.6, .5, .5, .5)); }) == ErrorCode::NotStochastic);
    CHECK(code_of([] { validate_chain(mat2(1.5, -.5, .5, .5)); }) == ErrorCode::NotStochastic);
    CHECK(code_of([] { validate_chain(Matrix::Identity(2, 2)); }) == ErrorCode::NoUniqueStationary);
    Matrix rect(2, 3);
    rect.setConstant(1.0 / 3.0);
    CHECK(code_of([&] { validate_chain(rect); }) == ErrorCode::NotStochastic);
}

TEST_CASE("error messages name the worst entry") {
    try {
        validate_chain(mat2(.9, .1, .5, .5), Vector::Constant(2, 0.5));
        FAIL("expected NotReversible");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("(0,1)") != std::string::npos);
    }
}

TEST_CASE("two-state chain") {
    auto c0 = make_two_state_chain(0.0);
    CHECK(c0.transition(0, 0) == 0.5);
    auto c1 = make_two_state_chain(1.0);
    CHECK(c1.transition(0, 1) == 1.0);
    auto c3 = make_two_state_chain(0.3);
    CHECK(c3.transition(0, 0) == doctest::Approx(0.35).epsilon(1e-15));
    CHECK(c3.transition(0, 1) == doctest::Approx(0.65).epsilon(1e-15));
    for (int i = 0; i < 50; ++i) {
        const double x = i / 49.0;
        CHECK(std::abs(spectral_lambda(make_two_state_chain(x)) - x) <= 1e-12);
    }
    CHECK(code_of([] { make_two_state_chain(1.5); }) == ErrorCode::OutOfRange);
    CHECK(code_of([] { make_two_state_chain(-0.1); }) == ErrorCode::OutOfRange);
}

TEST_CASE("independent chain has lambda zero") {
    Vector mu(3);
    mu << .2, .3, .5;
    auto c = make_independent_chain(mu);
    CHECK(c.transition(2, 1) == doctest::Approx(0.3));
    CHECK(spectral_lambda(c) <= 1e-12);

    Vector degenerate(2);
    degenerate << 1, 0;
    auto d = make_independent_chain(degenerate);
    CHECK(d.transition(1, 0) == 1.0);
    CHECK(code_of([&] { spectral_lambda(d); }) == ErrorCode::ZeroStationaryMass);

    CounterRng rng(7, StreamId::Instances, 0);
    for (int t = 0; t < 100; ++t) {
        const Vector m = random_distribution(rng, 2 + static_cast<Eigen::Index>(rng.below(6)));
        CHECK(spectral_lambda(make_independent_chain(m)) <= 1e-12);
    }
    Vector bad(2);
    bad << 0.7, 0.7;
    CHECK(code_of([&] { make_independent_chain(bad); }) == ErrorCode::InvalidDistribution);
}

TEST_CASE("lambda equals the L2(mu) operator norm of A - E_mu") {
    CounterRng rng(11, StreamId::Instances, 0);
    for (int t = 0; t < 200; ++t) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(5));
        const Vector mu = random_distribution(rng, n);
        auto c = validate_chain(metropolis(rng, mu), mu);
        const double lam = spectral_lambda(c);
        CHECK(lam >= 0.0);
        CHECK(lam <= 1.0);
        // Independent route: largest singular value of the weighted operator.
        const Matrix m = similarity_transform(c.transition() - c.averaging(), mu);
        Eigen::JacobiSVD<Matrix> svd(m);
        CHECK(std::abs(svd.singularValues()(0) - lam) <= 1e-10);
    }
}

TEST_CASE("reversibility check agrees with symmetry of the similarity transform") {
    CounterRng rng(13, StreamId::Instances, 0);
    int agree = 0;
    for (int t = 0; t < 1000; ++t) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(4));
        const Vector mu = random_distribution(rng, n);
        Matrix a = metropolis(rng, mu);
        if (t % 2 == 1) {
            // Perturb a row so balance usually breaks while rows stay stochastic.
            const double eps = 0.2 * rng.uniform() * a(0, 1);
            a(0, 1) -= eps;
            a(0, 0) += eps;
        }
        const Matrix s = similarity_transform(a, mu);
        const bool symmetric = (s - s.transpose()).cwiseAbs().maxCoeff() <= 1e-9;
        const bool balanced = detailed_balance_defect(a, mu).value <= 1e-9;
        agree += symmetric == balanced ? 1 : 0;
    }
    CHECK(agree == 1000);
}

TEST_CASE("sign systems") {
    auto c = make_two_state_chain(0.3);
    auto s = SignSystem::alternating(3, c);
    CHECK(s.sign(0, 0) == 1);
    CHECK(s.sign(2, 1) == -1);
    CHECK(s.balanced());
    CHECK(code_of([&] { SignSystem({{1, 0}}, c); }) == ErrorCode::InvalidSigns);
    CHECK(code_of([&] { SignSystem({{1, 1}}, c, true); }) == ErrorCode::InvalidSigns);
    SignSystem unbalanced({{1, 1}}, c);
    CHECK(unbalanced.max_imbalance() == doctest::Approx(1.0));
}

TEST_CASE("weight variants") {
    CHECK(WeightSystem::arange(4).integers() == std::vector<std::int64_t>{1, 2, 3, 4});
    CHECK(code_of([] { WeightSystem::scalars({0.5, 2}, WeightVariant::AtLeastUnit); }) == ErrorCode::InvalidWeights);
    CHECK_NOTHROW(WeightSystem::scalars({0.5, 2}, WeightVariant::HalfAtLeastUnit));
    CHECK(code_of([] { WeightSystem::scalars({0.5, 0.2, 2}, WeightVariant::HalfAtLeastUnit); }) ==
          ErrorCode::InvalidWeights);
    CHECK(code_of([] { WeightSystem::scalars({1, 1}, WeightVariant::DistinctPositiveIntegers); }) ==
          ErrorCode::InvalidWeights);
    CHECK(code_of([] { (void)WeightSystem::scalars({1.5}).integers(); }) == ErrorCode::NonIntegerWeights);
    WeightSystem w(2, {0.6, 0.8, 3, 4}, WeightVariant::AtLeastUnit);
    CHECK(w.size() == 2);
    CHECK(w.norm(1) == doctest::Approx(5.0));
    CHECK(w.unit_mask() == std::vector<bool>{true, true});
}
