#include "smallball/error.hpp"
#include "smallball/transfer.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace smallball;

namespace {

MarkovChain uniform_iid(Eigen::Index n) { return make_independent_chain(Vector::Constant(n, 1.0 / static_cast<double>(n))); }

}  // namespace

TEST_CASE("char_fn at the origin and for a single fair sign") {
    auto c = make_two_state_chain(0.3);
    auto s = SignSystem::alternating(3, c);
    auto w = WeightSystem::scalars({1, 2, 5});
    const auto one = char_fn(c, s, w, 0.0);
    CHECK(one.re() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(one.im()) < 1e-15);

    auto iid = uniform_iid(2);
    auto v = char_fn(iid, SignSystem::alternating(1, iid), WeightSystem::scalars({1}), 0.25);
    CHECK(v.modulus() < 1e-15);
}

TEST_CASE("char_fn for two steps matches enumeration of four paths") {
    const double lam = 0.3;
    auto c = make_two_state_chain(lam);
    auto s = SignSystem::alternating(2, c);
    auto w = WeightSystem::all_ones(2);
    const double xi = 0.1;
    // Sums: +2 and -2 with prob (1-lam)/4 each, 0 with prob (1+lam)/2.
    const std::complex<double> expected =
        (1 - lam) / 4 * (std::polar(1.0, 4 * std::numbers::pi * xi) + std::polar(1.0, -4 * std::numbers::pi * xi)) +
        (1 + lam) / 2;
    CHECK(std::abs(char_fn(c, s, w, xi).value - expected) < 1e-12);
}

TEST_CASE("independent chain char_fn is a cosine product") {
    auto c = uniform_iid(2);
    auto s = SignSystem::alternating(5, c);
    auto w = WeightSystem::scalars({1, 3, 0.5, 2.25, 7});
    for (double xi : {0.01, 0.13, 0.377, 0.9}) {
        double prod = 1.0;
        for (std::size_t j = 0; j < w.size(); ++j) prod *= std::abs(std::cos(2 * std::numbers::pi * xi * w.scalar(j)));
        CHECK(std::abs(char_fn(c, s, w, xi).modulus() - prod) < 1e-12);
    }
}

TEST_CASE("char_fn shape errors") {
    auto c = make_two_state_chain(0.3);
    auto s = SignSystem::alternating(2, c);
    CHECK_THROWS_AS(char_fn(c, s, WeightSystem::all_ones(3), 0.1), Error);
    CHECK_THROWS_AS(char_fn(c, s, WeightSystem(2, {1, 0, 0, 1}), 0.1), Error);
}

TEST_CASE("exact distribution: binomial center") {
    auto c = uniform_iid(2);
    auto d = exact_sum_distribution(c, SignSystem::alternating(4, c), WeightSystem::all_ones(4));
    CHECK(std::abs(d.at(0) - 0.375) < 1e-15);
    CHECK(std::abs(d.at(2) - 0.25) < 1e-15);
    CHECK(d.at(1) == 0.0);
    CHECK(d.lowest() == -4);
    CHECK(d.highest() == 4);
    CHECK(d.span == 4);
    CHECK(std::abs(d.total() - 1.0) < 1e-12);
    CHECK(smallball_exact(d, 0, 1) == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(smallball_exact(d, 0, 4) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(smallball_exact(d, 100, 3) == 0.0);
    CHECK(smallball_exact(d, 0.5, 0.4) == 0.0);
    CHECK(smallball_exact(d, 1.0, 1.0) == doctest::Approx(0.625).epsilon(1e-14));

    auto d10 = exact_sum_distribution(c, SignSystem::alternating(10, c), WeightSystem::all_ones(10));
    CHECK(std::abs(d10.at(0) - 252.0 / 1024.0) <= 1e-12);
}

TEST_CASE("exact distribution: alternating and two-state chains") {
    auto alt = make_two_state_chain(1.0);
    auto d = exact_sum_distribution(alt, SignSystem::alternating(2, alt), WeightSystem::all_ones(2));
    CHECK(d.at(0) == doctest::Approx(1.0).epsilon(1e-15));

    auto c = make_two_state_chain(0.3);
    auto e = exact_sum_distribution(c, SignSystem::alternating(2, c), WeightSystem::all_ones(2));
    CHECK(std::abs(e.at(0) - 0.65) < 1e-15);
    CHECK(std::abs(e.at(2) - 0.175) < 1e-15);
    CHECK(std::abs(e.at(-2) - 0.175) < 1e-15);
}

TEST_CASE("exact distribution is symmetric under a global sign flip") {
    auto c = make_two_state_chain(0.45);
    auto w = WeightSystem::scalars({1, 4, 2, 2, 7, 3, 1});
    auto d = exact_sum_distribution(c, SignSystem::alternating(w.size(), c), w);
    for (std::int64_t s = d.lowest(); s <= d.highest(); ++s) CHECK(std::abs(d.at(s) - d.at(-s)) < 1e-12);
}

TEST_CASE("exact distribution: backends, rationals and budgets") {
    auto c = make_two_state_chain(0.6);
    auto w = WeightSystem::scalars({3, 1, 4, 1, 5, 9, 2, 6});
    auto s = SignSystem::alternating(w.size(), c);
    DistributionOptions serial;
    serial.backend = kernels::Backend::Serial;
    auto a = exact_sum_distribution(c, s, w, serial);
    auto b = exact_sum_distribution(c, s, w);
    CHECK(a.masses == b.masses);
    CHECK(a.offset == b.offset);

    auto r = exact_sum_distribution_rational(c, integer_step_values(s, w));
    auto rf = r.to_float();
    REQUIRE(rf.masses.size() == a.masses.size());
    for (std::size_t i = 0; i < a.masses.size(); ++i) CHECK(std::abs(rf.masses[i] - a.masses[i]) < 1e-15);
    Rational total = 0;
    for (const auto& m : r.masses) total += m;
    // Exact for the chain's binary entries, whose rows need not sum to exactly 1.
    CHECK(abs(total - 1) < Rational(1, 1'000'000'000'000'000LL));

    DistributionOptions tiny;
    tiny.cell_budget = 10;
    try {
        exact_sum_distribution(c, s, w, tiny);
        FAIL("expected BudgetExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BudgetExceeded);
    }
    try {
        exact_sum_distribution(c, SignSystem::alternating(1, c), WeightSystem::scalars({1.5}));
        FAIL("expected NonIntegerWeights");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonIntegerWeights);
    }
}

TEST_CASE("empty sum") {
    auto c = make_two_state_chain(0.2);
    auto d = exact_sum_distribution(c, IntStepValues(0, 2));
    CHECK(d.at(0) == 1.0);
    auto z = zp_fourier_average(c, IntStepValues(0, 2), 5);
    CHECK(z.average == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("max window probability") {
    auto c = uniform_iid(2);
    auto d = exact_sum_distribution(c, SignSystem::alternating(4, c), WeightSystem::all_ones(4));
    CHECK(max_window_probability(d, 0.0) == doctest::Approx(0.375));
    CHECK(max_window_probability(d, 0.99) == doctest::Approx(0.375));
    // Radius 1 about x0 = 1 covers the even points 0 and 2.
    CHECK(max_window_probability(d, 1.0) == doctest::Approx(0.625));
    CHECK(max_window_probability(d, 2.0) == doctest::Approx(0.875));
    CHECK(max_window_probability(d, 50.0) == doctest::Approx(1.0));
}

TEST_CASE("prime selection") {
    CHECK(find_prime(WeightSystem::arange(3)) == 7);
    CHECK(find_prime(WeightSystem::arange(1)) == 3);
    CHECK(find_prime(WeightSystem::arange(10)) == 23);
    CHECK(is_prime(2));
    CHECK(is_prime(97));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(91));
}

TEST_CASE("zp Fourier average") {
    auto c = uniform_iid(2);
    auto z = zp_fourier_average(c, SignSystem::alternating(1, c), WeightSystem::arange(1), 3);
    CHECK(std::abs(z.average - 2.0 / 3.0) < 1e-14);
    try {
        zp_fourier_average(c, SignSystem::alternating(1, c), WeightSystem::arange(1), 9);
        FAIL("expected NotPrime");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotPrime);
    }

    // Cosine-product form for the independent chain.
    auto w = WeightSystem::arange(9);
    const auto p = find_prime(w);
    auto zz = zp_fourier_average(c, SignSystem::alternating(9, c), w, p);
    double avg = 0.0;
    for (std::int64_t x = 0; x < p; ++x) {
        double prod = 1.0;
        for (int v = 1; v <= 9; ++v) prod *= std::abs(std::cos(2 * std::numbers::pi * x * v / static_cast<double>(p)));
        avg += prod;
    }
    CHECK(std::abs(zz.average - avg / static_cast<double>(p)) < 1e-12);

    // Residues dominate points.
    auto d = exact_sum_distribution(c, SignSystem::alternating(9, c), w);
    for (std::int64_t s = d.lowest(); s <= d.highest(); ++s) CHECK(d.at(s) <= zz.residue_probability(s) + 1e-12);
    double total = 0.0;
    for (double r : zz.residue_probabilities) total += r;
    CHECK(std::abs(total - 1.0) < 1e-12);
}
