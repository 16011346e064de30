#include "smallball/bounds.hpp"
#include "smallball/error.hpp"
#include "smallball/transfer.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace smallball;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::ConfigError;
}

// Mean of |cos|^k over a period, times the interval length 2.
double cos_power_integral(int k) {
    return 2.0 * std::exp(std::lgamma((k + 1) / 2.0) - std::lgamma(k / 2.0 + 1.0)) / std::sqrt(std::numbers::pi);
}

// Binomial probabilities by the multiplicative recurrence, no logarithms.
double negative_moment_direct(unsigned n, double p, unsigned d) {
    double term = std::pow(1.0 - p, n);
    double total = 0.0;
    for (unsigned i = 0; i <= n; ++i) {
        total += term / std::pow(i + 1.0, d);
        term *= (n - i) / (i + 1.0) * p / (1.0 - p);
    }
    return total;
}

}  // namespace

TEST_CASE("adaptive Simpson") {
    CHECK(std::abs(adaptive_simpson([](double x) { return std::sin(x); }, 0, std::numbers::pi).value - 2.0) < 1e-10);
    CHECK(std::abs(adaptive_simpson([](double x) { return x * x; }, 1, 0).value + 1.0 / 3.0) < 1e-12);
    QuadratureOptions kink;
    kink.breakpoints = {0.3};
    const auto r = adaptive_simpson([](double x) { return std::abs(x - 0.3); }, 0, 1, kink);
    CHECK(std::abs(r.value - (0.045 + 0.245)) < 1e-12);
    QuadratureOptions starved;
    starved.max_subdivisions = 3;
    starved.min_panels = 1;
    CHECK(code_of([&] { adaptive_simpson([](double x) { return std::sqrt(std::abs(x)); }, -1, 1, starved); }) ==
          ErrorCode::QuadratureNonConvergence);
}

TEST_CASE("cosine product integral") {
    CHECK(std::abs(cosine_product_integral({1}) - 4.0 / std::numbers::pi) < 1e-10);
    CHECK(cosine_product_integral({}) == 2.0);
    CHECK(code_of([] { cosine_product_integral({1, 0.5}); }) == ErrorCode::PreconditionViolated);
    double prev = 3.0;
    double limit = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double v = cosine_product_integral(std::vector<double>(static_cast<std::size_t>(k), 1.0));
        CHECK(std::abs(v - cos_power_integral(k)) < 1e-10);
        CHECK(v <= prev + 1e-12);
        prev = v;
        limit = std::max(limit, v * std::sqrt(k));
    }
    CHECK(limit < 2.0 * std::sqrt(2.0 / std::numbers::pi));
    // Mixed weights: compare with a dense midpoint rule.
    const std::vector<double> w{1, 2.5, 3};
    double mid = 0.0;
    const int m = 400000;
    for (int i = 0; i < m; ++i) {
        const double xi = -1.0 + (i + 0.5) * 2.0 / m;
        double prod = 1.0;
        for (double v : w) prod *= std::abs(std::cos(2 * std::numbers::pi * xi * v));
        mid += prod * 2.0 / m;
    }
    CHECK(std::abs(cosine_product_integral(w) - mid) < 1e-8);
}

TEST_CASE("Esseen bound") {
    CHECK(esseen_bound([](double) { return 1.0; }, 1, 1, 1, 0.7) == doctest::Approx(0.7 * 4));
    CHECK(code_of([] { esseen_bound([](double) { return 1.0; }, 2, 1, 1, 1); }) == ErrorCode::UnsupportedDimension);

    auto c = make_independent_chain(Vector::Constant(2, 0.5));
    auto s = SignSystem::alternating(4, c);
    auto w = WeightSystem::all_ones(4);
    const double integral = charfn_modulus_integral(c, step_values(s, w));
    CHECK(std::abs(integral - cos_power_integral(4)) < 1e-10);
    const double bound = esseen_bound(
        [&](double xi) { return char_fn(c, s, w, xi).modulus(); }, 1, 1, 1, 0.5);
    const auto d = exact_sum_distribution(c, s, w);
    CHECK(bound >= smallball_exact(d, 0, 1));
}

TEST_CASE("binomial negative moment") {
    auto a = binomial_negative_moment(1, 1.0, 1);
    CHECK(a.exact == doctest::Approx(0.5));
    CHECK(a.bound == doctest::Approx(1.0));
    auto b = binomial_negative_moment(2, 0.5, 1);
    CHECK(std::abs(b.exact - 7.0 / 12.0) < 1e-15);
    CHECK(b.bound == doctest::Approx(1.0));
    auto c = binomial_negative_moment(50, 0.36, 2);
    CHECK(std::abs(c.bound - 4.0 / (2500 * 0.36 * 0.36)) < 1e-15);
    CHECK(c.exact <= c.bound);
    CHECK(code_of([] { binomial_negative_moment(3, 0.0, 1); }) == ErrorCode::OutOfRange);
    for (unsigned n = 1; n <= 50; ++n) {
        for (unsigned d = 1; d <= 3; ++d) {
            for (int t = 1; t <= 9; ++t) {
                const double p = t / 10.0;
                CHECK(std::abs(binomial_negative_moment(n, p, d).exact - negative_moment_direct(n, p, d)) < 1e-13);
            }
        }
    }
}

TEST_CASE("theorem bound formulas") {
    const auto ones = ConstantSet::uniform(1.0);
    CHECK(theorem_bound(BoundKind::ScalarHalfUnit, {100, 1, 0.0, 1.0}, ones) == doctest::Approx(0.1));
    CHECK(theorem_bound(BoundKind::DistinctInt, {16, 1, 0.5, 1.0}, ones) == doctest::Approx(0.125));
    CHECK(theorem_bound(BoundKind::Prg, {16, 1, 0.0, 1.0}, ones) == doctest::Approx(0.25));
    CHECK(theorem_bound(BoundKind::HighDim, {4, 1, 0.0, 1.0}, ones) == doctest::Approx(0.5));
    CHECK(code_of([&] { theorem_bound(BoundKind::ScalarHalfUnit, {10, 1, 1.0, 1.0}, ones); }) ==
          ErrorCode::DegenerateGap);
    CHECK(code_of([&] { theorem_bound(BoundKind::HighDim, {10, 4, 0.2, 0.1}, ones); }) ==
          ErrorCode::HypothesisViolated);
    for (BoundKind k : {BoundKind::HighDim, BoundKind::ScalarHalfUnit, BoundKind::DistinctInt}) {
        double prev = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double b = theorem_bound(k, {9, 2, i / 20.0, 2.0}, ones);
            CHECK(b > prev);
            prev = b;
        }
    }
    CHECK(parse_bound_kind("distinct-int") == BoundKind::DistinctInt);
    CHECK(code_of([] { parse_bound_kind("nope"); }) == ErrorCode::ConfigError);
}

TEST_CASE("constant fitting") {
    CHECK(fit_constant({{0.375, 0.5}}).value == doctest::Approx(0.75));
    CHECK(fit_constant({{0.2, 0.4}, {0.1, 0.2}, {0.3, 0.6}}).value == doctest::Approx(0.5));
    CHECK(code_of([] { fit_constant({}); }) == ErrorCode::EmptyFamily);
    CHECK(round_up_significant(1.2345671, 6) == 1.23457);
    CHECK(round_up_significant(1.23456, 6) == 1.23456);
    CHECK(round_up_significant(0.000123456789, 3) == 0.000124);
    for (double x : {0.7978845608, 1.4826, 3.999999999, 1e-7 / 3}) CHECK(round_up_significant(x) >= x);
}

TEST_CASE("constant sets round-trip through JSON") {
    ConstantSet s({{"C_equal", 1.52, "fam", R"({"n":[8,16]})"}, {"C_diff", 3.25, "other", "{}"}});
    const auto back = ConstantSet::from_json(s.to_json());
    CHECK(back.value("C_equal") == 1.52);
    CHECK(back.get("C_equal").grid == R"({"n":[8,16]})");
    CHECK(back.to_json() == s.to_json());
    CHECK(code_of([&] { (void)back.value("C_prg"); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { ConstantSet::from_json(R"([{"name":"x"}])"); }) == ErrorCode::ParseError);
}

TEST_CASE("bound reports round-trip through CSV") {
    std::vector<BoundReport> rows{BoundReport::make("a1", {16, 1, 0.3, 1}, 0.1, 0.2),
                                  BoundReport::make("a2", {9, 2, 0.0, 2}, 0.3, 0.2)};
    CHECK(rows[0].pass);
    CHECK_FALSE(rows[1].pass);
    std::stringstream ss;
    write_reports_csv(ss, rows);
    const auto back = read_reports_csv(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[0].ratio == rows[0].ratio);
    CHECK(back[1].lambda == 0.0);
    CHECK_FALSE(all_pass(back));
    std::stringstream bad("instance_id,n,d,lambda,R,prob,bound,ratio,pass\nx,1,1,0,1,0.5,0.25,2,true\n");
    CHECK(code_of([&] { read_reports_csv(bad); }) == ErrorCode::ParseError);
}
