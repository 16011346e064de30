#include "smallball/error.hpp"
#include "smallball/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace smallball;

namespace {

// Reversible chain from a random symmetric positive weight matrix.
MarkovChain random_reversible(std::mt19937_64& rng, Eigen::Index n) {
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    Matrix w(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) w(i, j) = w(j, i) = unif(rng);
    }
    const Vector rows = w.rowwise().sum();
    Matrix a = rows.cwiseInverse().asDiagonal() * w;
    return validate_chain(a, rows / rows.sum());
}

CVector random_unimodular(std::mt19937_64& rng, Eigen::Index n) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    CVector u(n);
    for (Eigen::Index i = 0; i < n; ++i) u(i) = std::polar(1.0, angle(rng));
    return u;
}

HolderInstance random_holder(std::mt19937_64& rng, Eigen::Index n, std::size_t k) {
    HolderInstance inst;
    const auto chain = random_reversible(rng, n);
    inst.mu = chain.stationary();
    inst.lam = spectral_lambda(chain);
    const Matrix t = chain.transition() - (1.0 - inst.lam) * chain.averaging();
    inst.t.assign(k, t);
    for (std::size_t j = 0; j <= k; ++j) inst.u.push_back(random_unimodular(rng, n));
    return inst;
}

}  // namespace

TEST_CASE("mu-weighted norms") {
    Vector mu(3);
    mu << 0.5, 0.25, 0.25;
    MuNormContext ctx(mu);
    CVector v(3);
    v << 2.0, std::complex<double>(0.0, -4.0), 0.0;
    CHECK(ctx.l1(v) == doctest::Approx(2.0));
    CHECK(ctx.l2(v) == doctest::Approx(std::sqrt(6.0)));
    CHECK(ctx.linf(v) == doctest::Approx(4.0));
    CHECK(std::abs(ctx.mean(v) - std::complex<double>(1.0, -1.0)) < 1e-15);
    CHECK(ctx.op_norm(Matrix::Identity(3, 3)) == doctest::Approx(1.0));
    CHECK(ctx.op_norm(Vector::Ones(3) * mu.transpose()) == doctest::Approx(1.0));

    Vector partial(2);
    partial << 1.0, 0.0;
    MuNormContext p(partial);
    CVector big(2);
    big << 1.0, 100.0;
    CHECK(p.linf(big) == 1.0);
    CHECK_THROWS_AS((void)p.op_norm(Matrix::Identity(2, 2)), Error);
    CHECK_THROWS_AS(MuNormContext(Vector::Constant(2, 0.7)), Error);
}

TEST_CASE("op norm of A - E equals the spectral parameter") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto c = random_reversible(rng, 2 + trial % 5);
        MuNormContext ctx(c.stationary());
        CHECK(std::abs(ctx.op_norm(c.transition() - c.averaging()) - spectral_lambda(c)) < 1e-10);
    }
    MuNormContext half(Vector::Constant(2, 0.5));
    CHECK(half.op_norm(make_two_state_chain(0.3).transition() - Matrix::Constant(2, 2, 0.5)) ==
          doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("path enumeration agrees with the transfer-operator route") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> w(-3, 3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = random_reversible(rng, 3);
        IntMatrix values(6, 3);
        for (Eigen::Index j = 0; j < 6; ++j) {
            for (Eigen::Index y = 0; y < 3; ++y) values(j, y) = w(rng);
        }
        const Matrix real = values.cast<double>();
        for (double xi : {0.0, 0.07, 0.31, 0.5}) {
            CHECK(std::abs(brute_force_char_fn(c, real, xi).value - char_fn(c, real, xi).value) < 1e-12);
        }
        const auto brute = brute_force_distribution(c, values);
        const auto dp = exact_sum_distribution(c, values);
        for (std::int64_t s = -20; s <= 20; ++s) CHECK(std::abs(brute.at(s) - dp.at(s)) < 1e-12);
        CHECK(brute.total() == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("path enumeration with signs and weights, and the budget") {
    auto c = make_two_state_chain(0.3);
    auto s = SignSystem::alternating(2, c);
    auto w = WeightSystem::all_ones(2);
    const auto d = brute_force_distribution(c, integer_step_values(s, w));
    CHECK(d.at(0) == doctest::Approx(0.65));
    CHECK(d.at(2) == doctest::Approx(0.175));
    CHECK(d.at(-2) == doctest::Approx(0.175));
    CHECK(std::abs(brute_force_char_fn(c, s, w, 0.1).value - char_fn(c, s, w, 0.1).value) < 1e-14);

    auto big = make_independent_chain(Vector::Constant(10, 0.1));
    CHECK_THROWS_AS(brute_force_distribution(big, IntMatrix::Zero(8, 10)), Error);
    CHECK_NOTHROW(brute_force_distribution(big, IntMatrix::Zero(7, 10)));
    CHECK(brute_force_char_fn(c, Matrix(0, 2), 0.3).value == std::complex<double>(1.0, 0.0));
}

TEST_CASE("t(s) from the padded string matches the case description") {
    for (unsigned k = 0; k <= 12; ++k) {
        for (std::uint32_t s = 0; s < (1U << k); ++s) CHECK(switching_t_set(s, k) == switching_t_set_by_cases(s, k));
    }
    CHECK(switching_t_set(0b00, 2) == 0b111);
    CHECK(switching_t_set(0b01, 2) == 0b100);  // s_1 = 1
    CHECK(switching_t_set(0b10, 2) == 0b001);  // s_2 = 1
    CHECK(switching_t_set(0b11, 2) == 0);
    CHECK(switching_t_set(0, 0) == 1);
}

TEST_CASE("product splitting: the L1 form fails, the mean form holds") {
    HolderInstance inst;
    inst.mu = Vector::Constant(2, 0.5);
    inst.lam = 0.0;
    inst.t = {Matrix::Zero(2, 2)};
    CVector u1(2);
    u1 << 1.0, -1.0;
    inst.u = {u1, CVector::Ones(2)};
    const auto sides = holder_lhs_rhs(inst);
    CHECK(sides.lhs == doctest::Approx(1.0));
    CHECK(sides.rhs == doctest::Approx(0.0));
    CHECK(sides.lhs_mean == doctest::Approx(0.0));
    CHECK(sides.lhs > sides.rhs);

    HolderInstance stuck;
    stuck.mu = Vector::Constant(3, 1.0 / 3.0);
    stuck.lam = 1.0;
    stuck.t.assign(4, Matrix::Zero(3, 3));
    std::mt19937_64 rng(2);
    for (int j = 0; j < 5; ++j) stuck.u.push_back(random_unimodular(rng, 3));
    const auto zero = holder_lhs_rhs(stuck);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);
}

TEST_CASE("product splitting sides against explicit expansion") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t k = 1 + static_cast<std::size_t>(trial % 6);
        const auto inst = random_holder(rng, 3, k);
        const auto n = inst.mu.size();
        const CMatrix e = (Vector::Ones(n) * inst.mu.transpose()).cast<std::complex<double>>();
        CMatrix m = inst.u[0].asDiagonal();
        for (std::size_t j = 0; j < k; ++j) {
            m = m * (inst.t[j].cast<std::complex<double>>() + (1.0 - inst.lam) * e) * inst.u[j + 1].asDiagonal();
        }
        const CVector v = m * CVector::Ones(n);
        double l1 = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) l1 += inst.mu(i) * std::abs(v(i));
        const std::complex<double> mean = inst.mu.cast<std::complex<double>>().dot(v);

        // rhs by explicit padded strings
        MuNormContext ctx(inst.mu);
        double rhs = 0.0;
        for (std::uint32_t s = 0; s < (1U << k); ++s) {
            std::vector<int> sbar(k + 2, 0);
            for (std::size_t j = 1; j <= k; ++j) sbar[j] = static_cast<int>((s >> (j - 1)) & 1U);
            double term = 1.0;
            for (std::size_t j = 1; j <= k; ++j) term *= sbar[j] ? ctx.op_norm(inst.t[j - 1]) : 1.0 - inst.lam;
            for (std::size_t j = 1; j <= k + 1; ++j) {
                if (sbar[j - 1] == 0 && sbar[j] == 0) term *= std::abs(ctx.mean(inst.u[j - 1]));
            }
            rhs += term;
        }
        const auto sides = holder_lhs_rhs(inst);
        CHECK(std::abs(sides.lhs - l1) < 1e-12);
        CHECK(std::abs(sides.lhs_mean - std::abs(mean)) < 1e-12);
        CHECK(std::abs(sides.rhs - rhs) < 1e-12);
        CHECK(sides.lhs_mean <= sides.rhs + 1e-12);
    }
}

TEST_CASE("product splitting validation") {
    std::mt19937_64 rng(4);
    auto inst = random_holder(rng, 3, 2);
    inst.u[1](0) *= 1.5;
    CHECK_THROWS_AS(holder_lhs_rhs(inst), Error);
    auto short_u = random_holder(rng, 3, 2);
    short_u.u.pop_back();
    CHECK_THROWS_AS(holder_lhs_rhs(short_u), Error);
    auto big = random_holder(rng, 2, 17);
    CHECK_THROWS_AS(holder_lhs_rhs(big), Error);
}

TEST_CASE("averaging identities on random instances") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> entry(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 2 + trial % 4;
        const auto inst = random_holder(rng, n, 1 + static_cast<std::size_t>(trial % 5));
        std::vector<Matrix> r(1 + static_cast<std::size_t>(trial % 4));
        for (auto& m : r) m = Matrix::NullaryExpr(n, n, [&] { return entry(rng); });
        const auto report = check_averaging_identities(inst.mu, random_unimodular(rng, n), r, inst);
        CHECK(report.splitting_pass);
        CHECK(report.chain_pass);
        CHECK(report.product_pass);
        CHECK(report.pass());
    }
}

TEST_CASE("averaging identity values on a two-state example") {
    Vector mu(2);
    mu << 0.25, 0.75;
    CVector u(2);
    u << 1.0, -1.0;
    HolderInstance inst;
    inst.mu = mu;
    inst.lam = 0.0;
    inst.t = {Matrix::Identity(2, 2)};
    inst.u = {u, u};
    const std::vector<Matrix> r = {Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2)};
    const auto report = check_averaging_identities(mu, u, r, inst);
    CHECK(report.splitting_defect < 1e-15);
    CHECK(report.chain_lhs == doctest::Approx(2.0));
    CHECK(report.chain_rhs == doctest::Approx(2.0));
    CHECK(report.product_lhs == doctest::Approx(1.0));
    CHECK(report.product_rhs == doctest::Approx(1.0));
}

TEST_CASE("switching law against direct enumeration") {
    for (unsigned n = 1; n <= 10; ++n) {
        std::vector<bool> mask(n);
        for (unsigned j = 0; j < n; ++j) mask[j] = (j % 3) != 1;
        for (double lam : {0.0, 0.35, 1.0}) {
            std::vector<double> law(n + 1, 0.0);
            const unsigned len = n - 1;
            for (std::uint32_t s = 0; s < (1U << len); ++s) {
                double p = 1.0;
                for (unsigned j = 0; j < len; ++j) p *= ((s >> j) & 1U) ? lam : 1.0 - lam;
                unsigned r = 0;
                for (unsigned j = 1; j + 1 <= len; ++j) {
                    const bool zero_here = !((s >> (j - 1)) & 1U);
                    const bool zero_next = !((s >> j) & 1U);
                    if (zero_here && zero_next && mask[j - 1]) ++r;
                }
                law[r + 1] += p;
            }
            const auto report = switching_stats(n, lam, mask);
            REQUIRE(report.shifted_r.size() == law.size());
            for (std::size_t t = 0; t < law.size(); ++t) CHECK(std::abs(report.shifted_r[t] - law[t]) < 1e-14);
        }
    }
}

TEST_CASE("switching extremes") {
    const std::vector<bool> full(9, true);
    const auto fast = switching_stats(9, 0.0, full);
    CHECK(fast.shifted_r[8] == doctest::Approx(1.0));  // r = n - 2
    const auto stuck = switching_stats(9, 1.0, full);
    CHECK(stuck.shifted_r[1] == doctest::Approx(1.0));
    CHECK(std::isinf(stuck.moment_bound));
    CHECK(stuck.jensen_chain());
    CHECK_THROWS_AS(switching_stats(14, 0.5, std::vector<bool>(14, true)), Error);
    CHECK_THROWS_AS(switching_stats(6, 0.5, {true, true, false, false, false, false}), Error);
    CHECK_THROWS_AS(switching_stats(6, 1.5, std::vector<bool>(6, true)), Error);
}

TEST_CASE("switching domination and moment chain over the grid") {
    for (unsigned n = 1; n <= 13; ++n) {
        std::vector<std::vector<bool>> masks = {std::vector<bool>(n, true)};
        std::vector<bool> alt(n), front(n), back(n);
        for (unsigned j = 0; j < n; ++j) {
            alt[j] = j % 2 == 0;
            front[j] = 2 * j < n + 1;
            back[j] = 2 * j >= n - 1;
        }
        masks.push_back(alt);
        masks.push_back(front);
        masks.push_back(back);
        for (int i = 0; i <= 10; ++i) {
            const double lam = i / 10.0;
            for (std::size_t m = 0; m < masks.size(); ++m) {
                const auto report = switching_stats(n, lam, masks[m]);
                CHECK(report.dominated());
                CHECK(report.jensen_chain());
                if (m == 0) CHECK(report.dominated_half());
            }
        }
    }
}

TEST_CASE("norm ordering on random vectors") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::Index n = 1 + trial % 7;
        Vector mu(n);
        for (Eigen::Index i = 0; i < n; ++i) mu(i) = std::abs(unif(rng)) + 0.01;
        mu /= mu.sum();
        CVector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = {unif(rng), unif(rng)};
        MuNormContext ctx(mu);
        CHECK(ctx.l1(v) <= ctx.l2(v) * (1 + 1e-14));
        CHECK(ctx.l2(v) <= ctx.linf(v) * (1 + 1e-14));
    }
}

TEST_CASE("single-state chain has a single path") {
    const auto one = make_independent_chain(Vector::Ones(1));
    Matrix values(3, 1);
    values << 1.5, -0.25, 2.0;
    const auto v = brute_force_char_fn(one, values, 0.2);
    CHECK(std::abs(v.value - std::polar(1.0, 2 * std::numbers::pi * 0.2 * 3.25)) < 1e-14);
}

TEST_CASE("product splitting with a zero operator and trivial multipliers") {
    for (double lam : {0.0, 0.4, 1.0}) {
        HolderInstance inst;
        inst.mu = Vector::Constant(3, 1.0 / 3.0);
        inst.lam = lam;
        inst.t = {Matrix::Zero(3, 3)};
        inst.u = {CVector::Ones(3), CVector::Ones(3)};
        const auto sides = holder_lhs_rhs(inst);
        CHECK(sides.lhs == doctest::Approx(1.0 - lam));
        CHECK(sides.rhs == doctest::Approx(1.0 - lam));
    }
}

TEST_CASE("averaging identities in their degenerate forms") {
    std::mt19937_64 rng(3);
    const auto inst = random_holder(rng, 4, 2);
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    const std::vector<Matrix> one = {Matrix::NullaryExpr(4, 4, [&] { return entry(rng); })};
    const auto report = check_averaging_identities(inst.mu, CVector::Ones(4), one, inst);
    CHECK(report.splitting_defect < 1e-15);
    CHECK(report.chain_lhs == doctest::Approx(report.chain_rhs).epsilon(1e-15));
}
