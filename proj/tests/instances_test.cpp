#include "smallball/error.hpp"
#include "smallball/instances.hpp"

#include <doctest.h>

#include <cmath>

using namespace smallball;

TEST_CASE("instances are a pure function of seed and index") {
    const auto a = random_integer_instance(7, 3);
    const auto b = random_integer_instance(7, 3);
    CHECK(a.id == b.id);
    CHECK(a.chain.transition() == b.chain.transition());
    CHECK(a.weights.flat() == b.weights.flat());
    const auto c = random_integer_instance(7, 4);
    CHECK((c.id != a.id || c.chain.transition() != a.chain.transition()));

    const auto h1 = random_holder_instance(1, 9);
    const auto h2 = random_holder_instance(1, 9);
    CHECK(h1.u.back() == h2.u.back());
    CHECK(random_unit_weights(5, 3, 2).flat() == random_unit_weights(5, 3, 2).flat());
}

TEST_CASE("balanced chains hit the requested spectral parameter") {
    std::uint64_t index = 0;
    for (std::size_t n = 2; n <= 4; ++n) {
        for (double lam : {0.0, 0.03, 0.2, 0.5, 0.8, 0.85, 0.9}) {
            const auto bc = balanced_chain_with_lambda(n, lam, 99, index++);
            CHECK(std::abs(spectral_lambda(bc.chain) - lam) < 1e-9);
            const auto signs = SignSystem::repeated(bc.labeling, 3, bc.chain, true);
            CHECK(signs.balanced());
        }
    }
    CHECK_THROWS_AS(balanced_chain_with_lambda(5, 0.5, 1, 0), Error);
    CHECK_THROWS_AS(balanced_chain_with_lambda(2, 0.95, 1, 0), Error);
}

TEST_CASE("generated families respect their limits") {
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto inst = random_integer_instance(3, i);
        CHECK(inst.chain.n_states() <= 4);
        CHECK(inst.signs.n_steps() <= 8);
        CHECK(inst.weights.size() == inst.signs.n_steps());
        CHECK(inst.weights.integral());
        CHECK(detailed_balance_defect(inst.chain.transition(), inst.chain.stationary()).value < 1e-12);

        const auto h = random_holder_instance(3, i);
        CHECK(h.mu.size() <= 6);
        CHECK(h.k() <= 6);
        CHECK(h.u.size() == h.k() + 1);
        for (const auto& u : h.u) CHECK(u.cwiseAbs().maxCoeff() <= 1.0 + 1e-15);

        const auto av = random_averaging_instance(3, i);
        CHECK(av.mu.size() <= 8);
        CHECK(av.r.size() <= 5);
        CHECK(av.u.cwiseAbs().maxCoeff() <= 1.0);
    }
}

TEST_CASE("random unit weights have unit length") {
    const auto w = random_unit_weights(20, 4, 5);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(w.norm(i) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(random_unit_weights(3, 0, 1), Error);
}

TEST_CASE("the mean form of the product splitting holds on the random family") {
    int literal_violations = 0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        const auto sides = holder_lhs_rhs(random_holder_instance(20240, i));
        CHECK(sides.lhs_mean <= sides.rhs + 1e-9);
        if (sides.lhs > sides.rhs + 1e-9) ++literal_violations;
    }
    CHECK(literal_violations > 0);
}
