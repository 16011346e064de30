#include "smallball/kernels.hpp"
#include "smallball/rng.hpp"

#include <doctest.h>
#include <omp.h>

#include <numeric>

using namespace smallball;
using kernels::Backend;

namespace {

Matrix random_stochastic(CounterRng& rng, Eigen::Index n) {
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.uniform() + 0.01;
        a.row(i) /= a.row(i).sum();
    }
    return a;
}

// 4-regular multigraph on a cycle: two forward and two backward slots.
std::vector<std::uint32_t> cycle_neighbors(std::uint32_t v) {
    std::vector<std::uint32_t> nb;
    for (std::uint32_t x = 0; x < v; ++x) {
        nb.push_back((x + 1) % v);
        nb.push_back((x + v - 1) % v);
        nb.push_back((x + 3) % v);
        nb.push_back((x + v - 3) % v);
    }
    return nb;
}

template <class F>
void for_thread_counts(F&& f) {
    for (int threads : {1, 3}) {
        omp_set_num_threads(threads);
        f();
    }
}

}  // namespace

TEST_CASE("propagate_layer: serial and OpenMP agree bit for bit") {
    CounterRng rng(3, StreamId::Instances, 0);
    const Eigen::Index n = 4;
    const Matrix a = random_stochastic(rng, n);
    const std::size_t width = 41;
    std::vector<double> current(static_cast<std::size_t>(n) * width);
    for (double& x : current) x = rng.uniform();
    std::vector<std::int64_t> shift{-3, 1, 2, 0};
    std::vector<double> ref(current.size(), 0.0);
    kernels::propagate_layer(Backend::Serial, a, current, ref, width, 5, 35, shift);
    for_thread_counts([&] {
        std::vector<double> par(current.size(), 0.0);
        kernels::propagate_layer(Backend::OpenMP, a, current, par, width, 5, 35, shift);
        CHECK(par == ref);
    });
}

TEST_CASE("charfn_sweep: backends agree and match a direct product") {
    CounterRng rng(4, StreamId::Instances, 0);
    const Eigen::Index n = 3;
    const Matrix a = random_stochastic(rng, n);
    const Vector mu = Vector::Constant(n, 1.0 / 3.0);
    Matrix values(6, n);
    for (Eigen::Index i = 0; i < values.size(); ++i) values(i) = rng.uniform() * 4 - 2;
    std::vector<double> xis(97);
    for (std::size_t i = 0; i < xis.size(); ++i) xis[i] = -1.0 + 0.021 * static_cast<double>(i);
    std::vector<std::complex<double>> ref(xis.size());
    kernels::charfn_sweep(Backend::Serial, a, mu, values, xis, ref);
    for_thread_counts([&] {
        std::vector<std::complex<double>> par(xis.size());
        kernels::charfn_sweep(Backend::OpenMP, a, mu, values, xis, par);
        CHECK(par == ref);
    });
    // Dense complex product as an independent route.
    const double xi = xis[40];
    CVector w = CVector::Ones(n);
    for (Eigen::Index j = values.rows() - 1; j >= 0; --j) {
        for (Eigen::Index y = 0; y < n; ++y) w(y) *= std::polar(1.0, 2 * std::numbers::pi * xi * values(j, y));
        if (j > 0) w = a.cast<std::complex<double>>() * w;
    }
    const std::complex<double> direct = mu.cast<std::complex<double>>().dot(w);
    CHECK(std::abs(direct - ref[40]) < 1e-13);
}

TEST_CASE("sampling kernels: backends agree for any thread count") {
    CounterRng rng(5, StreamId::Instances, 0);
    const Matrix a = random_stochastic(rng, 3);
    Vector mu(3);
    mu << 0.2, 0.3, 0.5;
    const auto tables = kernels::PathTables::from(a, mu);
    std::vector<int8_t> signs{1, -1, 1, -1, 1, 1, 1, -1, -1, 1, -1, 1};
    std::vector<double> weights{1, 0, 0, 1, 1, 1, 2, 0};
    std::vector<double> center{0.5, 0.5};
    kernels::BallQuery q{signs, weights, 4, 2, center, 1.5};
    const auto ref = kernels::count_ball_hits(Backend::Serial, tables, q, 20000, 99);
    const auto tail = kernels::count_sphere_tail(Backend::Serial, 5, 0.3, 20000, 99);
    CHECK(ref > 0);
    CHECK(ref < 20000);
    for_thread_counts([&] {
        CHECK(kernels::count_ball_hits(Backend::OpenMP, tables, q, 20000, 99) == ref);
        CHECK(kernels::count_sphere_tail(Backend::OpenMP, 5, 0.3, 20000, 99) == tail);
    });
}

TEST_CASE("sample_path follows the chain") {
    Matrix a(2, 2);
    a << 0, 1, 1, 0;
    const auto tables = kernels::PathTables::from(a, Vector::Constant(2, 0.5));
    std::vector<std::uint32_t> states(9);
    int starts[2] = {};
    for (std::uint64_t i = 0; i < 1000; ++i) {
        kernels::sample_path(tables, 1, i, states);
        ++starts[states[0]];
        for (std::size_t j = 1; j < states.size(); ++j) CHECK(states[j] != states[j - 1]);
    }
    CHECK(starts[0] > 400);
    CHECK(starts[1] > 400);
}

TEST_CASE("draw_from_cdf skips zero-mass tail states") {
    std::vector<double> cdf{0.3, 0.9999999999999999, 0.9999999999999999};
    CHECK(kernels::draw_from_cdf(cdf, 0.1) == 0);
    CHECK(kernels::draw_from_cdf(cdf, 0.5) == 1);
    CHECK(kernels::draw_from_cdf(cdf, 0.99999999999999995) == 1);
}

TEST_CASE("walk kernels: exhaustive counts and backend agreement") {
    const std::uint32_t v = 7;
    const auto nb = cycle_neighbors(v);
    kernels::WalkGraph g{v, 4, nb};
    IntMatrix values(3, v);
    for (Eigen::Index j = 0; j < 3; ++j) {
        for (Eigen::Index x = 0; x < v; ++x) values(j, x) = (x % 3) - 1 + j;
    }
    const std::int64_t offset = -10;
    const auto ref = kernels::walk_lattice_counts(Backend::Serial, g, values, offset, 21);
    CHECK(std::accumulate(ref.begin(), ref.end(), std::uint64_t{0}) == 7u * 4u * 4u);

    // Naive triple loop.
    std::vector<std::uint64_t> naive(21, 0);
    for (std::uint32_t a = 0; a < v; ++a) {
        for (int e1 = 0; e1 < 4; ++e1) {
            const auto b = nb[a * 4 + static_cast<std::uint32_t>(e1)];
            for (int e2 = 0; e2 < 4; ++e2) {
                const auto c = nb[b * 4 + static_cast<std::uint32_t>(e2)];
                ++naive[static_cast<std::size_t>(values(0, a) + values(1, b) + values(2, c) - offset)];
            }
        }
    }
    CHECK(naive == ref);

    const Matrix real_values = values.cast<double>();
    const auto pairs = kernels::walk_value_counts(Backend::Serial, g, real_values);
    for (const auto& [s, c] : pairs) CHECK(ref[static_cast<std::size_t>(static_cast<std::int64_t>(s) - offset)] == c);

    const auto hits = kernels::count_walk_hits(Backend::Serial, g, real_values, 1.0, 1.0, 5000, 3);
    for_thread_counts([&] {
        CHECK(kernels::walk_lattice_counts(Backend::OpenMP, g, values, offset, 21) == ref);
        CHECK(kernels::walk_value_counts(Backend::OpenMP, g, real_values) == pairs);
        CHECK(kernels::count_walk_hits(Backend::OpenMP, g, real_values, 1.0, 1.0, 5000, 3) == hits);
    });
}

TEST_CASE("walk of length one visits each vertex once") {
    const auto nb = cycle_neighbors(5);
    kernels::WalkGraph g{5, 4, nb};
    IntMatrix values(1, 5);
    values << 0, 1, 2, 3, 4;
    CHECK(kernels::walk_lattice_counts(Backend::Serial, g, values, 0, 5) == std::vector<std::uint64_t>(5, 1));
}

TEST_CASE("switching counts") {
    // n = 4: strings s1 s2 s3; zero pairs at j = 1 (s1 = s2 = 0) and j = 2 (s2 = s3 = 0).
    const auto c = kernels::switching_counts(Backend::Serial, 4, 0b11);
    CHECK(c[0 * 4 + 2] == 1);  // 000
    CHECK(c[1 * 4 + 1] == 2);  // 001, 100
    CHECK(c[1 * 4 + 0] == 1);  // 010
    CHECK(c[2 * 4 + 0] == 3);
    CHECK(c[3 * 4 + 0] == 1);
    const auto masked = kernels::switching_counts(Backend::Serial, 4, 0b10);
    CHECK(masked[0 * 4 + 1] == 1);
    CHECK(masked[1 * 4 + 1] == 1);  // 100 only
    for (unsigned n = 1; n <= 13; ++n) {
        const auto ref = kernels::switching_counts(Backend::Serial, n, 0x5555);
        CHECK(std::accumulate(ref.begin(), ref.end(), std::uint64_t{0}) == (std::uint64_t{1} << (n - 1)));
        for_thread_counts([&] { CHECK(kernels::switching_counts(Backend::OpenMP, n, 0x5555) == ref); });
    }
}
