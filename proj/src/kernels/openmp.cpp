#include "detail.hpp"

namespace smallball::kernels::omp {

void propagate_layer(const Matrix& transition, std::span<const double> current, std::span<double> next,
                     std::size_t width, std::size_t lo, std::size_t hi, std::span<const std::int64_t> shift) {
    const auto n_states = static_cast<std::int64_t>(transition.rows());
    const auto len = static_cast<std::int64_t>(hi - lo + 1);
    const std::int64_t cells = n_states * len;
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < cells; ++c) {
        const auto t = static_cast<std::size_t>(c / len);
        const std::size_t p = lo + static_cast<std::size_t>(c % len);
        CompensatedSum acc;
        for (std::int64_t y = 0; y < n_states; ++y) {
            acc.add(current[static_cast<std::size_t>(y) * width + p] * transition(y, static_cast<Eigen::Index>(t)));
        }
        next[t * width + static_cast<std::size_t>(static_cast<std::int64_t>(p) + shift[t])] = acc.value();
    }
}

void charfn_sweep(const Matrix& transition, const Vector& mu, const Matrix& values, std::span<const double> xis,
                  std::span<std::complex<double>> out) {
    const auto count = static_cast<std::int64_t>(xis.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = charfn_at(transition, mu, values, xis[static_cast<std::size_t>(i)]);
    }
}

std::uint64_t count_ball_hits(const PathTables& tables, const BallQuery& query, std::uint64_t count,
                              std::uint64_t seed) {
    std::uint64_t hits = 0;
#pragma omp parallel reduction(+ : hits)
    {
        std::vector<double> scratch;
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
            hits += detail::ball_hit(tables, query, seed, static_cast<std::uint64_t>(i), scratch) ? 1 : 0;
        }
    }
    return hits;
}

std::uint64_t count_sphere_tail(std::size_t dimension, double t, std::uint64_t count, std::uint64_t seed) {
    std::uint64_t hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
        hits += detail::sphere_tail_hit(dimension, t, seed, static_cast<std::uint64_t>(i)) ? 1 : 0;
    }
    return hits;
}

std::vector<std::uint64_t> walk_lattice_counts(const WalkGraph& graph, const IntMatrix& values, std::int64_t offset,
                                               std::size_t width) {
    std::vector<std::uint64_t> counts(width, 0);
#pragma omp parallel
    {
        std::vector<std::uint64_t> local(width, 0);
#pragma omp for schedule(dynamic)
        for (std::int64_t v = 0; v < static_cast<std::int64_t>(graph.vertices); ++v) {
            detail::walk_lattice_from(graph, values, offset, static_cast<std::size_t>(v), local);
        }
#pragma omp critical(smallball_walk_counts)
        for (std::size_t i = 0; i < width; ++i) counts[i] += local[i];
    }
    return counts;
}

std::vector<std::pair<double, std::uint64_t>> walk_value_counts(const WalkGraph& graph, const Matrix& values) {
    std::vector<std::vector<std::pair<double, std::uint64_t>>> lists(graph.vertices);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t v = 0; v < static_cast<std::int64_t>(graph.vertices); ++v) {
        lists[static_cast<std::size_t>(v)] = detail::walk_values_from(graph, values, static_cast<std::size_t>(v));
    }
    return detail::merge_value_lists(lists);
}

std::uint64_t count_walk_hits(const WalkGraph& graph, const Matrix& values, double x0, double radius,
                              std::uint64_t count, std::uint64_t seed) {
    std::uint64_t hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
        hits += detail::walk_hit(graph, values, x0, radius, seed, static_cast<std::uint64_t>(i)) ? 1 : 0;
    }
    return hits;
}

std::vector<std::uint64_t> switching_counts(unsigned n, std::uint32_t mask) {
    const std::size_t cells = static_cast<std::size_t>(n) * n;
    std::vector<std::uint64_t> counts(cells, 0);
    const std::int64_t total = n == 0 ? 0 : std::int64_t{1} << (n - 1);
#pragma omp parallel
    {
        std::vector<std::uint64_t> local(cells, 0);
#pragma omp for schedule(static)
        for (std::int64_t s = 0; s < total; ++s) {
            const auto [m, r] = detail::switching_stats(static_cast<std::uint64_t>(s), n, mask);
            ++local[static_cast<std::size_t>(m) * n + r];
        }
#pragma omp critical(smallball_switching_counts)
        for (std::size_t i = 0; i < cells; ++i) counts[i] += local[i];
    }
    return counts;
}

}  // namespace smallball::kernels::omp
