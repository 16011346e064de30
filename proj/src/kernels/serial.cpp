#include "detail.hpp"

namespace smallball::kernels::serial {

void propagate_layer(const Matrix& transition, std::span<const double> current, std::span<double> next,
                     std::size_t width, std::size_t lo, std::size_t hi, std::span<const std::int64_t> shift) {
    const auto n_states = static_cast<std::size_t>(transition.rows());
    for (std::size_t t = 0; t < n_states; ++t) {
        for (std::size_t p = lo; p <= hi; ++p) {
            CompensatedSum acc;
            for (std::size_t y = 0; y < n_states; ++y) {
                const double a = transition(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(t));
                acc.add(current[y * width + p] * a);
            }
            next[t * width + static_cast<std::size_t>(static_cast<std::int64_t>(p) + shift[t])] = acc.value();
        }
    }
}

void charfn_sweep(const Matrix& transition, const Vector& mu, const Matrix& values, std::span<const double> xis,
                  std::span<std::complex<double>> out) {
    for (std::size_t i = 0; i < xis.size(); ++i) out[i] = charfn_at(transition, mu, values, xis[i]);
}

std::uint64_t count_ball_hits(const PathTables& tables, const BallQuery& query, std::uint64_t count,
                              std::uint64_t seed) {
    std::vector<double> scratch;
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < count; ++i) hits += detail::ball_hit(tables, query, seed, i, scratch) ? 1 : 0;
    return hits;
}

std::uint64_t count_sphere_tail(std::size_t dimension, double t, std::uint64_t count, std::uint64_t seed) {
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < count; ++i) hits += detail::sphere_tail_hit(dimension, t, seed, i) ? 1 : 0;
    return hits;
}

std::vector<std::uint64_t> walk_lattice_counts(const WalkGraph& graph, const IntMatrix& values, std::int64_t offset,
                                               std::size_t width) {
    std::vector<std::uint64_t> counts(width, 0);
    for (std::size_t v = 0; v < graph.vertices; ++v) detail::walk_lattice_from(graph, values, offset, v, counts);
    return counts;
}

std::vector<std::pair<double, std::uint64_t>> walk_value_counts(const WalkGraph& graph, const Matrix& values) {
    std::vector<std::vector<std::pair<double, std::uint64_t>>> lists(graph.vertices);
    for (std::size_t v = 0; v < graph.vertices; ++v) lists[v] = detail::walk_values_from(graph, values, v);
    return detail::merge_value_lists(lists);
}

std::uint64_t count_walk_hits(const WalkGraph& graph, const Matrix& values, double x0, double radius,
                              std::uint64_t count, std::uint64_t seed) {
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < count; ++i) hits += detail::walk_hit(graph, values, x0, radius, seed, i) ? 1 : 0;
    return hits;
}

std::vector<std::uint64_t> switching_counts(unsigned n, std::uint32_t mask) {
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(n) * n, 0);
    const std::uint64_t total = n == 0 ? 0 : std::uint64_t{1} << (n - 1);
    for (std::uint64_t s = 0; s < total; ++s) {
        const auto [m, r] = detail::switching_stats(s, n, mask);
        ++counts[static_cast<std::size_t>(m) * n + r];
    }
    return counts;
}

}  // namespace smallball::kernels::serial
