#pragma once

#include "smallball/kernels.hpp"

namespace smallball::kernels {

#define SMALLBALL_KERNEL_DECLS                                                                                   \
    void propagate_layer(const Matrix& transition, std::span<const double> current, std::span<double> next,      \
                         std::size_t width, std::size_t lo, std::size_t hi, std::span<const std::int64_t> shift); \
    void charfn_sweep(const Matrix& transition, const Vector& mu, const Matrix& values,                          \
                      std::span<const double> xis, std::span<std::complex<double>> out);                         \
    std::uint64_t count_ball_hits(const PathTables& tables, const BallQuery& query, std::uint64_t count,         \
                                  std::uint64_t seed);                                                           \
    std::uint64_t count_sphere_tail(std::size_t dimension, double t, std::uint64_t count, std::uint64_t seed);   \
    std::vector<std::uint64_t> walk_lattice_counts(const WalkGraph& graph, const IntMatrix& values,              \
                                                   std::int64_t offset, std::size_t width);                      \
    std::vector<std::pair<double, std::uint64_t>> walk_value_counts(const WalkGraph& graph, const Matrix& values); \
    std::uint64_t count_walk_hits(const WalkGraph& graph, const Matrix& values, double x0, double radius,        \
                                  std::uint64_t count, std::uint64_t seed);                                      \
    std::vector<std::uint64_t> switching_counts(unsigned n, std::uint32_t mask);

namespace serial {
SMALLBALL_KERNEL_DECLS
}
namespace omp {
SMALLBALL_KERNEL_DECLS
}

#undef SMALLBALL_KERNEL_DECLS

namespace detail {

// Shared per-item bodies; both backends call these so a single sample or a
// single walk start is computed identically.

bool ball_hit(const PathTables& tables, const BallQuery& query, std::uint64_t seed, std::uint64_t index,
              std::vector<double>& scratch);
bool sphere_tail_hit(std::size_t dimension, double t, std::uint64_t seed, std::uint64_t index);
bool walk_hit(const WalkGraph& graph, const Matrix& values, double x0, double radius, std::uint64_t seed,
              std::uint64_t index);

/// Adds counts for all walks starting at `start` into `counts`.
void walk_lattice_from(const WalkGraph& graph, const IntMatrix& values, std::int64_t offset, std::size_t start,
                       std::vector<std::uint64_t>& counts);

/// Sorted, merged (sum, count) list for walks starting at `start`.
std::vector<std::pair<double, std::uint64_t>> walk_values_from(const WalkGraph& graph, const Matrix& values,
                                                               std::size_t start);

/// Merges per-start lists in start order.
std::vector<std::pair<double, std::uint64_t>> merge_value_lists(
    std::vector<std::vector<std::pair<double, std::uint64_t>>>& lists);

/// (ones, masked zero pairs) of switching string s.
std::pair<unsigned, unsigned> switching_stats(std::uint64_t s, unsigned n, std::uint32_t mask) noexcept;

}  // namespace detail

}  // namespace smallball::kernels
