#pragma once

// Data-parallel inner loops. Every kernel has a plain serial implementation
// (the reference the tests compare against) and an OpenMP implementation.
// The OpenMP versions fix the reduction order, or reduce exact integer
// counts, so both backends return bit-identical results for any thread count.

#include "smallball/linalg.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace smallball::kernels {

enum class Backend { Serial, OpenMP };

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// ---------------------------------------------------------------------------
// Forward lattice dynamic program.
//
// `current` and `next` hold N rows of `width` lattice cells each (row-major by
// state). For every target state t and source position p in [lo, hi]:
//     next[t][p + shift[t]] = sum_y current[y][p] * A(y, t)
// `next` must be zero on entry. Targets never collide because shift depends on
// t only.
void propagate_layer(Backend backend, const Matrix& transition, std::span<const double> current,
                     std::span<double> next, std::size_t width, std::size_t lo, std::size_t hi,
                     std::span<const std::int64_t> shift);

// ---------------------------------------------------------------------------
// Characteristic function <mu, U_1 A U_2 ... A U_n 1> with
// U_j = diag(exp(2 pi i xi values(j, y))).
std::complex<double> charfn_at(const Matrix& transition, const Vector& mu, const Matrix& values, double xi);

/// out[i] = charfn_at(..., xis[i]).
void charfn_sweep(Backend backend, const Matrix& transition, const Vector& mu, const Matrix& values,
                  std::span<const double> xis, std::span<std::complex<double>> out);

// ---------------------------------------------------------------------------
// Markov path sampling.

/// Cumulative tables for drawing Y_1 ~ mu and Y_{i+1} ~ A(Y_i, .).
struct PathTables {
    std::size_t n_states = 0;
    std::vector<double> initial_cdf;
    std::vector<double> row_cdf;  // n_states x n_states

    static PathTables from(const Matrix& transition, const Vector& mu);
};

/// Index of the first cdf entry exceeding u (clamped to the last index).
std::size_t draw_from_cdf(std::span<const double> cdf, double u) noexcept;

/// States Y_1..Y_n of sample `index`.
void sample_path(const PathTables& tables, std::uint64_t seed, std::uint64_t index, std::span<std::uint32_t> states);

/// Sign/weight data for ball-hit counting: sum_j signs[j][Y_j] * weights[j] (rows
/// of length `dimension`) lands in the closed ball |. - center| <= radius.
struct BallQuery {
    std::span<const int8_t> signs;     // n x N
    std::span<const double> weights;   // n x d
    std::size_t n_steps = 0;
    std::size_t dimension = 1;
    std::span<const double> center;    // d
    double radius = 0.0;
};

std::uint64_t count_ball_hits(Backend backend, const PathTables& tables, const BallQuery& query,
                              std::uint64_t count, std::uint64_t seed);

/// Number of samples (uniform unit vectors in R^d from normalized Gaussians)
/// whose first coordinate has absolute value at least t.
std::uint64_t count_sphere_tail(Backend backend, std::size_t dimension, double t, std::uint64_t count,
                                std::uint64_t seed);

// ---------------------------------------------------------------------------
// Walks on a regular graph.

struct WalkGraph {
    std::size_t vertices = 0;
    std::size_t degree = 0;
    std::span<const std::uint32_t> neighbors;  // vertices x degree
};

/// Counts of every walk (v_1, ..., v_b) with sum_j values(j, v_j) equal to
/// offset + i, over all starts and edge-index sequences. `values` is b x V.
std::vector<std::uint64_t> walk_lattice_counts(Backend backend, const WalkGraph& graph, const IntMatrix& values,
                                               std::int64_t offset, std::size_t width);

/// Same for real-valued blocks; returns (sum, count) pairs sorted by sum with
/// equal sums merged.
std::vector<std::pair<double, std::uint64_t>> walk_value_counts(Backend backend, const WalkGraph& graph,
                                                                const Matrix& values);

/// Sampled walks (uniform start, uniform edge slots) whose sum lies within
/// radius of x0.
std::uint64_t count_walk_hits(Backend backend, const WalkGraph& graph, const Matrix& values, double x0,
                              double radius, std::uint64_t count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Switching strings s in {0,1}^(n-1).
//
// counts[m * n + r] is the number of strings with m ones and
// r = #{j : s_j = s_{j+1} = 0, j in mask}, positions 1-based as j = 1..n-2;
// bit j-1 of `mask` marks j.
std::vector<std::uint64_t> switching_counts(Backend backend, unsigned n, std::uint32_t mask);

}  // namespace smallball::kernels
