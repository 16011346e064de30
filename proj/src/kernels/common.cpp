#include "detail.hpp"

#include "smallball/rng.hpp"

#include <algorithm>
#include <bit>
#include <numbers>

namespace smallball::kernels {

std::complex<double> charfn_at(const Matrix& transition, const Vector& mu, const Matrix& values, double xi) {
    const auto n_states = static_cast<std::size_t>(transition.rows());
    const auto n_steps = static_cast<std::size_t>(values.rows());
    if (n_steps == 0) return {1.0, 0.0};
    const double omega = 2.0 * std::numbers::pi * xi;

    std::vector<std::complex<double>> w(n_states);
    std::vector<std::complex<double>> tmp(n_states);
    const auto last = static_cast<Eigen::Index>(n_steps - 1);
    for (std::size_t y = 0; y < n_states; ++y) {
        w[y] = std::polar(1.0, omega * values(last, static_cast<Eigen::Index>(y)));
    }
    for (std::size_t jj = n_steps - 1; jj-- > 0;) {
        const auto j = static_cast<Eigen::Index>(jj);
        for (std::size_t y = 0; y < n_states; ++y) {
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t z = 0; z < n_states; ++z) {
                acc += transition(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(z)) * w[z];
            }
            tmp[y] = acc;
        }
        for (std::size_t y = 0; y < n_states; ++y) {
            w[y] = std::polar(1.0, omega * values(j, static_cast<Eigen::Index>(y))) * tmp[y];
        }
    }
    std::complex<double> out{0.0, 0.0};
    for (std::size_t y = 0; y < n_states; ++y) out += mu(static_cast<Eigen::Index>(y)) * w[y];
    return out;
}

PathTables PathTables::from(const Matrix& transition, const Vector& mu) {
    PathTables t;
    t.n_states = static_cast<std::size_t>(transition.rows());
    t.initial_cdf.resize(t.n_states);
    t.row_cdf.resize(t.n_states * t.n_states);
    double acc = 0.0;
    for (std::size_t y = 0; y < t.n_states; ++y) {
        acc += mu(static_cast<Eigen::Index>(y));
        t.initial_cdf[y] = acc;
    }
    for (std::size_t y = 0; y < t.n_states; ++y) {
        acc = 0.0;
        for (std::size_t z = 0; z < t.n_states; ++z) {
            acc += transition(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(z));
            t.row_cdf[y * t.n_states + z] = acc;
        }
    }
    return t;
}

std::size_t draw_from_cdf(std::span<const double> cdf, double u) noexcept {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) {
        // Rounding left the last entry just below 1; take the last state with mass.
        std::size_t i = cdf.size() - 1;
        while (i > 0 && cdf[i] == cdf[i - 1]) --i;
        return i;
    }
    return static_cast<std::size_t>(it - cdf.begin());
}

void sample_path(const PathTables& tables, std::uint64_t seed, std::uint64_t index, std::span<std::uint32_t> states) {
    if (states.empty()) return;
    CounterRng rng(seed, StreamId::ChainPaths, index);
    const std::size_t n = tables.n_states;
    std::size_t y = draw_from_cdf(tables.initial_cdf, rng.uniform());
    states[0] = static_cast<std::uint32_t>(y);
    for (std::size_t j = 1; j < states.size(); ++j) {
        y = draw_from_cdf(std::span<const double>(tables.row_cdf.data() + y * n, n), rng.uniform());
        states[j] = static_cast<std::uint32_t>(y);
    }
}

namespace detail {

bool ball_hit(const PathTables& tables, const BallQuery& query, std::uint64_t seed, std::uint64_t index,
              std::vector<double>& sum) {
    const std::size_t n = tables.n_states;
    const std::size_t d = query.dimension;
    sum.assign(d, 0.0);
    CounterRng rng(seed, StreamId::ChainPaths, index);
    std::size_t y = 0;
    for (std::size_t j = 0; j < query.n_steps; ++j) {
        if (j == 0) {
            y = draw_from_cdf(tables.initial_cdf, rng.uniform());
        } else {
            y = draw_from_cdf(std::span<const double>(tables.row_cdf.data() + y * n, n), rng.uniform());
        }
        const double s = query.signs[j * n + y];
        for (std::size_t c = 0; c < d; ++c) sum[c] += s * query.weights[j * d + c];
    }
    double dist2 = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
        const double diff = sum[c] - query.center[c];
        dist2 += diff * diff;
    }
    return std::sqrt(dist2) <= query.radius;
}

bool sphere_tail_hit(std::size_t dimension, double t, std::uint64_t seed, std::uint64_t index) {
    CounterRng rng(seed, StreamId::SphereSamples, index);
    double first = 0.0;
    double norm2 = 0.0;
    for (std::size_t c = 0; c < dimension; ++c) {
        const double g = rng.normal();
        if (c == 0) first = g;
        norm2 += g * g;
    }
    return std::abs(first) >= t * std::sqrt(norm2);
}

bool walk_hit(const WalkGraph& graph, const Matrix& values, double x0, double radius, std::uint64_t seed,
              std::uint64_t index) {
    CounterRng rng(seed, StreamId::WalkSamples, index);
    auto v = static_cast<std::size_t>(rng.below(graph.vertices));
    double sum = values(0, static_cast<Eigen::Index>(v));
    for (Eigen::Index level = 1; level < values.rows(); ++level) {
        const auto e = static_cast<std::size_t>(rng.below(graph.degree));
        v = graph.neighbors[v * graph.degree + e];
        sum += values(level, static_cast<Eigen::Index>(v));
    }
    return std::abs(sum - x0) <= radius;
}

namespace {

template <class Visit>
void for_each_walk(const WalkGraph& graph, std::size_t levels, std::size_t start, Visit&& visit) {
    // Iterative depth-first enumeration; visit(level, vertex) is called on entry,
    // visit_leaf is signalled by level == levels - 1.
    std::vector<std::size_t> vertex(levels);
    std::vector<std::size_t> edge(levels, 0);
    vertex[0] = start;
    visit(0, start);
    if (levels == 1) return;
    std::size_t level = 1;
    edge[1] = 0;
    while (level > 0) {
        if (edge[level] == graph.degree) {
            --level;
            continue;
        }
        const std::size_t v = graph.neighbors[vertex[level - 1] * graph.degree + edge[level]];
        ++edge[level];
        vertex[level] = v;
        visit(level, v);
        if (level + 1 < levels) {
            ++level;
            edge[level] = 0;
        }
    }
}

}  // namespace

void walk_lattice_from(const WalkGraph& graph, const IntMatrix& values, std::int64_t offset, std::size_t start,
                       std::vector<std::uint64_t>& counts) {
    const auto levels = static_cast<std::size_t>(values.rows());
    std::vector<std::int64_t> partial(levels);
    for_each_walk(graph, levels, start, [&](std::size_t level, std::size_t v) {
        const std::int64_t x = values(static_cast<Eigen::Index>(level), static_cast<Eigen::Index>(v));
        partial[level] = level == 0 ? x : partial[level - 1] + x;
        if (level + 1 == levels) ++counts[static_cast<std::size_t>(partial[level] - offset)];
    });
}

std::vector<std::pair<double, std::uint64_t>> walk_values_from(const WalkGraph& graph, const Matrix& values,
                                                               std::size_t start) {
    const auto levels = static_cast<std::size_t>(values.rows());
    std::vector<double> partial(levels);
    std::vector<double> sums;
    for_each_walk(graph, levels, start, [&](std::size_t level, std::size_t v) {
        const double x = values(static_cast<Eigen::Index>(level), static_cast<Eigen::Index>(v));
        partial[level] = level == 0 ? x : partial[level - 1] + x;
        if (level + 1 == levels) sums.push_back(partial[level]);
    });
    std::sort(sums.begin(), sums.end());
    std::vector<std::pair<double, std::uint64_t>> out;
    for (const double s : sums) {
        if (!out.empty() && out.back().first == s) {
            ++out.back().second;
        } else {
            out.emplace_back(s, 1);
        }
    }
    return out;
}

std::vector<std::pair<double, std::uint64_t>> merge_value_lists(
    std::vector<std::vector<std::pair<double, std::uint64_t>>>& lists) {
    std::vector<std::pair<double, std::uint64_t>> all;
    for (auto& l : lists) {
        all.insert(all.end(), l.begin(), l.end());
        l.clear();
        l.shrink_to_fit();
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<double, std::uint64_t>> out;
    for (const auto& [s, c] : all) {
        if (!out.empty() && out.back().first == s) {
            out.back().second += c;
        } else {
            out.emplace_back(s, c);
        }
    }
    return out;
}

std::pair<unsigned, unsigned> switching_stats(std::uint64_t s, unsigned n, std::uint32_t mask) noexcept {
    const unsigned ones = static_cast<unsigned>(std::popcount(s));
    if (n < 3) return {ones, 0};
    const unsigned length = n - 1;
    const std::uint64_t full = (std::uint64_t{1} << length) - 1;
    const std::uint64_t zeros = ~s & full;
    // bit j-1 set iff s_j = s_{j+1} = 0, for j = 1..n-2
    const std::uint64_t pairs = zeros & (zeros >> 1) & ((std::uint64_t{1} << (length - 1)) - 1) & mask;
    return {ones, static_cast<unsigned>(std::popcount(pairs))};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Backend dispatch.

#define SMALLBALL_DISPATCH(call) \
    return backend == Backend::Serial ? serial::call : omp::call

void propagate_layer(Backend backend, const Matrix& transition, std::span<const double> current,
                     std::span<double> next, std::size_t width, std::size_t lo, std::size_t hi,
                     std::span<const std::int64_t> shift) {
    SMALLBALL_DISPATCH(propagate_layer(transition, current, next, width, lo, hi, shift));
}

void charfn_sweep(Backend backend, const Matrix& transition, const Vector& mu, const Matrix& values,
                  std::span<const double> xis, std::span<std::complex<double>> out) {
    SMALLBALL_DISPATCH(charfn_sweep(transition, mu, values, xis, out));
}

std::uint64_t count_ball_hits(Backend backend, const PathTables& tables, const BallQuery& query,
                              std::uint64_t count, std::uint64_t seed) {
    SMALLBALL_DISPATCH(count_ball_hits(tables, query, count, seed));
}

std::uint64_t count_sphere_tail(Backend backend, std::size_t dimension, double t, std::uint64_t count,
                                std::uint64_t seed) {
    SMALLBALL_DISPATCH(count_sphere_tail(dimension, t, count, seed));
}

std::vector<std::uint64_t> walk_lattice_counts(Backend backend, const WalkGraph& graph, const IntMatrix& values,
                                               std::int64_t offset, std::size_t width) {
    SMALLBALL_DISPATCH(walk_lattice_counts(graph, values, offset, width));
}

std::vector<std::pair<double, std::uint64_t>> walk_value_counts(Backend backend, const WalkGraph& graph,
                                                                const Matrix& values) {
    SMALLBALL_DISPATCH(walk_value_counts(graph, values));
}

std::uint64_t count_walk_hits(Backend backend, const WalkGraph& graph, const Matrix& values, double x0,
                              double radius, std::uint64_t count, std::uint64_t seed) {
    SMALLBALL_DISPATCH(count_walk_hits(graph, values, x0, radius, count, seed));
}

std::vector<std::uint64_t> switching_counts(Backend backend, unsigned n, std::uint32_t mask) {
    SMALLBALL_DISPATCH(switching_counts(n, mask));
}

#undef SMALLBALL_DISPATCH

}  // namespace smallball::kernels
