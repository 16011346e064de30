#include "smallball/prg.hpp"

#include "smallball/error.hpp"
#include "smallball/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace smallball {

ExpanderGraph::ExpanderGraph(std::size_t vertices, std::size_t degree, std::vector<std::uint32_t> neighbors)
    : vertices_(vertices), degree_(degree), neighbors_(std::move(neighbors)) {
    if (vertices_ == 0 || degree_ == 0) throw Error(ErrorCode::NotRegular, "graph needs vertices and a positive degree");
    if (neighbors_.size() != vertices_ * degree_) {
        throw Error(ErrorCode::NotRegular, "expected " + std::to_string(vertices_ * degree_) + " neighbor slots, got " +
                                               std::to_string(neighbors_.size()));
    }
    for (std::size_t i = 0; i < neighbors_.size(); ++i) {
        if (neighbors_[i] >= vertices_) {
            throw Error(ErrorCode::NotRegular, "slot " + std::to_string(i % degree_) + " of vertex " +
                                                   std::to_string(i / degree_) + " points outside the graph");
        }
    }
    // The multiset of (u, v) slots must equal the multiset of (v, u) slots.
    std::vector<std::uint64_t> forward(neighbors_.size());
    std::vector<std::uint64_t> backward(neighbors_.size());
    for (std::size_t u = 0; u < vertices_; ++u) {
        for (std::size_t e = 0; e < degree_; ++e) {
            const std::uint64_t v = neighbors_[u * degree_ + e];
            forward[u * degree_ + e] = (static_cast<std::uint64_t>(u) << 32) | v;
            backward[u * degree_ + e] = (v << 32) | u;
        }
    }
    std::sort(forward.begin(), forward.end());
    std::sort(backward.begin(), backward.end());
    const auto mismatch = std::mismatch(forward.begin(), forward.end(), backward.begin());
    if (mismatch.first != forward.end()) {
        const std::uint64_t edge = std::min(*mismatch.first, *mismatch.second);
        throw Error(ErrorCode::NotRegular, "edge multiset is not symmetric at (" + std::to_string(edge >> 32) + "," +
                                               std::to_string(edge & 0xffffffffu) + ")");
    }
    if (std::has_single_bit(vertices_)) k_ = static_cast<unsigned>(std::countr_zero(vertices_));
}

Matrix ExpanderGraph::normalized_adjacency() const {
    const auto n = static_cast<Eigen::Index>(vertices_);
    Matrix a = Matrix::Zero(n, n);
    const double w = 1.0 / static_cast<double>(degree_);
    for (std::size_t u = 0; u < vertices_; ++u) {
        for (std::size_t e = 0; e < degree_; ++e) a(static_cast<Eigen::Index>(u), neighbor(u, e)) += w;
    }
    return a;
}

ExpanderGraph build_mgg_expander(unsigned k) {
    if (k % 2 != 0) throw Error(ErrorCode::OddK, "k must be even, got " + std::to_string(k));
    if (k < 2 || k > 24) throw Error(ErrorCode::OutOfRange, "k must lie in [2, 24], got " + std::to_string(k));
    const std::uint64_t m = std::uint64_t{1} << (k / 2);
    const std::uint64_t mask = m - 1;
    const std::size_t vertices = std::size_t{1} << k;
    std::vector<std::uint32_t> nb(vertices * 8);
    for (std::uint64_t x = 0; x < m; ++x) {
        for (std::uint64_t y = 0; y < m; ++y) {
            const auto at = [&](std::uint64_t a, std::uint64_t b) { return static_cast<std::uint32_t>(((a & mask) * m) | (b & mask)); };
            std::uint32_t* slot = nb.data() + (x * m + y) * 8;
            slot[0] = at(x + 2 * y, y);
            slot[1] = at(x - 2 * y, y);
            slot[2] = at(x + 2 * y + 1, y);
            slot[3] = at(x - 2 * y - 1, y);
            slot[4] = at(x, y + 2 * x);
            slot[5] = at(x, y - 2 * x);
            slot[6] = at(x, y + 2 * x + 1);
            slot[7] = at(x, y - 2 * x - 1);
        }
    }
    return ExpanderGraph(vertices, 8, std::move(nb));
}

double certify_lambda(ExpanderGraph& graph, std::size_t budget) {
    if (graph.vertices() > budget) {
        throw Error(ErrorCode::TooLarge, std::to_string(graph.vertices()) +
                                             " vertices exceed the dense certification budget of " +
                                             std::to_string(budget));
    }
    const auto n = static_cast<Eigen::Index>(graph.vertices());
    Matrix m = graph.normalized_adjacency();
    m.array() -= 1.0 / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
    const double lam = std::min(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
    graph.set_certified_lambda(lam);
    return lam;
}

double estimate_lambda_lanczos(const ExpanderGraph& graph, std::size_t iterations, std::uint64_t seed) {
    const std::size_t n = graph.vertices();
    if (n < 2) return 0.0;
    const std::size_t steps = std::min(iterations, n - 1);
    const double inv_deg = 1.0 / static_cast<double>(graph.degree());
    const auto apply = [&](const Vector& x) {
        Vector y(static_cast<Eigen::Index>(n));
        for (std::size_t u = 0; u < n; ++u) {
            double s = 0.0;
            for (std::size_t e = 0; e < graph.degree(); ++e) s += x(graph.neighbor(u, e));
            y(static_cast<Eigen::Index>(u)) = s * inv_deg;
        }
        y.array() -= y.mean();
        return y;
    };

    CounterRng rng(seed, StreamId::Instances, 0);
    Vector q(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = rng.normal();
    q.array() -= q.mean();
    q.normalize();

    Matrix basis(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(steps));
    std::vector<double> alpha;
    std::vector<double> beta;
    for (std::size_t j = 0; j < steps; ++j) {
        basis.col(static_cast<Eigen::Index>(j)) = q;
        Vector w = apply(q);
        alpha.push_back(q.dot(w));
        // Full reorthogonalization, twice for stability.
        for (int pass = 0; pass < 2; ++pass) {
            const auto cols = basis.leftCols(static_cast<Eigen::Index>(j + 1));
            w -= cols * (cols.transpose() * w);
        }
        w.array() -= w.mean();
        const double b = w.norm();
        if (b < 1e-12 || j + 1 == steps) break;
        beta.push_back(b);
        q = w / b;
    }
    const auto m = static_cast<Eigen::Index>(alpha.size());
    Matrix t = Matrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        t(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(t, Eigen::EigenvaluesOnly);
    return std::min(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
}

MarkovChain walk_chain(const ExpanderGraph& graph) {
    const auto n = static_cast<Eigen::Index>(graph.vertices());
    return validate_chain(graph.normalized_adjacency(), Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

// ---------------------------------------------------------------------------

PrgSpec::PrgSpec(std::shared_ptr<const ExpanderGraph> graph, std::size_t n) : graph_(std::move(graph)), n_(n) {
    if (!graph_ || graph_->k() == 0) {
        throw Error(ErrorCode::PreconditionViolated, "walk sign sets need a graph on 2^k vertices, k >= 1");
    }
    if (n_ == 0 || n_ % graph_->k() != 0) {
        throw Error(ErrorCode::PreconditionViolated, "k = " + std::to_string(graph_->k()) + " does not divide n = " +
                                                         std::to_string(n_) + " (pad the weights with zeros)");
    }
}

double PrgSpec::walk_count() const noexcept {
    return std::ldexp(std::pow(static_cast<double>(graph_->degree()), static_cast<double>(blocks() - 1)),
                      static_cast<int>(k()));
}

double PrgSpec::log2_size() const noexcept {
    return static_cast<double>(k()) +
           static_cast<double>(blocks() - 1) * std::log2(static_cast<double>(graph_->degree()));
}

Matrix PrgSpec::block_values(const std::vector<double>& weights) const {
    if (weights.size() != n_) {
        throw Error(ErrorCode::DimensionMismatch,
                    "expected " + std::to_string(n_) + " weights, got " + std::to_string(weights.size()));
    }
    const unsigned kk = k();
    const auto v = static_cast<Eigen::Index>(graph_->vertices());
    Matrix values(static_cast<Eigen::Index>(blocks()), v);
    for (Eigen::Index j = 0; j < values.rows(); ++j) {
        for (Eigen::Index x = 0; x < v; ++x) {
            double s = 0.0;
            for (unsigned l = 0; l < kk; ++l) {
                s += vertex_label(static_cast<std::size_t>(x), kk, l) * weights[static_cast<std::size_t>(j) * kk + l];
            }
            values(j, x) = s;
        }
    }
    return values;
}

IntMatrix PrgSpec::integer_block_values(const std::vector<std::int64_t>& weights) const {
    if (weights.size() != n_) {
        throw Error(ErrorCode::DimensionMismatch,
                    "expected " + std::to_string(n_) + " weights, got " + std::to_string(weights.size()));
    }
    const unsigned kk = k();
    const auto v = static_cast<Eigen::Index>(graph_->vertices());
    IntMatrix values(static_cast<Eigen::Index>(blocks()), v);
    for (Eigen::Index j = 0; j < values.rows(); ++j) {
        for (Eigen::Index x = 0; x < v; ++x) {
            std::int64_t s = 0;
            for (unsigned l = 0; l < kk; ++l) {
                s += vertex_label(static_cast<std::size_t>(x), kk, l) * weights[static_cast<std::size_t>(j) * kk + l];
            }
            values(j, x) = s;
        }
    }
    return values;
}

namespace {

void check_budget(const PrgSpec& spec, double budget) {
    if (spec.walk_count() > budget) {
        throw Error(ErrorCode::BudgetExceeded, "enumeration needs " + std::to_string(spec.walk_count()) +
                                                   " walks, budget is " + std::to_string(budget));
    }
}

bool all_integers(const std::vector<double>& w) {
    return std::all_of(w.begin(), w.end(), [](double x) { return std::floor(x) == x && std::abs(x) < 1e15; });
}

}  // namespace

std::uint64_t enumerate_walks(const PrgSpec& spec, const std::function<void(std::span<const int8_t>, double)>& emit,
                              double budget) {
    check_budget(spec, budget);
    const ExpanderGraph& g = spec.graph();
    const unsigned k = spec.k();
    const std::size_t blocks = spec.blocks();
    const double weight = 1.0 / spec.walk_count();
    std::vector<int8_t> signs(spec.n());
    std::vector<std::size_t> vertex(blocks);
    std::vector<std::size_t> edge(blocks, 0);
    const auto write_block = [&](std::size_t j, std::size_t v) {
        for (unsigned l = 0; l < k; ++l) signs[j * k + l] = static_cast<int8_t>(vertex_label(v, k, l));
    };
    std::uint64_t count = 0;
    for (std::size_t start = 0; start < g.vertices(); ++start) {
        vertex[0] = start;
        write_block(0, start);
        if (blocks == 1) {
            emit(signs, weight);
            ++count;
            continue;
        }
        std::size_t level = 1;
        edge[1] = 0;
        while (level > 0) {
            if (edge[level] == g.degree()) {
                --level;
                continue;
            }
            const std::size_t v = g.neighbor(vertex[level - 1], edge[level]++);
            vertex[level] = v;
            write_block(level, v);
            if (level + 1 == blocks) {
                emit(signs, weight);
                ++count;
            } else {
                ++level;
                edge[level] = 0;
            }
        }
    }
    return count;
}

unsigned prg_k_for(std::size_t n) {
    auto k = static_cast<unsigned>(std::ceil(std::sqrt(static_cast<double>(n))));
    while (static_cast<std::size_t>(k) * k < n) ++k;
    while (k > 1 && static_cast<std::size_t>(k - 1) * (k - 1) >= n) --k;
    if (k % 2 != 0) ++k;
    return std::max(k, 2u);
}

std::vector<double> pad_to_multiple(std::vector<double> weights, std::size_t k) {
    if (k == 0) return weights;
    while (weights.size() % k != 0) weights.push_back(0.0);
    return weights;
}

void check_prg_weights(const std::vector<double>& weights, std::size_t padding) {
    const std::size_t checked = weights.size() - std::min(padding, weights.size());
    for (std::size_t i = 0; i < checked; ++i) {
        if (!(weights[i] >= 1.0)) {
            throw Error(ErrorCode::HypothesisViolated,
                        "weight " + std::to_string(i) + " = " + std::to_string(weights[i]) + " is below 1");
        }
    }
    for (std::size_t i = checked; i < weights.size(); ++i) {
        if (weights[i] != 0.0) throw Error(ErrorCode::HypothesisViolated, "padding weights must be zero");
    }
}

double prg_smallball_exact(const PrgSpec& spec, const std::vector<double>& weights, double x0, double radius,
                           std::size_t padding, double budget, kernels::Backend backend) {
    check_prg_weights(weights, padding);
    check_budget(spec, budget);
    std::uint64_t hits = 0;
    std::uint64_t total = 0;
    if (all_integers(weights)) {
        std::vector<std::int64_t> ints(weights.begin(), weights.end());
        const IntMatrix values = spec.integer_block_values(ints);
        std::int64_t span = 0;
        for (const auto w : ints) span += std::abs(w);
        const auto counts = kernels::walk_lattice_counts(backend, spec.graph().walk_graph(), values, -span,
                                                         static_cast<std::size_t>(2 * span + 1));
        for (std::size_t i = 0; i < counts.size(); ++i) {
            total += counts[i];
            const double s = static_cast<double>(static_cast<std::int64_t>(i) - span);
            if (std::abs(s - x0) <= radius) hits += counts[i];
        }
    } else {
        for (const auto& [s, c] : kernels::walk_value_counts(backend, spec.graph().walk_graph(), spec.block_values(weights))) {
            total += c;
            if (std::abs(s - x0) <= radius) hits += c;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

McEstimate prg_smallball_sampled(const PrgSpec& spec, const std::vector<double>& weights, double x0, double radius,
                                 std::uint64_t count, std::uint64_t seed, std::size_t padding,
                                 kernels::Backend backend) {
    check_prg_weights(weights, padding);
    const Matrix values = spec.block_values(weights);
    return McEstimate::from_counts(
        kernels::count_walk_hits(backend, spec.graph().walk_graph(), values, x0, radius, count, seed), count, seed);
}

SumDistribution prg_distribution(const PrgSpec& spec, const std::vector<std::int64_t>& weights, double budget,
                                 kernels::Backend backend) {
    check_budget(spec, budget);
    const IntMatrix values = spec.integer_block_values(weights);
    std::int64_t span = 0;
    for (const auto w : weights) span += std::abs(w);
    const auto counts = kernels::walk_lattice_counts(backend, spec.graph().walk_graph(), values, -span,
                                                     static_cast<std::size_t>(2 * span + 1));
    const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
    std::size_t first = 0;
    while (first + 1 < counts.size() && counts[first] == 0) ++first;
    std::size_t last = counts.size() - 1;
    while (last > first && counts[last] == 0) --last;
    SumDistribution out;
    out.offset = static_cast<std::int64_t>(first) - span;
    out.span = span;
    for (std::size_t i = first; i <= last; ++i) out.masses.push_back(static_cast<double>(counts[i]) / total);
    return out;
}

}  // namespace smallball
