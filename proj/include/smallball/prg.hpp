#pragma once

// Expander-walk sign sets: a degree-8 Margulis-Gabber-Galil graph on 2^k
// vertices, labeled by k-bit sign strings, and the multiset of label
// concatenations along walks of n/k vertices.

#include "smallball/chain.hpp"
#include "smallball/kernels.hpp"
#include "smallball/sampler.hpp"
#include "smallball/transfer.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace smallball {

/// Regular multigraph stored as neighbor slots: neighbors[v * degree + e].
class ExpanderGraph {
public:
    /// Validates slot ranges and symmetry of the edge multiset (NotRegular).
    ExpanderGraph(std::size_t vertices, std::size_t degree, std::vector<std::uint32_t> neighbors);

    [[nodiscard]] std::size_t vertices() const noexcept { return vertices_; }
    [[nodiscard]] std::size_t degree() const noexcept { return degree_; }
    /// log2 of the vertex count; 0 when it is not a power of two.
    [[nodiscard]] unsigned k() const noexcept { return k_; }
    [[nodiscard]] std::uint32_t neighbor(std::size_t v, std::size_t e) const noexcept {
        return neighbors_[v * degree_ + e];
    }
    [[nodiscard]] const std::vector<std::uint32_t>& neighbors() const noexcept { return neighbors_; }
    [[nodiscard]] kernels::WalkGraph walk_graph() const noexcept { return {vertices_, degree_, neighbors_}; }

    /// Normalized adjacency matrix (edge multiplicities divided by the degree).
    [[nodiscard]] Matrix normalized_adjacency() const;

    [[nodiscard]] const std::optional<double>& certified_lambda() const noexcept { return certified_; }
    void set_certified_lambda(double lam) noexcept { certified_ = lam; }

private:
    std::size_t vertices_;
    std::size_t degree_;
    unsigned k_ = 0;
    std::vector<std::uint32_t> neighbors_;
    std::optional<double> certified_;
};

/// Degree-8 graph on Z_m x Z_m, m = 2^(k/2), with the maps
/// (x +- 2y, y), (x +- (2y + 1), y), (x, y +- 2x), (x, y +- (2x + 1)).
/// Vertex (x, y) has index x * m + y. Throws OddK for odd k, OutOfRange for k < 2
/// or k > 24.
ExpanderGraph build_mgg_expander(unsigned k);

/// Vertex count allowed for dense certification.
inline constexpr std::size_t certification_budget = std::size_t{1} << 14;

/// ||A - J|| on L2(uniform) by dense symmetric eigendecomposition; stores the
/// result on the graph. TooLarge beyond the budget.
double certify_lambda(ExpanderGraph& graph, std::size_t budget = certification_budget);

/// Lanczos estimate of ||A - J|| (full reorthogonalization, start vector
/// orthogonal to the constants). Not a certificate: Ritz values can only
/// approach the extreme eigenvalues from inside the spectrum.
double estimate_lambda_lanczos(const ExpanderGraph& graph, std::size_t iterations = 300, std::uint64_t seed = 1);

/// The simple random walk: normalized adjacency with uniform stationary law.
MarkovChain walk_chain(const ExpanderGraph& graph);

/// +1 / -1 label of bit `bit` (0 = most significant) of vertex v in a k-bit code.
inline int vertex_label(std::size_t v, unsigned k, unsigned bit) noexcept {
    return ((v >> (k - 1 - bit)) & 1u) != 0 ? -1 : 1;
}

class PrgSpec {
public:
    /// Requires k | n (PreconditionViolated) and a power-of-two vertex count.
    PrgSpec(std::shared_ptr<const ExpanderGraph> graph, std::size_t n);

    [[nodiscard]] const ExpanderGraph& graph() const noexcept { return *graph_; }
    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] unsigned k() const noexcept { return graph_->k(); }
    [[nodiscard]] std::size_t blocks() const noexcept { return n_ / graph_->k(); }
    /// Number of walks: 2^k * degree^(blocks - 1), as a double.
    [[nodiscard]] double walk_count() const noexcept;
    /// log2 of the walk count.
    [[nodiscard]] double log2_size() const noexcept;

    /// values(j, v): the sum of block j's weights signed by vertex v's label.
    [[nodiscard]] Matrix block_values(const std::vector<double>& weights) const;
    [[nodiscard]] IntMatrix integer_block_values(const std::vector<std::int64_t>& weights) const;

private:
    std::shared_ptr<const ExpanderGraph> graph_;
    std::size_t n_;
};

/// Default enumeration budget (walks).
inline constexpr double walk_budget = 1e8;

/// Calls emit(signs, weight) once per walk, in start-vertex then edge order.
/// Weights are uniform and sum to 1. Returns the number of walks.
std::uint64_t enumerate_walks(const PrgSpec& spec,
                              const std::function<void(std::span<const int8_t>, double)>& emit,
                              double budget = walk_budget);

/// Smallest even k >= sqrt(n).
unsigned prg_k_for(std::size_t n);

/// Weights padded with zeros up to a multiple of k.
std::vector<double> pad_to_multiple(std::vector<double> weights, std::size_t k);

/// Checks v_i >= 1 for all but the trailing `padding` entries (HypothesisViolated).
void check_prg_weights(const std::vector<double>& weights, std::size_t padding = 0);

/// Exact probability under the uniform walk measure that the signed sum lies
/// within radius of x0: integer hit count over walk count.
double prg_smallball_exact(const PrgSpec& spec, const std::vector<double>& weights, double x0, double radius,
                           std::size_t padding = 0, double budget = walk_budget,
                           kernels::Backend backend = kernels::Backend::OpenMP);

McEstimate prg_smallball_sampled(const PrgSpec& spec, const std::vector<double>& weights, double x0, double radius,
                                 std::uint64_t count, std::uint64_t seed, std::size_t padding = 0,
                                 kernels::Backend backend = kernels::Backend::OpenMP);

/// Exact law of the signed sum for integer weights under the walk measure.
SumDistribution prg_distribution(const PrgSpec& spec, const std::vector<std::int64_t>& weights,
                                 double budget = walk_budget, kernels::Backend backend = kernels::Backend::OpenMP);

}  // namespace smallball
