#pragma once

// Seeded random instance families. Instance i of a family is a pure function
// of (seed, i), so any single failing instance can be regenerated on its own.

#include "smallball/chain.hpp"
#include "smallball/oracles.hpp"
#include "smallball/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace smallball {

/// Bumped whenever a generator changes the instances it produces.
inline constexpr int instance_generator_version = 1;

/// Metropolis chain for a random full-support stationary law, mixed with the
/// identity or the averaging operator by a random amount.
MarkovChain random_reversible_chain(std::size_t n_states, CounterRng& rng);

struct BalancedChain {
    MarkovChain chain;
    /// f with E_mu[f] = 0
    std::vector<int> labeling;
};

/// Chain on 2..4 states whose stationary law splits into two halves of mass
/// 1/2, with the matching mean-zero labeling and spectral parameter equal to
/// `lambda` (in [0, 0.9]) up to rounding.
BalancedChain balanced_chain_with_lambda(std::size_t n_states, double lambda, std::uint64_t seed,
                                         std::uint64_t index);

struct IntegerInstance {
    std::string id;
    MarkovChain chain;
    SignSystem signs;
    WeightSystem weights;
};

/// 1..max_states states, 1..max_steps steps, random labelings, integer weights
/// in [1, max_weight].
IntegerInstance random_integer_instance(std::uint64_t seed, std::uint64_t index, std::size_t max_states = 4,
                                        std::size_t max_steps = 8, int max_weight = 5);

/// T_j = A - (1-lam) E for a random reversible A with lam its spectral
/// parameter; unimodular u_j. 2..max_states states, 1..max_k blocks.
HolderInstance random_holder_instance(std::uint64_t seed, std::uint64_t index, std::size_t max_states = 6,
                                      std::size_t max_k = 6);

struct AveragingInstance {
    Vector mu;
    CVector u;
    std::vector<Matrix> r;
    HolderInstance product;
};

/// Random full-support mu, |u_i| <= 1, real R_i, and arbitrary real T_j with
/// |u_j| <= 1. 2..max_states states, 1..max_k factors.
AveragingInstance random_averaging_instance(std::uint64_t seed, std::uint64_t index, std::size_t max_states = 8,
                                            std::size_t max_k = 5);

/// n independent uniform unit vectors in R^d.
WeightSystem random_unit_weights(std::size_t n, std::size_t d, std::uint64_t seed);

}  // namespace smallball
