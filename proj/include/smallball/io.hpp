#pragma once

// File formats: chain and weight JSON, distribution CSV, graph JSON. Parse
// errors name the offending JSON path.

#include "smallball/chain.hpp"
#include "smallball/prg.hpp"
#include "smallball/transfer.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace smallball::io {

/// Whole file as text; ConfigError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// ConfigError when it cannot be written.
void write_file(const std::filesystem::path& path, const std::string& text);

struct ChainDocument {
    MarkovChain chain;
    /// rows[j][y] = f_j(y) when the document carries "signs"
    std::optional<std::vector<std::vector<int>>> signs;
};

/// {"n_states": N, "transition": [[...]...], "stationary": [...]?, "signs": [[...]...]?}
ChainDocument parse_chain(const std::string& text);
ChainDocument load_chain(const std::filesystem::path& path);
std::string chain_to_json(const MarkovChain& chain, const std::vector<std::vector<int>>* signs = nullptr);

/// Array of numbers (d = 1) or array of equal-length arrays.
WeightSystem parse_weights(const std::string& text, WeightVariant variant = WeightVariant::General);
WeightSystem load_weights(const std::filesystem::path& path, WeightVariant variant = WeightVariant::General);
std::string weights_to_json(const WeightSystem& weights);

/// `sum,probability` rows for every lattice point from lowest to highest.
void write_distribution_csv(std::ostream& out, const SumDistribution& dist);
std::string distribution_to_csv(const SumDistribution& dist);
SumDistribution parse_distribution_csv(const std::string& text);

/// {"k": k, "degree": D, "neighbors": [[...] x 2^k], "certified_lambda": x?}
std::string graph_to_json(const ExpanderGraph& graph);
ExpanderGraph parse_graph(const std::string& text);
ExpanderGraph load_graph(const std::filesystem::path& path);

}  // namespace smallball::io
