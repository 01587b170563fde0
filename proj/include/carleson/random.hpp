#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "carleson/bitree.hpp"
#include "carleson/tree.hpp"

namespace carleson {

// Independent per-trial seed from a base seed (splitmix64 finalizer).
std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) noexcept;

// Random nonnegative masses drawn from a mixture of families (uniform,
// exponential, log-normal, sparse spikes, single point mass) so that both
// flat and highly concentrated measures show up.
TreeMeasure random_tree_measure(const TreeShape& shape, SupportMode mode, std::mt19937_64& rng);
BiMeasure random_bimeasure(const BiTreeShape& shape, std::mt19937_64& rng);

// Test functions: nonnegative (heavy-tailed, occasionally sparse) or signed Gaussian.
NodeVector random_node_function(const TreeShape& shape, bool nonnegative, std::mt19937_64& rng);
std::vector<double> random_cell_function(std::size_t cells, bool nonnegative, std::mt19937_64& rng);

}  // namespace carleson
