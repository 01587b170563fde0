#include "carleson/random.hpp"

#include <cmath>

namespace carleson {

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) noexcept {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

std::vector<double> random_masses(std::size_t count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> out(count, 0.0);
  int family = static_cast<int>(unit(rng) * 5.0);
  switch (family) {
    case 0:
      for (auto& x : out) x = unit(rng);
      break;
    case 1:
      for (auto& x : out) x = expo(rng);
      break;
    case 2:
      for (auto& x : out) x = std::exp(2.0 * gauss(rng));
      break;
    case 3: {
      double keep = 0.05 + 0.3 * unit(rng);
      for (auto& x : out) x = unit(rng) < keep ? expo(rng) : 0.0;
      break;
    }
    default:
      out[static_cast<std::size_t>(unit(rng) * static_cast<double>(count)) % count] = 1.0 + expo(rng);
      break;
  }
  bool any = false;
  for (double x : out) any = any || x > 0.0;
  if (!any) out[static_cast<std::size_t>(unit(rng) * static_cast<double>(count)) % count] = 1.0;
  return out;
}

}  // namespace

TreeMeasure random_tree_measure(const TreeShape& shape, SupportMode mode, std::mt19937_64& rng) {
  std::vector<double> masses(shape.node_count(), 0.0);
  if (mode == SupportMode::boundary_only) {
    auto leaves = random_masses(shape.leaf_count(), rng);
    for (std::size_t i = 0; i < leaves.size(); ++i) masses[shape.first_leaf() - 1 + i] = leaves[i];
  } else {
    masses = random_masses(shape.node_count(), rng);
  }
  return TreeMeasure(shape, std::move(masses), mode);
}

BiMeasure random_bimeasure(const BiTreeShape& shape, std::mt19937_64& rng) {
  return BiMeasure(shape, random_masses(shape.cell_count(), rng));
}

std::vector<double> random_cell_function(std::size_t cells, bool nonnegative, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> out(cells);
  if (!nonnegative) {
    for (auto& x : out) x = gauss(rng);
    return out;
  }
  double keep = unit(rng) < 0.5 ? 1.0 : 0.1 + 0.5 * unit(rng);
  for (auto& x : out) x = unit(rng) < keep ? std::exp(1.5 * gauss(rng)) : 0.0;
  return out;
}

NodeVector random_node_function(const TreeShape& shape, bool nonnegative, std::mt19937_64& rng) {
  return NodeVector(shape, random_cell_function(shape.node_count(), nonnegative, rng));
}

}  // namespace carleson
