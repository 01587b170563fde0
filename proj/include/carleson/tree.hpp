#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "carleson/error.hpp"

namespace carleson {

// Heap numbering: the root is node 1, node k has children 2k and 2k+1.
using NodeId = std::size_t;

inline constexpr int kDefaultMaxTreeDepth = 20;

// Node budget override read from CARLESON_MAX_NODES; 0 when unset or invalid.
std::size_t env_node_limit();

class TreeShape {
public:
  TreeShape() = default;

  int depth() const noexcept { return depth_; }
  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t leaf_count() const noexcept { return std::size_t{1} << depth_; }
  NodeId first_leaf() const noexcept { return leaf_count(); }

  bool contains(NodeId k) const noexcept { return k >= 1 && k <= node_count_; }
  bool is_leaf(NodeId k) const noexcept { return k >= first_leaf(); }

  static int node_depth(NodeId k) noexcept;
  // |I_k| = 2^-depth(k), with the root interval of unit length.
  static double length(NodeId k) noexcept;

  // True when b lies in the subtree rooted at a (a itself included).
  static bool is_ancestor_or_self(NodeId a, NodeId b) noexcept;

  void check_node(NodeId k) const;

  friend bool operator==(const TreeShape&, const TreeShape&) = default;

private:
  friend TreeShape build_tree(int depth, int max_depth);
  explicit TreeShape(int depth);

  int depth_ = 0;
  std::size_t node_count_ = 1;
};

TreeShape build_tree(int depth, int max_depth = kDefaultMaxTreeDepth);

class NodeVector {
public:
  NodeVector() = default;
  explicit NodeVector(const TreeShape& shape, double fill = 0.0);
  NodeVector(const TreeShape& shape, std::vector<double> values);

  const TreeShape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator[](NodeId k) const noexcept { return values_[k - 1]; }
  double& operator[](NodeId k) noexcept { return values_[k - 1]; }
  double at(NodeId k) const;

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

private:
  TreeShape shape_;
  std::vector<double> values_;
};

enum class SupportMode { all_nodes, boundary_only };

const char* to_string(SupportMode mode) noexcept;

class TreeMeasure {
public:
  TreeMeasure() = default;
  // Validates nonnegativity, finiteness and, for boundary_only, that interior
  // nodes carry no mass.
  TreeMeasure(const TreeShape& shape, std::vector<double> masses, SupportMode mode);

  static TreeMeasure zero(const TreeShape& shape, SupportMode mode);
  static TreeMeasure uniform_boundary(const TreeShape& shape, double total = 1.0);
  static TreeMeasure point_mass(const TreeShape& shape, NodeId node, double mass = 1.0);

  const TreeShape& shape() const noexcept { return masses_.shape(); }
  SupportMode support_mode() const noexcept { return mode_; }
  const NodeVector& masses() const noexcept { return masses_; }
  double operator[](NodeId k) const noexcept { return masses_[k]; }
  double total() const;

  TreeMeasure scaled(double factor) const;

private:
  NodeVector masses_;
  SupportMode mode_ = SupportMode::all_nodes;
};

// (I phi)(a): sum of phi over a and its ancestors.
NodeVector hardy_up(const NodeVector& phi);
// (I* phi)(a): sum of phi over the subtree rooted at a.
NodeVector hardy_down(const NodeVector& phi);
NodeVector hardy_down(const TreeMeasure& mu);
// V^mu = I I* mu.
NodeVector potential(const TreeMeasure& mu);

double box_integral(const NodeVector& v, NodeId node);
double box_integral(const TreeMeasure& mu, NodeId node);
double box_average(const NodeVector& v, NodeId node);
double box_average(const TreeMeasure& mu, NodeId node);

// Pointwise helpers shared by the higher modules.
double dot(const NodeVector& a, const NodeVector& b);
void require_same_shape(const TreeShape& a, const TreeShape& b, const char* what);

}  // namespace carleson
