#include "carleson/tree.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <string>

namespace carleson {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::size: return "size";
    case ErrorCode::shape_mismatch: return "shape_mismatch";
    case ErrorCode::invalid_node: return "invalid_node";
    case ErrorCode::domain: return "domain";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::normalization: return "normalization";
    case ErrorCode::parse: return "parse";
    case ErrorCode::validation: return "validation";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

const char* to_string(SupportMode mode) noexcept {
  return mode == SupportMode::boundary_only ? "boundary-only" : "all-nodes";
}

std::size_t env_node_limit() {
  const char* raw = std::getenv("CARLESON_MAX_NODES");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0') return 0;
  return static_cast<std::size_t>(v);
}

TreeShape::TreeShape(int depth)
    : depth_(depth), node_count_((std::size_t{1} << (depth + 1)) - 1) {}

int TreeShape::node_depth(NodeId k) noexcept {
  return static_cast<int>(std::bit_width(k)) - 1;
}

double TreeShape::length(NodeId k) noexcept {
  return std::ldexp(1.0, -node_depth(k));
}

bool TreeShape::is_ancestor_or_self(NodeId a, NodeId b) noexcept {
  int da = node_depth(a);
  int db = node_depth(b);
  return db >= da && (b >> (db - da)) == a;
}

void TreeShape::check_node(NodeId k) const {
  if (!contains(k)) {
    fail(ErrorCode::invalid_node, "node " + std::to_string(k) + " outside tree of depth " +
                                      std::to_string(depth_));
  }
}

TreeShape build_tree(int depth, int max_depth) {
  if (depth < 0) fail(ErrorCode::size, "tree depth must be nonnegative");
  if (depth > 40) fail(ErrorCode::size, "tree depth " + std::to_string(depth) + " exceeds hard limit 40");
  std::size_t limit = env_node_limit();
  std::size_t nodes = (std::size_t{1} << (depth + 1)) - 1;
  if (limit != 0) {
    if (nodes > limit) {
      fail(ErrorCode::size, "tree with " + std::to_string(nodes) + " nodes exceeds CARLESON_MAX_NODES=" +
                                std::to_string(limit));
    }
  } else if (depth > max_depth) {
    fail(ErrorCode::size, "tree depth " + std::to_string(depth) + " exceeds maximum " +
                              std::to_string(max_depth));
  }
  return TreeShape(depth);
}

NodeVector::NodeVector(const TreeShape& shape, double fill)
    : shape_(shape), values_(shape.node_count(), fill) {}

NodeVector::NodeVector(const TreeShape& shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.node_count()) {
    fail(ErrorCode::shape_mismatch, "expected " + std::to_string(shape_.node_count()) +
                                        " node values, got " + std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      fail(ErrorCode::validation, "non-finite value at node " + std::to_string(i + 1));
    }
  }
}

double NodeVector::at(NodeId k) const {
  shape_.check_node(k);
  return values_[k - 1];
}

TreeMeasure::TreeMeasure(const TreeShape& shape, std::vector<double> masses, SupportMode mode)
    : masses_(shape, std::move(masses)), mode_(mode) {
  for (NodeId k = 1; k <= shape.node_count(); ++k) {
    double m = masses_[k];
    if (m < 0.0) {
      fail(ErrorCode::validation, "negative mass " + std::to_string(m) + " at node " + std::to_string(k));
    }
    if (mode == SupportMode::boundary_only && !shape.is_leaf(k) && m != 0.0) {
      fail(ErrorCode::validation, "boundary-only measure has mass at interior node " + std::to_string(k));
    }
  }
}

TreeMeasure TreeMeasure::zero(const TreeShape& shape, SupportMode mode) {
  return TreeMeasure(shape, std::vector<double>(shape.node_count(), 0.0), mode);
}

TreeMeasure TreeMeasure::uniform_boundary(const TreeShape& shape, double total) {
  std::vector<double> m(shape.node_count(), 0.0);
  double each = total / static_cast<double>(shape.leaf_count());
  for (NodeId k = shape.first_leaf(); k <= shape.node_count(); ++k) m[k - 1] = each;
  return TreeMeasure(shape, std::move(m), SupportMode::boundary_only);
}

TreeMeasure TreeMeasure::point_mass(const TreeShape& shape, NodeId node, double mass) {
  shape.check_node(node);
  std::vector<double> m(shape.node_count(), 0.0);
  m[node - 1] = mass;
  return TreeMeasure(shape, std::move(m),
                     shape.is_leaf(node) ? SupportMode::boundary_only : SupportMode::all_nodes);
}

double TreeMeasure::total() const { return hardy_down(*this)[1]; }

TreeMeasure TreeMeasure::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    fail(ErrorCode::invalid_argument, "measure scale factor must be finite and nonnegative");
  }
  std::vector<double> m(masses_.values().begin(), masses_.values().end());
  for (double& x : m) x *= factor;
  return TreeMeasure(shape(), std::move(m), mode_);
}

NodeVector hardy_up(const NodeVector& phi) {
  NodeVector out = phi;
  for (NodeId k = 2; k <= out.size(); ++k) out[k] += out[k / 2];
  return out;
}

NodeVector hardy_down(const NodeVector& phi) {
  NodeVector out = phi;
  for (NodeId k = out.size(); k >= 2; --k) out[k / 2] += out[k];
  return out;
}

NodeVector hardy_down(const TreeMeasure& mu) { return hardy_down(mu.masses()); }

NodeVector potential(const TreeMeasure& mu) { return hardy_up(hardy_down(mu)); }

double box_integral(const NodeVector& v, NodeId node) {
  v.shape().check_node(node);
  // Subtree sum without materializing the full hardy_down vector.
  double sum = 0.0;
  std::size_t width = 1;
  for (NodeId first = node; first <= v.size(); first *= 2, width *= 2) {
    for (std::size_t i = 0; i < width; ++i) sum += v[first + i];
  }
  return sum;
}

double box_integral(const TreeMeasure& mu, NodeId node) { return box_integral(mu.masses(), node); }

double box_average(const NodeVector& v, NodeId node) {
  return box_integral(v, node) / TreeShape::length(node);
}

double box_average(const TreeMeasure& mu, NodeId node) { return box_average(mu.masses(), node); }

double dot(const NodeVector& a, const NodeVector& b) {
  require_same_shape(a.shape(), b.shape(), "dot");
  double s = 0.0;
  for (NodeId k = 1; k <= a.size(); ++k) s += a[k] * b[k];
  return s;
}

void require_same_shape(const TreeShape& a, const TreeShape& b, const char* what) {
  if (!(a == b)) {
    fail(ErrorCode::shape_mismatch, std::string(what) + ": tree depths differ (" +
                                        std::to_string(a.depth()) + " vs " + std::to_string(b.depth()) + ")");
  }
}

}  // namespace carleson
