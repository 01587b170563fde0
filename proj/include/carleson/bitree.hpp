#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carleson/tree.hpp"

namespace carleson {

inline constexpr std::size_t kDefaultMaxRects = std::size_t{1} << 22;

// Dyadic rectangle I_u x J_v, both coordinates in heap numbering.
struct Rect {
  NodeId u = 1;
  NodeId v = 1;
  friend bool operator==(const Rect&, const Rect&) = default;
};

class BiTreeShape {
public:
  BiTreeShape() = default;

  int n() const noexcept { return x_.depth(); }
  int m() const noexcept { return y_.depth(); }
  const TreeShape& x() const noexcept { return x_; }
  const TreeShape& y() const noexcept { return y_; }

  std::size_t rows() const noexcept { return x_.node_count(); }
  std::size_t cols() const noexcept { return y_.node_count(); }
  std::size_t rect_count() const noexcept { return rows() * cols(); }
  std::size_t cell_rows() const noexcept { return x_.leaf_count(); }
  std::size_t cell_cols() const noexcept { return y_.leaf_count(); }
  std::size_t cell_count() const noexcept { return cell_rows() * cell_cols(); }

  std::size_t index(Rect r) const noexcept { return (r.u - 1) * cols() + (r.v - 1); }
  Rect rect(std::size_t index) const noexcept { return {index / cols() + 1, index % cols() + 1}; }
  bool contains(Rect r) const noexcept { return x_.contains(r.u) && y_.contains(r.v); }

  // Boundary cell (i, j), row-major index i * cell_cols() + j.
  Rect cell_rect(std::size_t cell) const noexcept {
    return {x_.first_leaf() + cell / cell_cols(), y_.first_leaf() + cell % cell_cols()};
  }
  std::size_t rect_cell(Rect leaf) const noexcept {
    return (leaf.u - x_.first_leaf()) * cell_cols() + (leaf.v - y_.first_leaf());
  }
  bool is_cell(Rect r) const noexcept { return x_.is_leaf(r.u) && y_.is_leaf(r.v); }

  // |Q| = |I_u| |J_v|
  static double area(Rect r) noexcept { return TreeShape::length(r.u) * TreeShape::length(r.v); }
  // Q <= R componentwise.
  static bool contains_rect(Rect outer, Rect inner) noexcept {
    return TreeShape::is_ancestor_or_self(outer.u, inner.u) && TreeShape::is_ancestor_or_self(outer.v, inner.v);
  }

  // Half-open cell ranges [row0, row1) x [col0, col1) under r.
  struct CellRange {
    std::size_t row0, row1, col0, col1;
  };
  CellRange cell_range(Rect r) const noexcept;

  // Children of r: left/right halves when u is not a leaf, then bottom/top
  // halves when v is not a leaf; 0, 2 or 4 rectangles.
  std::vector<Rect> children(Rect r) const;

  void check_rect(Rect r) const;

  friend bool operator==(const BiTreeShape&, const BiTreeShape&) = default;

private:
  friend BiTreeShape build_bitree(int n, int m, std::size_t max_rects);
  BiTreeShape(TreeShape x, TreeShape y) : x_(x), y_(y) {}

  TreeShape x_;
  TreeShape y_;
};

BiTreeShape build_bitree(int n, int m, std::size_t max_rects = kDefaultMaxRects);

class RectVector {
public:
  RectVector() = default;
  explicit RectVector(const BiTreeShape& shape, double fill = 0.0)
      : shape_(shape), values_(shape.rect_count(), fill) {}

  const BiTreeShape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](Rect r) const noexcept { return values_[shape_.index(r)]; }
  double& operator[](Rect r) noexcept { return values_[shape_.index(r)]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

private:
  BiTreeShape shape_;
  std::vector<double> values_;
};

class BiMeasure {
public:
  BiMeasure() = default;
  BiMeasure(const BiTreeShape& shape, std::vector<double> cell_masses);

  static BiMeasure uniform(const BiTreeShape& shape, double total = 1.0);
  static BiMeasure point_mass(const BiTreeShape& shape, std::size_t cell, double mass = 1.0);

  const BiTreeShape& shape() const noexcept { return shape_; }
  std::span<const double> cells() const noexcept { return cells_; }
  double cell(std::size_t i) const noexcept { return cells_[i]; }
  double total() const noexcept;
  BiMeasure scaled(double factor) const;

private:
  BiTreeShape shape_;
  std::vector<double> cells_;
};

// Values per boundary cell, placed on the leaf rectangles and summed upward:
// out(Q) = sum of cell values under Q. Two leaf-to-root passes.
RectVector rect_sums(const BiTreeShape& shape, std::span<const double> cell_values);
RectVector rect_masses(const BiMeasure& mu);
// out(R) = sum_{Q <= R} in(Q).
RectVector descendant_sums(const RectVector& in);
// out(Q) = sum_{R >= Q} in(R).
RectVector ancestor_sums(const RectVector& in);

class SummedAreaTable {
public:
  SummedAreaTable(const BiTreeShape& shape, std::span<const double> cell_values);
  double sum(std::size_t row0, std::size_t row1, std::size_t col0, std::size_t col1) const noexcept;
  double rect_sum(Rect r) const noexcept;

private:
  BiTreeShape shape_;
  std::size_t stride_ = 0;
  std::vector<double> table_;  // (rows+1) x (cols+1)
};

struct OneBox {
  double constant = 0.0;
  Rect argmax;
  RectVector ratios;
};

// max_R sum_{Q<=R} mu(Q)^2 / mu(R), 0/0 := 0.
OneBox one_box_constant(const BiMeasure& mu);

BiMeasure normalize_one_box(const BiMeasure& mu);

struct CubeCheck {
  double lhs = 0.0;  // sum_Q |Q| (int_Q phi dmu)^2
  double rhs = 0.0;  // int phi^2 dmu
  double ratio = 0.0;
  bool passed = false;  // lhs <= 4 rhs + tol
};

// Requires one_box_constant(mu) <= 1.
CubeCheck cube_embedding_check(const BiMeasure& mu, std::span<const double> phi, double tol = 1e-9);

struct BiCertificateRow {
  Rect rect;
  int children = 0;
  double martingale_error = 0.0;  // max over F, f, v of |x_R - avg x_child|
  double a_gain_margin = 0.0;     // (A_R - avg A_child) - mu(R)^2/|R|
  double row_slack = 0.0;         // |R|^2 B_R - (4/k) sum |child|^2 B_child - |R| (int_R phi)^2 / 4
  double telescope_coefficient = 0.0;
};

struct BiCertificate {
  std::vector<BiCertificateRow> rows;  // rectangle index order
  double worst_martingale = 0.0;
  double worst_a_gain = 0.0;
  double worst_row_slack = 0.0;
  bool martingale_ok = false;
  bool a_gain_ok = false;
  bool rows_ok = false;
  bool coefficients_ok = false;  // root +|R0|^2, every other rectangle <= 0
  double telescoped = 0.0;       // sum of row differences
  double lhs = 0.0;              // sum_R |R| (int_R phi dmu)^2
  double root_bound = 0.0;       // 4 |R0|^2 B(x_R0)
  double final_bound = 0.0;      // 4 |R0|^2 F_R0
  bool global_ok = false;
  bool passed() const { return martingale_ok && a_gain_ok && rows_ok && coefficients_ok && global_ok; }
};

// Per-rectangle Bellman certificate with B = F - f^2/(v+A). Rectangles with a
// leaf coordinate split two ways and boundary cells not at all; the row
// inequality uses the average over the available children.
BiCertificate bitree_bellman_certify(const BiMeasure& mu, std::span<const double> phi, double tol = 1e-12);

enum class SetStrategy { exhaustive, rect_unions, random_subsets };

struct SetTestOptions {
  SetStrategy strategy = SetStrategy::exhaustive;
  int k = 1;                 // rect_unions
  std::size_t trials = 1000;  // random_subsets
  std::uint64_t seed = 1;
};

struct SetTest {
  double constant = 0.0;
  std::vector<std::size_t> witness;  // boundary cells of the maximizing E
  std::uint64_t evaluated = 0;
};

inline constexpr std::size_t kMaxExhaustiveCells = 20;

// sum_{Q : cells(Q) subset of E} mu(Q)^2 / mu(E) for one set E.
double set_ratio(const BiMeasure& mu, const RectVector& masses, const std::vector<char>& in_e);
SetTest set_test_constant(const BiMeasure& mu, const SetTestOptions& opts);

struct BiEmbedding {
  double constant = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Best C in sum_Q (int_Q phi dmu)^2 <= C int phi^2 dmu.
BiEmbedding bi_embedding_constant(const BiMeasure& mu, double tol = 1e-12, int max_iter = 100000);
// sqrt(mu) K sqrt(mu) x over all cells, K_ij = #{Q containing i and j}.
std::vector<double> bi_embedding_apply(const BiMeasure& mu, std::span<const double> x);

enum class GapOptimizer { random, anneal };

struct GapProbeConfig {
  int n = 1;
  int m = 1;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  GapOptimizer optimizer = GapOptimizer::anneal;
  std::size_t restarts = 4;
  double step_scale = 0.7;
  double temperature = 0.05;
  double power_tol = 1e-10;
};

struct GapSample {
  std::size_t step = 0;
  double gap = 0.0;
  double one_box = 0.0;
  double embedding = 0.0;
};

struct GapProbeReport {
  std::vector<GapSample> trajectory;
  double best_gap = 0.0;
  std::vector<double> best_cells;  // empty when no step ran
  std::size_t accepted = 0;
};

GapProbeReport gap_probe(const GapProbeConfig& config);

}  // namespace carleson
