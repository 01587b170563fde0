#include "carleson/bitree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "carleson/power_iteration.hpp"

namespace carleson {

BiTreeShape::CellRange BiTreeShape::cell_range(Rect r) const noexcept {
  int du = TreeShape::node_depth(r.u);
  int dv = TreeShape::node_depth(r.v);
  std::size_t wu = std::size_t{1} << (n() - du);
  std::size_t wv = std::size_t{1} << (m() - dv);
  std::size_t r0 = (r.u - (std::size_t{1} << du)) * wu;
  std::size_t c0 = (r.v - (std::size_t{1} << dv)) * wv;
  return {r0, r0 + wu, c0, c0 + wv};
}

std::vector<Rect> BiTreeShape::children(Rect r) const {
  std::vector<Rect> out;
  if (!x_.is_leaf(r.u)) {
    out.push_back({2 * r.u, r.v});
    out.push_back({2 * r.u + 1, r.v});
  }
  if (!y_.is_leaf(r.v)) {
    out.push_back({r.u, 2 * r.v});
    out.push_back({r.u, 2 * r.v + 1});
  }
  return out;
}

void BiTreeShape::check_rect(Rect r) const {
  if (!contains(r)) {
    fail(ErrorCode::invalid_node, "rectangle (" + std::to_string(r.u) + "," + std::to_string(r.v) +
                                      ") outside bi-tree (" + std::to_string(n()) + "," + std::to_string(m()) + ")");
  }
}

BiTreeShape build_bitree(int n, int m, std::size_t max_rects) {
  if (n < 0 || m < 0) fail(ErrorCode::size, "bi-tree depths must be nonnegative");
  if (n > 30 || m > 30) fail(ErrorCode::size, "bi-tree depth exceeds hard limit 30");
  std::size_t limit = env_node_limit();
  if (limit == 0) limit = max_rects;
  std::size_t rows = (std::size_t{1} << (n + 1)) - 1;
  std::size_t cols = (std::size_t{1} << (m + 1)) - 1;
  if (rows > limit / cols) {
    fail(ErrorCode::size, "bi-tree (" + std::to_string(n) + "," + std::to_string(m) + ") has more than " +
                              std::to_string(limit) + " rectangles");
  }
  int big = std::numeric_limits<int>::max();
  return BiTreeShape(build_tree(n, big), build_tree(m, big));
}

BiMeasure::BiMeasure(const BiTreeShape& shape, std::vector<double> cell_masses)
    : shape_(shape), cells_(std::move(cell_masses)) {
  if (cells_.size() != shape_.cell_count()) {
    fail(ErrorCode::shape_mismatch, "expected " + std::to_string(shape_.cell_count()) + " cell masses, got " +
                                        std::to_string(cells_.size()));
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (!std::isfinite(cells_[i]) || cells_[i] < 0.0) {
      fail(ErrorCode::validation, "cell " + std::to_string(i) + " (row " + std::to_string(i / shape_.cell_cols()) +
                                      ", col " + std::to_string(i % shape_.cell_cols()) +
                                      "): mass must be finite and nonnegative");
    }
  }
}

BiMeasure BiMeasure::uniform(const BiTreeShape& shape, double total) {
  return BiMeasure(shape, std::vector<double>(shape.cell_count(), total / static_cast<double>(shape.cell_count())));
}

BiMeasure BiMeasure::point_mass(const BiTreeShape& shape, std::size_t cell, double mass) {
  if (cell >= shape.cell_count()) fail(ErrorCode::invalid_node, "cell index out of range");
  std::vector<double> c(shape.cell_count(), 0.0);
  c[cell] = mass;
  return BiMeasure(shape, std::move(c));
}

double BiMeasure::total() const noexcept {
  double s = 0.0;
  for (double c : cells_) s += c;
  return s;
}

BiMeasure BiMeasure::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    fail(ErrorCode::invalid_argument, "measure scale factor must be finite and nonnegative");
  }
  std::vector<double> c = cells_;
  for (double& x : c) x *= factor;
  return BiMeasure(shape_, std::move(c));
}

RectVector descendant_sums(const RectVector& in) {
  const BiTreeShape& s = in.shape();
  RectVector out = in;
  const std::size_t rows = s.rows();
  const std::size_t cols = s.cols();
  for (std::size_t u = rows; u >= 2; --u) {
    for (std::size_t v = 1; v <= cols; ++v) out[Rect{u / 2, v}] += out[Rect{u, v}];
  }
  for (std::size_t u = 1; u <= rows; ++u) {
    for (std::size_t v = cols; v >= 2; --v) out[Rect{u, v / 2}] += out[Rect{u, v}];
  }
  return out;
}

RectVector ancestor_sums(const RectVector& in) {
  const BiTreeShape& s = in.shape();
  RectVector out = in;
  for (std::size_t u = 2; u <= s.rows(); ++u) {
    for (std::size_t v = 1; v <= s.cols(); ++v) out[Rect{u, v}] += out[Rect{u / 2, v}];
  }
  for (std::size_t u = 1; u <= s.rows(); ++u) {
    for (std::size_t v = 2; v <= s.cols(); ++v) out[Rect{u, v}] += out[Rect{u, v / 2}];
  }
  return out;
}

RectVector rect_sums(const BiTreeShape& shape, std::span<const double> cell_values) {
  if (cell_values.size() != shape.cell_count()) {
    fail(ErrorCode::shape_mismatch, "rect_sums: expected one value per boundary cell");
  }
  RectVector leaves(shape);
  for (std::size_t c = 0; c < cell_values.size(); ++c) leaves[shape.cell_rect(c)] = cell_values[c];
  return descendant_sums(leaves);
}

RectVector rect_masses(const BiMeasure& mu) { return rect_sums(mu.shape(), mu.cells()); }

SummedAreaTable::SummedAreaTable(const BiTreeShape& shape, std::span<const double> cell_values)
    : shape_(shape), stride_(shape.cell_cols() + 1), table_((shape.cell_rows() + 1) * stride_, 0.0) {
  if (cell_values.size() != shape.cell_count()) {
    fail(ErrorCode::shape_mismatch, "SummedAreaTable: expected one value per boundary cell");
  }
  for (std::size_t i = 0; i < shape.cell_rows(); ++i) {
    for (std::size_t j = 0; j < shape.cell_cols(); ++j) {
      table_[(i + 1) * stride_ + j + 1] = cell_values[i * shape.cell_cols() + j] + table_[i * stride_ + j + 1] +
                                          table_[(i + 1) * stride_ + j] - table_[i * stride_ + j];
    }
  }
}

double SummedAreaTable::sum(std::size_t row0, std::size_t row1, std::size_t col0, std::size_t col1) const noexcept {
  return table_[row1 * stride_ + col1] - table_[row0 * stride_ + col1] - table_[row1 * stride_ + col0] +
         table_[row0 * stride_ + col0];
}

double SummedAreaTable::rect_sum(Rect r) const noexcept {
  auto range = shape_.cell_range(r);
  return sum(range.row0, range.row1, range.col0, range.col1);
}

OneBox one_box_constant(const BiMeasure& mu) {
  const BiTreeShape& s = mu.shape();
  RectVector mass = rect_masses(mu);
  RectVector sq(s);
  for (std::size_t i = 0; i < mass.size(); ++i) sq[i] = mass[i] * mass[i];
  RectVector num = descendant_sums(sq);
  OneBox out{0.0, Rect{1, 1}, RectVector(s)};
  for (std::size_t i = 0; i < mass.size(); ++i) {
    double r = mass[i] > 0.0 ? num[i] / mass[i] : 0.0;
    out.ratios[i] = r;
    if (r > out.constant) {
      out.constant = r;
      out.argmax = s.rect(i);
    }
  }
  return out;
}

BiMeasure normalize_one_box(const BiMeasure& mu) {
  double c = one_box_constant(mu).constant;
  if (c == 0.0) return mu;
  return mu.scaled(1.0 / c);
}

namespace {

void require_phi(const BiMeasure& mu, std::span<const double> phi, const char* where) {
  if (phi.size() != mu.shape().cell_count()) {
    fail(ErrorCode::shape_mismatch, std::string(where) + ": phi needs one value per boundary cell");
  }
  for (double x : phi) {
    if (!std::isfinite(x)) fail(ErrorCode::validation, std::string(where) + ": phi must be finite");
  }
}

std::string rect_name(Rect r) { return "(" + std::to_string(r.u) + "," + std::to_string(r.v) + ")"; }

void require_one_box(const BiMeasure& mu, const char* where) {
  OneBox ob = one_box_constant(mu);
  if (ob.constant > 1.0 + 1e-12) {
    fail(ErrorCode::normalization, std::string(where) + ": one-box constant " + std::to_string(ob.constant) +
                                       " exceeds 1 at rectangle " + rect_name(ob.argmax) +
                                       "; rescale the measure first");
  }
}

double plain_b(double F, double f, double A, double v) {
  double d = v + A;
  return d > 0.0 ? F - f * f / d : F;
}

}  // namespace

CubeCheck cube_embedding_check(const BiMeasure& mu, std::span<const double> phi, double tol) {
  require_phi(mu, phi, "cube_embedding_check");
  require_one_box(mu, "cube_embedding_check");
  const BiTreeShape& s = mu.shape();
  std::vector<double> w(s.cell_count());
  CubeCheck out;
  for (std::size_t c = 0; c < w.size(); ++c) {
    w[c] = phi[c] * mu.cell(c);
    out.rhs += phi[c] * phi[c] * mu.cell(c);
  }
  RectVector integrals = rect_sums(s, w);
  for (std::size_t i = 0; i < integrals.size(); ++i) {
    out.lhs += BiTreeShape::area(s.rect(i)) * integrals[i] * integrals[i];
  }
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  out.passed = out.lhs <= 4.0 * out.rhs + tol;
  return out;
}

BiCertificate bitree_bellman_certify(const BiMeasure& mu, std::span<const double> phi, double tol) {
  require_phi(mu, phi, "bitree_bellman_certify");
  require_one_box(mu, "bitree_bellman_certify");
  const BiTreeShape& s = mu.shape();
  const std::size_t nrect = s.rect_count();

  std::vector<double> w1(s.cell_count());
  std::vector<double> w2(s.cell_count());
  for (std::size_t c = 0; c < w1.size(); ++c) {
    w1[c] = phi[c] * mu.cell(c);
    w2[c] = phi[c] * w1[c];
  }
  RectVector mass = rect_masses(mu);
  RectVector int1 = rect_sums(s, w1);
  RectVector int2 = rect_sums(s, w2);
  RectVector sq(s);
  for (std::size_t i = 0; i < nrect; ++i) sq[i] = mass[i] * mass[i];
  RectVector a_num = descendant_sums(sq);

  std::vector<double> F(nrect), f(nrect), A(nrect), v(nrect), B(nrect);
  for (std::size_t i = 0; i < nrect; ++i) {
    double area = BiTreeShape::area(s.rect(i));
    F[i] = int2[i] / area;
    f[i] = int1[i] / area;
    v[i] = mass[i] / area;
    A[i] = a_num[i] / area;
    if (A[i] > v[i] + tol * std::max(1.0, v[i])) {
      fail(ErrorCode::normalization, "bitree_bellman_certify: A > v at rectangle " + rect_name(s.rect(i)));
    }
    B[i] = plain_b(F[i], f[i], A[i], v[i]);
  }

  // Telescoping weights: sum_R |R|^2 (B_R - avg_children B) puts coefficient
  // |Q|^2 - sum_{parents P} |P|^2 / k(P) on B_Q.
  std::vector<double> coef(nrect, 0.0);
  for (std::size_t i = 0; i < nrect; ++i) {
    Rect r = s.rect(i);
    double area = BiTreeShape::area(r);
    coef[i] += area * area;
    auto kids = s.children(r);
    for (Rect q : kids) coef[s.index(q)] -= area * area / static_cast<double>(kids.size());
  }

  BiCertificate cert;
  cert.rows.reserve(nrect);
  cert.martingale_ok = cert.a_gain_ok = cert.rows_ok = cert.coefficients_ok = true;
  cert.worst_a_gain = cert.worst_row_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nrect; ++i) {
    Rect r = s.rect(i);
    double area = BiTreeShape::area(r);
    auto kids = s.children(r);
    double k = static_cast<double>(kids.size());
    double avgF = 0.0, avgf = 0.0, avgv = 0.0, avgA = 0.0, avgB = 0.0;
    for (Rect q : kids) {
      std::size_t j = s.index(q);
      avgF += F[j];
      avgf += f[j];
      avgv += v[j];
      avgA += A[j];
      avgB += B[j];
    }
    if (!kids.empty()) {
      avgF /= k;
      avgf /= k;
      avgv /= k;
      avgA /= k;
      avgB /= k;
    }
    BiCertificateRow row;
    row.rect = r;
    row.children = static_cast<int>(kids.size());
    if (!kids.empty()) {
      double e = std::max({std::abs(F[i] - avgF) / std::max(1.0, std::abs(F[i])),
                           std::abs(f[i] - avgf) / std::max(1.0, std::abs(f[i])),
                           std::abs(v[i] - avgv) / std::max(1.0, std::abs(v[i]))});
      row.martingale_error = e;
      cert.worst_martingale = std::max(cert.worst_martingale, e);
      if (e > tol) cert.martingale_ok = false;
    }
    double gain_needed = mass[i] * mass[i] / area;
    row.a_gain_margin = (A[i] - avgA) - gain_needed;
    cert.worst_a_gain = std::min(cert.worst_a_gain, row.a_gain_margin);
    if (row.a_gain_margin < -tol * std::max(1.0, A[i])) cert.a_gain_ok = false;

    double diff = area * area * (B[i] - avgB);
    double target = 0.25 * area * int1[i] * int1[i];
    row.row_slack = diff - target;
    cert.worst_row_slack = std::min(cert.worst_row_slack, row.row_slack);
    double scale = std::max({1.0, area * area * std::abs(F[i]), target});
    if (row.row_slack < -tol * scale) cert.rows_ok = false;

    row.telescope_coefficient = coef[i];
    bool is_root = r.u == 1 && r.v == 1;
    if (is_root ? coef[i] != 1.0 : coef[i] > 0.0) cert.coefficients_ok = false;

    cert.telescoped += diff;
    cert.lhs += area * int1[i] * int1[i];
    cert.rows.push_back(row);
  }
  cert.root_bound = 4.0 * B[0];
  cert.final_bound = 4.0 * F[0];
  double slack = 1e-9 * std::max(1.0, cert.final_bound);
  cert.global_ok = cert.lhs <= 4.0 * cert.telescoped + slack && cert.telescoped <= B[0] + slack &&
                   cert.root_bound <= cert.final_bound + slack && cert.lhs <= cert.final_bound + slack;
  return cert;
}

double set_ratio(const BiMeasure& mu, const RectVector& masses, const std::vector<char>& in_e) {
  const BiTreeShape& s = mu.shape();
  std::vector<char> inside(s.rect_count(), 0);
  double num = 0.0;
  for (std::size_t u = s.rows(); u >= 1; --u) {
    for (std::size_t v = s.cols(); v >= 1; --v) {
      Rect r{u, v};
      char c;
      if (s.is_cell(r)) {
        c = in_e[s.rect_cell(r)];
      } else if (!s.x().is_leaf(u)) {
        c = inside[s.index({2 * u, v})] && inside[s.index({2 * u + 1, v})];
      } else {
        c = inside[s.index({u, 2 * v})] && inside[s.index({u, 2 * v + 1})];
      }
      std::size_t i = s.index(r);
      inside[i] = c;
      if (c) num += masses[i] * masses[i];
    }
  }
  double me = 0.0;
  for (std::size_t c = 0; c < in_e.size(); ++c) {
    if (in_e[c]) me += mu.cell(c);
  }
  return me > 0.0 ? num / me : 0.0;
}

namespace {

struct SetSearch {
  const BiMeasure& mu;
  RectVector masses;
  SetTest best;

  void offer(const std::vector<char>& in_e) {
    double r = set_ratio(mu, masses, in_e);
    ++best.evaluated;
    if (r > best.constant) {
      best.constant = r;
      best.witness.clear();
      for (std::size_t c = 0; c < in_e.size(); ++c) {
        if (in_e[c]) best.witness.push_back(c);
      }
    }
  }
};

void mark_rect(const BiTreeShape& s, Rect r, std::vector<char>& in_e) {
  auto range = s.cell_range(r);
  for (std::size_t i = range.row0; i < range.row1; ++i) {
    for (std::size_t j = range.col0; j < range.col1; ++j) in_e[i * s.cell_cols() + j] = 1;
  }
}

void unions_from(SetSearch& search, const BiTreeShape& s, std::size_t start, int remaining,
                 std::vector<std::size_t>& chosen) {
  for (std::size_t i = start; i < s.rect_count(); ++i) {
    chosen.push_back(i);
    std::vector<char> in_e(s.cell_count(), 0);
    for (std::size_t idx : chosen) mark_rect(s, s.rect(idx), in_e);
    search.offer(in_e);
    if (remaining > 1) unions_from(search, s, i + 1, remaining - 1, chosen);
    chosen.pop_back();
  }
}

double binomial_count(std::size_t n, int k) {
  double total = 0.0;
  double c = 1.0;
  for (int j = 1; j <= k; ++j) {
    c = c * static_cast<double>(n - j + 1) / j;
    total += c;
  }
  return total;
}

}  // namespace

SetTest set_test_constant(const BiMeasure& mu, const SetTestOptions& opts) {
  const BiTreeShape& s = mu.shape();
  SetSearch search{mu, rect_masses(mu), {}};
  switch (opts.strategy) {
    case SetStrategy::exhaustive: {
      if (s.cell_count() > kMaxExhaustiveCells) {
        fail(ErrorCode::size, "exhaustive set test limited to " + std::to_string(kMaxExhaustiveCells) +
                                  " boundary cells, shape has " + std::to_string(s.cell_count()));
      }
      std::vector<char> in_e(s.cell_count(), 0);
      const std::uint64_t subsets = std::uint64_t{1} << s.cell_count();
      for (std::uint64_t mask = 1; mask < subsets; ++mask) {
        for (std::size_t c = 0; c < in_e.size(); ++c) in_e[c] = static_cast<char>((mask >> c) & 1U);
        search.offer(in_e);
      }
      break;
    }
    case SetStrategy::rect_unions: {
      if (opts.k < 1) fail(ErrorCode::invalid_argument, "rect_unions needs k >= 1");
      if (binomial_count(s.rect_count(), opts.k) > 5e6) {
        fail(ErrorCode::size, "rect_unions: too many rectangle combinations for k = " + std::to_string(opts.k));
      }
      std::vector<std::size_t> chosen;
      unions_from(search, s, 0, opts.k, chosen);
      break;
    }
    case SetStrategy::random_subsets: {
      std::mt19937_64 rng(opts.seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::vector<char> in_e(s.cell_count(), 0);
      for (std::size_t t = 0; t < opts.trials; ++t) {
        double p = unit(rng);
        for (auto& c : in_e) c = static_cast<char>(unit(rng) < p);
        search.offer(in_e);
      }
      break;
    }
  }
  return search.best;
}

std::vector<double> bi_embedding_apply(const BiMeasure& mu, std::span<const double> x) {
  const BiTreeShape& s = mu.shape();
  if (x.size() != s.cell_count()) fail(ErrorCode::shape_mismatch, "bi_embedding_apply: wrong vector length");
  std::vector<double> w(s.cell_count());
  for (std::size_t c = 0; c < w.size(); ++c) w[c] = std::sqrt(mu.cell(c)) * x[c];
  RectVector up = ancestor_sums(rect_sums(s, w));
  std::vector<double> out(s.cell_count());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = std::sqrt(mu.cell(c)) * up[s.cell_rect(c)];
  return out;
}

BiEmbedding bi_embedding_constant(const BiMeasure& mu, double tol, int max_iter) {
  if (!(tol > 0.0)) fail(ErrorCode::invalid_argument, "power iteration tolerance must be positive");
  if (max_iter < 1) fail(ErrorCode::invalid_argument, "max_iter must be at least 1");
  const BiTreeShape& s = mu.shape();
  std::vector<std::size_t> support;
  for (std::size_t c = 0; c < s.cell_count(); ++c) {
    if (mu.cell(c) > 0.0) support.push_back(c);
  }
  std::vector<double> root(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) root[i] = std::sqrt(mu.cell(support[i]));
  std::vector<double> w(s.cell_count(), 0.0);
  auto apply = [&](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < support.size(); ++i) w[support[i]] = root[i] * x[i];
    RectVector up = ancestor_sums(rect_sums(s, w));
    for (std::size_t i = 0; i < support.size(); ++i) y[i] = root[i] * up[s.cell_rect(support[i])];
  };
  PowerIterationResult pi = power_iteration(support.size(), apply, tol, max_iter);
  return {pi.eigenvalue, pi.iterations, pi.converged};
}

namespace {

std::vector<double> random_cells(std::size_t count, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double keep = 0.2 + 0.8 * unit(rng);
  std::vector<double> cells(count);
  for (auto& c : cells) c = unit(rng) < keep ? std::exp(1.5 * gauss(rng)) : 0.0;
  if (std::all_of(cells.begin(), cells.end(), [](double c) { return c == 0.0; })) {
    cells[static_cast<std::size_t>(unit(rng) * static_cast<double>(count)) % count] = 1.0;
  }
  return cells;
}

GapSample evaluate_gap(const BiTreeShape& s, const std::vector<double>& cells, double power_tol, std::size_t step) {
  BiMeasure mu(s, cells);
  GapSample g;
  g.step = step;
  g.one_box = one_box_constant(mu).constant;
  g.embedding = bi_embedding_constant(mu, power_tol).constant;
  g.gap = g.one_box > 0.0 ? g.embedding / g.one_box : 0.0;
  return g;
}

}  // namespace

GapProbeReport gap_probe(const GapProbeConfig& config) {
  BiTreeShape s = build_bitree(config.n, config.m);
  GapProbeReport rep;
  if (config.trials == 0) return rep;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto consider = [&rep](const GapSample& g, const std::vector<double>& cells) {
    rep.trajectory.push_back(g);
    if (g.gap > rep.best_gap || rep.best_cells.empty()) {
      rep.best_gap = g.gap;
      rep.best_cells = cells;
    }
  };

  if (config.optimizer == GapOptimizer::random) {
    for (std::size_t step = 0; step < config.trials; ++step) {
      auto cells = random_cells(s.cell_count(), rng);
      consider(evaluate_gap(s, cells, config.power_tol, step), cells);
      ++rep.accepted;
    }
    return rep;
  }

  const std::size_t restarts = std::max<std::size_t>(1, std::min(config.restarts, config.trials));
  const std::size_t per_run = (config.trials + restarts - 1) / restarts;
  std::vector<double> cells;
  GapSample current;
  std::size_t run_step = 0;
  for (std::size_t step = 0; step < config.trials; ++step) {
    if (step % per_run == 0) {
      cells = random_cells(s.cell_count(), rng);
      current = evaluate_gap(s, cells, config.power_tol, step);
      run_step = 0;
      ++rep.accepted;
      consider(current, cells);
      continue;
    }
    ++run_step;
    std::vector<double> proposal = cells;
    std::size_t c = static_cast<std::size_t>(unit(rng) * static_cast<double>(proposal.size())) % proposal.size();
    double move = unit(rng);
    if (move < 0.1) {
      proposal[c] = 0.0;
    } else if (proposal[c] == 0.0) {
      proposal[c] = std::exp(gauss(rng));
    } else {
      proposal[c] *= std::exp(config.step_scale * gauss(rng));
    }
    if (std::all_of(proposal.begin(), proposal.end(), [](double x) { return x == 0.0; })) proposal[c] = 1.0;
    GapSample cand = evaluate_gap(s, proposal, config.power_tol, step);
    double t = config.temperature * (1.0 - static_cast<double>(run_step) / static_cast<double>(per_run)) + 1e-9;
    double delta = std::log(cand.gap) - std::log(current.gap);
    if (delta >= 0.0 || unit(rng) < std::exp(delta / t)) {
      cells = std::move(proposal);
      current = cand;
      ++rep.accepted;
    } else {
      current.step = step;
    }
    consider(current, cells);
  }
  return rep;
}

}  // namespace carleson
