#include "carleson/carleson_tree.hpp"

#include <cmath>
#include <vector>

#include "carleson/power_iteration.hpp"

namespace carleson {

namespace {

// Index of the largest entry; ties resolve to the smallest node id so the
// root wins for symmetric data.
NodeId argmax_of(const NodeVector& v, double* value) {
  NodeId best = 1;
  double best_v = v[1];
  for (NodeId k = 2; k <= v.size(); ++k) {
    if (v[k] > best_v) {
      best_v = v[k];
      best = k;
    }
  }
  *value = best_v;
  return best;
}

}  // namespace

CarlesonRatios carleson_ratios(const TreeMeasure& mu) {
  NodeVector sub = hardy_down(mu);
  NodeVector sq(mu.shape());
  for (NodeId k = 1; k <= sub.size(); ++k) sq[k] = sub[k] * sub[k];
  NodeVector num = hardy_down(sq);
  CarlesonRatios out{NodeVector(mu.shape()), 0.0, 1};
  for (NodeId k = 1; k <= sub.size(); ++k) {
    out.ratios[k] = sub[k] > 0.0 ? num[k] / sub[k] : 0.0;
  }
  out.argmax = argmax_of(out.ratios, &out.test_constant);
  return out;
}

AlphaSequence::AlphaSequence(const TreeShape& shape, std::vector<double> values)
    : values_(shape, std::move(values)) {
  for (NodeId k = 1; k <= values_.size(); ++k) {
    if (values_[k] < 0.0) {
      fail(ErrorCode::validation, "alpha must be nonnegative (node " + std::to_string(k) + ")");
    }
  }
}

AlphaSequence AlphaSequence::length_squared(const TreeShape& shape) {
  std::vector<double> a(shape.node_count());
  for (NodeId k = 1; k <= shape.node_count(); ++k) {
    double len = TreeShape::length(k);
    a[k - 1] = len * len;
  }
  return AlphaSequence(shape, std::move(a));
}

AlphaSequence AlphaSequence::indicator(const TreeShape& shape, NodeId node) {
  shape.check_node(node);
  std::vector<double> a(shape.node_count(), 0.0);
  a[node - 1] = 1.0;
  return AlphaSequence(shape, std::move(a));
}

AlphaTest alpha_test_constant(const TreeMeasure& lambda, const AlphaSequence& alpha) {
  require_same_shape(lambda.shape(), alpha.shape(), "alpha_test_constant");
  NodeVector mass = hardy_down(lambda);
  NodeVector terms(lambda.shape());
  for (NodeId k = 1; k <= mass.size(); ++k) {
    double avg = mass[k] / TreeShape::length(k);
    terms[k] = alpha[k] * avg * avg;
  }
  NodeVector num = hardy_down(terms);
  // (1/|I|) num / (Lambda)_I == num / Lambda(I).
  NodeVector ratio(lambda.shape());
  for (NodeId k = 1; k <= mass.size(); ++k) ratio[k] = mass[k] > 0.0 ? num[k] / mass[k] : 0.0;
  AlphaTest out;
  out.argmax = argmax_of(ratio, &out.constant);
  return out;
}

NodeVector embedding_operator_apply(const TreeMeasure& mu, const NodeVector& x) {
  require_same_shape(mu.shape(), x.shape(), "embedding_operator_apply");
  NodeVector w(mu.shape());
  for (NodeId k = 1; k <= w.size(); ++k) w[k] = std::sqrt(mu[k]) * x[k];
  NodeVector pot = hardy_up(hardy_down(w));
  for (NodeId k = 1; k <= w.size(); ++k) pot[k] *= std::sqrt(mu[k]);
  return pot;
}

EmbeddingReport embedding_constant(const TreeMeasure& mu, double tol, int max_iter) {
  if (!(tol > 0.0)) fail(ErrorCode::invalid_argument, "power iteration tolerance must be positive");
  if (max_iter < 1) fail(ErrorCode::invalid_argument, "max_iter must be at least 1");

  std::vector<NodeId> support;
  for (NodeId k = 1; k <= mu.shape().node_count(); ++k) {
    if (mu[k] > 0.0) support.push_back(k);
  }
  std::vector<double> root(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) root[i] = std::sqrt(mu[support[i]]);

  NodeVector scratch(mu.shape());
  auto apply = [&](std::span<const double> x, std::span<double> y) {
    std::fill(scratch.values().begin(), scratch.values().end(), 0.0);
    for (std::size_t i = 0; i < support.size(); ++i) scratch[support[i]] = root[i] * x[i];
    NodeVector pot = hardy_up(hardy_down(scratch));
    for (std::size_t i = 0; i < support.size(); ++i) y[i] = root[i] * pot[support[i]];
  };
  PowerIterationResult pi = power_iteration(support.size(), apply, tol, max_iter);

  CarlesonRatios cr = carleson_ratios(mu);
  EmbeddingReport rep;
  rep.test_constant = cr.test_constant;
  rep.argmax_node = cr.argmax;
  rep.embedding_constant = pi.eigenvalue;
  rep.iterations = pi.iterations;
  rep.converged = pi.converged;
  return rep;
}

EmbeddingPairCheck embedding_pair_check(const TreeMeasure& mu, double rel_tol, double power_tol,
                                        int max_iter) {
  EmbeddingPairCheck out;
  out.report = embedding_constant(mu, power_tol, max_iter);
  double ct = out.report.test_constant;
  double ce = out.report.embedding_constant;
  out.ratio = ct > 0.0 ? ce / ct : 0.0;
  double scale = std::max(ct, ce);
  out.passed = ct <= ce + rel_tol * scale && ce <= 4.0 * ct + rel_tol * scale;
  return out;
}

EmbeddingSides embedding_lhs(const NodeVector& phi, const TreeMeasure& lambda,
                             const AlphaSequence& alpha) {
  require_same_shape(phi.shape(), lambda.shape(), "embedding_lhs");
  require_same_shape(alpha.shape(), lambda.shape(), "embedding_lhs");
  NodeVector weighted(lambda.shape());
  EmbeddingSides out;
  for (NodeId k = 1; k <= weighted.size(); ++k) {
    weighted[k] = phi[k] * lambda[k];
    out.rhs += phi[k] * phi[k] * lambda[k];
  }
  NodeVector integrals = hardy_down(weighted);
  for (NodeId k = 1; k <= weighted.size(); ++k) {
    double avg = integrals[k] / TreeShape::length(k);
    out.lhs += alpha[k] * avg * avg;
  }
  return out;
}

TreeMeasure normalize_one_box(const TreeMeasure& mu) {
  double c = carleson_ratios(mu).test_constant;
  if (c == 0.0) return mu;
  return mu.scaled(1.0 / c);
}

}  // namespace carleson
