#pragma once

#include "carleson/tree.hpp"

namespace carleson {

inline constexpr double kDefaultPowerTol = 1e-12;
inline constexpr int kDefaultPowerMaxIter = 100000;

struct CarlesonRatios {
  NodeVector ratios;
  double test_constant = 0.0;
  NodeId argmax = 1;
};

// ratio(R) = sum_{Q<=R} (I*mu)(Q)^2 / (I*mu)(R), 0/0 := 0.
CarlesonRatios carleson_ratios(const TreeMeasure& mu);

// Non-negative weights {alpha_I} on the nodes.
class AlphaSequence {
public:
  AlphaSequence() = default;
  AlphaSequence(const TreeShape& shape, std::vector<double> values);

  // alpha_I = |I|^2, which turns the weighted test into the one-box test.
  static AlphaSequence length_squared(const TreeShape& shape);
  static AlphaSequence indicator(const TreeShape& shape, NodeId node);

  const TreeShape& shape() const noexcept { return values_.shape(); }
  const NodeVector& values() const noexcept { return values_; }
  double operator[](NodeId k) const noexcept { return values_[k]; }

private:
  NodeVector values_;
};

struct AlphaTest {
  double constant = 0.0;
  NodeId argmax = 1;
};

// max_I (1/|I|) sum_{K<=I} alpha_K (Lambda)_K^2 / (Lambda)_I.
AlphaTest alpha_test_constant(const TreeMeasure& lambda, const AlphaSequence& alpha);

struct EmbeddingReport {
  double test_constant = 0.0;
  double embedding_constant = 0.0;
  NodeId argmax_node = 1;
  int iterations = 0;
  bool converged = false;
};

// Best constant C in  sum_Q (sum_{P<=Q} phi(P) mu_P)^2 <= C sum_R phi(R)^2 mu_R,
// i.e. the top eigenvalue of sqrt(mu) I I* sqrt(mu) on supp mu.
EmbeddingReport embedding_constant(const TreeMeasure& mu, double tol = kDefaultPowerTol,
                                   int max_iter = kDefaultPowerMaxIter);

// Applies sqrt(mu) I I* sqrt(mu) to x (indexed by node). Exposed for the
// oracle comparison in the tests.
NodeVector embedding_operator_apply(const TreeMeasure& mu, const NodeVector& x);

struct EmbeddingPairCheck {
  EmbeddingReport report;
  double ratio = 0.0;  // C_emb / C_test, 0 when both vanish
  bool passed = false;
};

// C_test <= C_emb <= 4 C_test with relative slack `rel_tol`.
EmbeddingPairCheck embedding_pair_check(const TreeMeasure& mu, double rel_tol = 1e-9,
                                        double power_tol = kDefaultPowerTol,
                                        int max_iter = kDefaultPowerMaxIter);

struct EmbeddingSides {
  double lhs = 0.0;  // sum_I alpha_I (phi Lambda)_I^2
  double rhs = 0.0;  // (phi^2 Lambda)_{I0}
};

EmbeddingSides embedding_lhs(const NodeVector& phi, const TreeMeasure& lambda,
                             const AlphaSequence& alpha);

// Divides the measure by its one-box (alpha = |I|^2) constant; the test is
// quadratic over linear so the result has constant exactly 1. Zero stays zero.
TreeMeasure normalize_one_box(const TreeMeasure& mu);

}  // namespace carleson
