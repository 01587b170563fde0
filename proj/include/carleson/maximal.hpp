#pragma once

#include <string>
#include <vector>

#include "carleson/carleson_tree.hpp"

namespace carleson {

// r_K = (phi Lambda)_K / (Lambda)_K = int_K phi dLambda / Lambda(K), 0 where Lambda(K) = 0.
NodeVector ratio_function(const TreeMeasure& lambda, const NodeVector& phi);

// m_I = max over ancestors K of I (I included) of r_K.
NodeVector maximal_ratios(const TreeMeasure& lambda, const NodeVector& phi);

struct StoppingVertex {
  NodeId node = 1;
  int generation = 0;
  std::size_t parent = 0;        // index into StoppingDecomposition::vertices; root points to itself
  std::vector<NodeId> region;    // O_H, H first
  std::vector<std::size_t> stops;  // indices of the next-generation stopping vertices below H
  double beta = 0.0;             // Lambda(O_H)
  double ratio = 0.0;            // r_H
};

struct StoppingDecomposition {
  TreeShape shape;
  std::vector<StoppingVertex> vertices;           // generation-major, vertices[0] is the root
  std::vector<std::vector<std::size_t>> generations;
  std::vector<NodeId> owner;                      // owner[k-1] = stopping node whose O_H holds k

  NodeId owner_of(NodeId k) const { return owner[k - 1]; }
};

// Literal construction: below each stopping vertex H take the first
// descendants J with r_J >= 2 r_H (strictly positive when r_H = 0); they are
// the next generation, E_H is the union of their subtrees and O_H the rest
// of subtree(H). Zero-mass nodes never stop and fall into the current O_H.
StoppingDecomposition stopping_decomposition(const TreeMeasure& lambda, const NodeVector& phi);

struct InvariantResult {
  std::string name;
  bool passed = true;
  double worst_margin = 0.0;  // smallest (allowed - observed); negative means violated
};

struct StoppingReport {
  std::vector<InvariantResult> checks;
  bool passed() const;
  const InvariantResult* find(const std::string& name) const;
};

// Checks: partition, e_mass (Lambda(E_H) <= Lambda(H)/2), packing
// (sum_{H<=K} beta_H <= Lambda(K)), chain_doubling, ownership (r_I < 2 r_H on
// O_H and m_I <= 2 r_owner), alpha_test (beta_H/(Lambda)_H^2 has weighted test
// constant <= 1).
StoppingReport verify_stopping_invariants(const StoppingDecomposition& dec, const TreeMeasure& lambda,
                                          const NodeVector& phi);

// alpha_H = beta_H / (Lambda)_H^2 on stopping vertices, 0 elsewhere.
AlphaSequence stopping_alpha(const StoppingDecomposition& dec, const TreeMeasure& lambda);

struct MaximalCheck {
  double lhs = 0.0;           // (1/|I0|) sum |I|^2 (Lambda)_I^2 m_I^2
  double rhs = 0.0;           // (phi^2 Lambda)_I0
  double stopping_sum = 0.0;  // 8 sum_{H in S} r_H^2 Lambda(O_H)
  double ratio = 0.0;         // lhs / rhs, 0 when rhs = 0
  double one_box = 0.0;
  bool intermediate_ok = false;  // lhs <= stopping_sum
  bool passed = false;           // lhs <= 32 rhs
};

// Requires the one-box constant of lambda to be at most 1.
MaximalCheck maximal_theorem_check(const TreeMeasure& lambda, const NodeVector& phi, double tol = 1e-9);

}  // namespace carleson
