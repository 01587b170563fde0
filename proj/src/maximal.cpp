#include "carleson/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace carleson {

NodeVector ratio_function(const TreeMeasure& lambda, const NodeVector& phi) {
  require_same_shape(lambda.shape(), phi.shape(), "ratio_function");
  NodeVector weighted(lambda.shape());
  for (NodeId k = 1; k <= weighted.size(); ++k) weighted[k] = phi[k] * lambda[k];
  NodeVector num = hardy_down(weighted);
  NodeVector den = hardy_down(lambda);
  NodeVector r(lambda.shape());
  for (NodeId k = 1; k <= r.size(); ++k) r[k] = den[k] > 0.0 ? num[k] / den[k] : 0.0;
  return r;
}

NodeVector maximal_ratios(const TreeMeasure& lambda, const NodeVector& phi) {
  NodeVector m = ratio_function(lambda, phi);
  for (NodeId k = 2; k <= m.size(); ++k) m[k] = std::max(m[k], m[k / 2]);
  return m;
}

namespace {

bool meets_threshold(double r_child, double r_stop) {
  if (r_stop == 0.0) return r_child > 0.0;
  return r_child >= 2.0 * r_stop;
}

double tol_for(double scale) { return 1e-12 * std::max(1.0, std::abs(scale)); }

}  // namespace

StoppingDecomposition stopping_decomposition(const TreeMeasure& lambda, const NodeVector& phi) {
  const TreeShape& shape = lambda.shape();
  NodeVector r = ratio_function(lambda, phi);
  NodeVector mass = hardy_down(lambda);

  StoppingDecomposition dec;
  dec.shape = shape;
  dec.owner.assign(shape.node_count(), 0);
  dec.vertices.push_back(StoppingVertex{1, 0, 0, {}, {}, 0.0, r[1]});
  dec.generations.push_back({0});

  std::vector<NodeId> stack;
  for (std::size_t idx = 0; idx < dec.vertices.size(); ++idx) {
    const NodeId h = dec.vertices[idx].node;
    const double rh = dec.vertices[idx].ratio;
    const int gen = dec.vertices[idx].generation;
    std::vector<NodeId> region{h};
    std::vector<std::size_t> stops;
    dec.owner[h - 1] = h;

    stack.clear();
    if (!shape.is_leaf(h)) {
      stack.push_back(2 * h + 1);
      stack.push_back(2 * h);
    }
    while (!stack.empty()) {
      NodeId j = stack.back();
      stack.pop_back();
      if (mass[j] > 0.0 && meets_threshold(r[j], rh)) {
        stops.push_back(dec.vertices.size());
        dec.vertices.push_back(StoppingVertex{j, gen + 1, idx, {}, {}, 0.0, r[j]});
        if (dec.generations.size() <= static_cast<std::size_t>(gen + 1)) dec.generations.emplace_back();
        dec.generations[gen + 1].push_back(stops.back());
        continue;
      }
      dec.owner[j - 1] = h;
      region.push_back(j);
      if (!shape.is_leaf(j)) {
        stack.push_back(2 * j + 1);
        stack.push_back(2 * j);
      }
    }
    double beta = 0.0;
    for (NodeId k : region) beta += lambda[k];
    dec.vertices[idx].region = std::move(region);
    dec.vertices[idx].stops = std::move(stops);
    dec.vertices[idx].beta = beta;
  }
  return dec;
}

bool StoppingReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const InvariantResult& c) { return c.passed; });
}

const InvariantResult* StoppingReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

AlphaSequence stopping_alpha(const StoppingDecomposition& dec, const TreeMeasure& lambda) {
  NodeVector mass = hardy_down(lambda);
  std::vector<double> alpha(lambda.shape().node_count(), 0.0);
  for (const auto& v : dec.vertices) {
    double avg = mass[v.node] / TreeShape::length(v.node);
    if (avg > 0.0) alpha[v.node - 1] = v.beta / (avg * avg);
  }
  return AlphaSequence(lambda.shape(), std::move(alpha));
}

StoppingReport verify_stopping_invariants(const StoppingDecomposition& dec, const TreeMeasure& lambda,
                                          const NodeVector& phi) {
  require_same_shape(dec.shape, lambda.shape(), "verify_stopping_invariants");
  const TreeShape& shape = lambda.shape();
  const std::size_t n = shape.node_count();
  NodeVector r = ratio_function(lambda, phi);
  NodeVector m = maximal_ratios(lambda, phi);
  NodeVector mass = hardy_down(lambda);
  const double inf = std::numeric_limits<double>::infinity();

  auto record = [](InvariantResult& res, double margin, double tol) {
    res.worst_margin = std::min(res.worst_margin, margin);
    if (margin < -tol) res.passed = false;
  };

  StoppingReport rep;

  // Every node in exactly one O_H, and the owner map agrees with the regions.
  InvariantResult partition{"partition", true, 0.0};
  {
    std::vector<int> hits(n + 1, 0);
    std::size_t total = 0;
    for (const auto& v : dec.vertices) {
      for (NodeId k : v.region) {
        if (!shape.contains(k)) {
          partition.passed = false;
          continue;
        }
        ++hits[k];
        ++total;
        if (dec.owner.size() != n || dec.owner[k - 1] != v.node) partition.passed = false;
      }
      if (v.region.empty() || v.region.front() != v.node) partition.passed = false;
    }
    for (NodeId k = 1; k <= n; ++k) {
      if (hits[k] != 1) {
        partition.passed = false;
        partition.worst_margin = std::min(partition.worst_margin, -std::abs(hits[k] - 1.0));
      }
    }
    if (total != n) partition.passed = false;
  }
  rep.checks.push_back(partition);

  InvariantResult e_mass{"e_mass", true, inf};
  InvariantResult chain{"chain_doubling", true, inf};
  for (const auto& v : dec.vertices) {
    double e = 0.0;
    for (std::size_t s : v.stops) {
      NodeId j = dec.vertices[s].node;
      e += mass[j];
      double margin = v.ratio == 0.0 ? (r[j] > 0.0 ? r[j] : -1.0) : r[j] - 2.0 * v.ratio;
      record(chain, margin, tol_for(v.ratio));
    }
    record(e_mass, 0.5 * mass[v.node] - e, tol_for(mass[v.node]));
  }
  if (e_mass.worst_margin == inf) e_mass.worst_margin = 0.0;
  if (chain.worst_margin == inf) chain.worst_margin = 0.0;
  rep.checks.push_back(e_mass);

  InvariantResult packing{"packing", true, inf};
  {
    NodeVector beta(shape);
    for (const auto& v : dec.vertices) beta[v.node] += v.beta;
    NodeVector below = hardy_down(beta);
    for (NodeId k = 1; k <= n; ++k) record(packing, mass[k] - below[k], tol_for(mass[k]));
  }
  rep.checks.push_back(packing);
  rep.checks.push_back(chain);

  InvariantResult ownership{"ownership", true, inf};
  for (NodeId k = 1; k <= n; ++k) {
    NodeId h = dec.owner.size() == n ? dec.owner[k - 1] : 0;
    if (!shape.contains(h)) {
      ownership.passed = false;
      continue;
    }
    double rh = r[h];
    double bound = 2.0 * rh;
    record(ownership, bound - m[k], tol_for(rh));
    if (k != h) {
      // Strict inequality r_I < 2 r_H inside O_H, except on the zero-ratio branch.
      double margin = rh == 0.0 ? -r[k] : bound - r[k];
      if (rh != 0.0 && margin == 0.0 && mass[k] > 0.0) margin = -tol_for(rh) * 2.0;
      record(ownership, margin, tol_for(rh));
    }
  }
  rep.checks.push_back(ownership);

  InvariantResult alpha_test{"alpha_test", true, 0.0};
  {
    double c = alpha_test_constant(lambda, stopping_alpha(dec, lambda)).constant;
    alpha_test.worst_margin = 1.0 - c;
    alpha_test.passed = c <= 1.0 + 1e-12;
  }
  rep.checks.push_back(alpha_test);
  return rep;
}

MaximalCheck maximal_theorem_check(const TreeMeasure& lambda, const NodeVector& phi, double tol) {
  require_same_shape(lambda.shape(), phi.shape(), "maximal_theorem_check");
  MaximalCheck out;
  out.one_box = carleson_ratios(lambda).test_constant;
  if (out.one_box > 1.0 + 1e-12) {
    fail(ErrorCode::normalization, "maximal_theorem_check: one-box constant " + std::to_string(out.one_box) +
                                       " exceeds 1; rescale the measure first");
  }
  NodeVector mass = hardy_down(lambda);
  NodeVector m = maximal_ratios(lambda, phi);
  for (NodeId k = 1; k <= mass.size(); ++k) {
    // |I|^2 (Lambda)_I^2 = Lambda(I)^2
    out.lhs += mass[k] * mass[k] * m[k] * m[k];
    out.rhs += phi[k] * phi[k] * lambda[k];
  }
  StoppingDecomposition dec = stopping_decomposition(lambda, phi);
  double s = 0.0;
  for (const auto& v : dec.vertices) s += v.ratio * v.ratio * v.beta;
  out.stopping_sum = 8.0 * s;
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  out.intermediate_ok = out.lhs <= out.stopping_sum + tol;
  out.passed = out.lhs <= 32.0 * out.rhs + tol;
  return out;
}

}  // namespace carleson
