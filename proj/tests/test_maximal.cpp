#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "carleson/maximal.hpp"
#include "carleson/random.hpp"

using namespace carleson;

namespace {

TreeMeasure normalized(const TreeMeasure& mu) { return normalize_one_box(mu); }

struct Instance {
  TreeMeasure lambda;
  NodeVector phi;
};

Instance random_instance(std::mt19937_64& rng, int depth, int t) {
  auto s = build_tree(depth);
  auto mu = random_tree_measure(s, t % 2 ? SupportMode::all_nodes : SupportMode::boundary_only, rng);
  auto lambda = normalized(mu);
  return {lambda, random_node_function(s, true, rng)};
}

const InvariantResult& check(const StoppingReport& r, const char* name) {
  const InvariantResult* c = r.find(name);
  REQUIRE(c != nullptr);
  return *c;
}

}  // namespace

TEST_CASE("maximal ratios examples") {
  std::mt19937_64 rng(1);
  auto s = build_tree(4);
  auto mu = random_tree_measure(s, SupportMode::all_nodes, rng);
  auto down = hardy_down(mu);
  auto ones = maximal_ratios(mu, NodeVector(s, 1.0));
  for (NodeId k = 1; k <= s.node_count(); ++k) {
    if (down[k] > 0.0) CHECK(ones[k] == doctest::Approx(1.0).epsilon(1e-14));
  }
  auto zeros = maximal_ratios(mu, NodeVector(s));
  for (double x : zeros.values()) CHECK(x == 0.0);

  auto s1 = build_tree(1);
  TreeMeasure half(s1, {0, 0.5, 0.5}, SupportMode::boundary_only);
  NodeVector phi(s1, std::vector<double>{0, 1, 0});
  auto r = ratio_function(half, phi);
  CHECK(r[1] == 0.5);
  CHECK(r[2] == 1.0);
  CHECK(r[3] == 0.0);
  auto m = maximal_ratios(half, phi);
  CHECK(m[1] == 0.5);
  CHECK(m[2] == 1.0);
  CHECK(m[3] == 0.5);
}

TEST_CASE("constant test functions give a single stopping vertex") {
  std::mt19937_64 rng(2);
  auto s = build_tree(5);
  auto lambda = normalized(random_tree_measure(s, SupportMode::all_nodes, rng));
  for (double c : {1.0, 0.0}) {
    auto dec = stopping_decomposition(lambda, NodeVector(s, c));
    REQUIRE(dec.vertices.size() == 1);
    CHECK(dec.generations.size() == 1);
    CHECK(dec.vertices[0].node == 1);
    CHECK(dec.vertices[0].stops.empty());
    CHECK(dec.vertices[0].region.size() == s.node_count());
    CHECK(dec.vertices[0].beta == doctest::Approx(lambda.total()).epsilon(1e-14));
    for (NodeId k = 1; k <= s.node_count(); ++k) CHECK(dec.owner_of(k) == 1);
    auto rep = verify_stopping_invariants(dec, lambda, NodeVector(s, c));
    CHECK(rep.passed());
  }
}

TEST_CASE("doubling ratios stop at the expected node") {
  // Uniform leaves, phi = 1 on the left subtree: r_root = 1/2, r_2 = 1, so
  // node 2 stops (1 >= 2 * 1/2).
  auto s = build_tree(2);
  auto lambda = normalized(TreeMeasure::uniform_boundary(s));
  NodeVector phi(s, std::vector<double>{0, 0, 0, 1, 1, 0, 0});
  auto dec = stopping_decomposition(lambda, phi);
  REQUIRE(dec.vertices.size() == 2);
  CHECK(dec.vertices[1].node == 2);
  CHECK(dec.vertices[1].ratio == 1.0);
  CHECK(dec.owner_of(4) == 2);
  CHECK(dec.owner_of(5) == 2);
  CHECK(dec.owner_of(3) == 1);
  CHECK(dec.vertices[0].beta == doctest::Approx(0.5 * lambda.total()).epsilon(1e-15));
  CHECK(verify_stopping_invariants(dec, lambda, phi).passed());
}

TEST_CASE("overlapping regions fail the partition check") {
  std::mt19937_64 rng(3);
  for (int t = 0;; ++t) {
    REQUIRE(t < 1000);
    auto inst = random_instance(rng, 6, t);
    auto dec = stopping_decomposition(inst.lambda, inst.phi);
    if (dec.vertices.size() < 2) continue;
    CHECK(verify_stopping_invariants(dec, inst.lambda, inst.phi).passed());
    auto bad = dec;
    bad.vertices[0].region.push_back(bad.vertices[1].node);
    auto rep = verify_stopping_invariants(bad, inst.lambda, inst.phi);
    CHECK_FALSE(rep.passed());
    CHECK_FALSE(check(rep, "partition").passed);
    break;
  }
}

TEST_CASE("maximal theorem examples") {
  auto s = build_tree(2);
  auto lambda = normalized(TreeMeasure::uniform_boundary(s));
  auto zero = maximal_theorem_check(lambda, NodeVector(s));
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  CHECK(zero.passed);

  auto one = maximal_theorem_check(lambda, NodeVector(s, 1.0));
  double lhs = 0.0;
  for (NodeId k = 1; k <= s.node_count(); ++k) {
    double len = TreeShape::length(k);
    double avg = box_average(lambda, k);
    lhs += len * len * avg * avg;
  }
  CHECK(one.lhs == doctest::Approx(lhs).epsilon(1e-14));
  CHECK(one.rhs == doctest::Approx(lambda.total()).epsilon(1e-14));
  CHECK(one.ratio <= 32.0);
  CHECK(one.passed);

  CHECK_THROWS_AS(maximal_theorem_check(TreeMeasure::uniform_boundary(s), NodeVector(s, 1.0)), Error);
}

TEST_CASE("property: random instances at depths 4 to 8") {
  std::mt19937_64 rng(41);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    auto inst = random_instance(rng, 4 + t % 5, t);
    auto dec = stopping_decomposition(inst.lambda, inst.phi);
    auto rep = verify_stopping_invariants(dec, inst.lambda, inst.phi);
    for (const auto& c : rep.checks) {
      INFO(c.name << " margin " << c.worst_margin);
      CHECK(c.passed);
    }
    auto mc = maximal_theorem_check(inst.lambda, inst.phi);
    CHECK(mc.intermediate_ok);
    CHECK(mc.lhs <= mc.stopping_sum * (1 + 1e-12) + 1e-300);
    CHECK(mc.lhs <= 32.0 * mc.rhs * (1 + 1e-12) + 1e-300);
    CHECK(mc.passed);
    worst = std::max(worst, mc.ratio);

    // Every node is owned exactly once.
    std::size_t covered = 0;
    for (const auto& v : dec.vertices) covered += v.region.size();
    CHECK(covered == inst.lambda.shape().node_count());

    // Ratios at least double along stopping chains.
    for (std::size_t i = 1; i < dec.vertices.size(); ++i) {
      const auto& v = dec.vertices[i];
      const auto& p = dec.vertices[v.parent];
      if (p.ratio > 0.0) CHECK(v.ratio >= 2.0 * p.ratio - 1e-12);
      else CHECK(v.ratio > 0.0);
    }

    // The derived weights pass the weighted test with constant 1, and the
    // stopping sum equals 8 times the weighted embedding form.
    auto alpha = stopping_alpha(dec, inst.lambda);
    CHECK(alpha_test_constant(inst.lambda, alpha).constant <= 1.0 + 1e-12);
    auto sides = embedding_lhs(inst.phi, inst.lambda, alpha);
    CHECK(8.0 * sides.lhs == doctest::Approx(mc.stopping_sum).epsilon(1e-10));
    CHECK(mc.stopping_sum <= 32.0 * sides.rhs * (1 + 1e-12) + 1e-300);
  }
  MESSAGE("largest lhs / rhs: " << worst);
}

TEST_CASE("signed test functions run without assertions") {
  std::mt19937_64 rng(42);
  auto s = build_tree(5);
  auto lambda = normalized(random_tree_measure(s, SupportMode::all_nodes, rng));
  auto phi = random_node_function(s, false, rng);
  CHECK_NOTHROW(maximal_theorem_check(lambda, phi));
  CHECK_NOTHROW(stopping_decomposition(lambda, phi));
}
