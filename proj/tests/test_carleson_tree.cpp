#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "carleson/carleson_tree.hpp"
#include "carleson/random.hpp"
#include "oracles.hpp"

using namespace carleson;

namespace {

TreeMeasure random_measure(std::mt19937_64& rng, int depth, int t) {
  return random_tree_measure(build_tree(depth), t % 2 ? SupportMode::all_nodes : SupportMode::boundary_only, rng);
}

}  // namespace

TEST_CASE("test constant: uniform boundary measure") {
  for (int n = 0; n <= 10; ++n) {
    auto r = carleson_ratios(TreeMeasure::uniform_boundary(build_tree(n)));
    CHECK(r.test_constant == doctest::Approx(2.0 - std::ldexp(1.0, -n)).epsilon(1e-14));
    CHECK(r.argmax == 1);
  }
  CHECK(carleson_ratios(TreeMeasure::uniform_boundary(build_tree(2))).test_constant == 1.75);
}

TEST_CASE("test constant: point mass at a leaf") {
  for (int n = 0; n <= 10; ++n) {
    auto s = build_tree(n);
    auto r = carleson_ratios(TreeMeasure::point_mass(s, s.first_leaf()));
    CHECK(r.test_constant == doctest::Approx(n + 1.0).epsilon(1e-14));
  }
  auto s = build_tree(2);
  auto r = carleson_ratios(TreeMeasure::point_mass(s, 4));
  CHECK(r.ratios[1] == 3.0);
  CHECK(r.argmax == 1);
}

TEST_CASE("test constant: zero measure") {
  auto r = carleson_ratios(TreeMeasure::zero(build_tree(3), SupportMode::all_nodes));
  CHECK(r.test_constant == 0.0);
  for (double x : r.ratios.values()) CHECK(x == 0.0);
}

TEST_CASE("alpha test constant examples") {
  auto s = build_tree(2);
  auto u = TreeMeasure::uniform_boundary(s);
  auto a = alpha_test_constant(u, AlphaSequence::length_squared(s));
  CHECK(a.constant == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(a.argmax == 1);
  CHECK(alpha_test_constant(u, AlphaSequence(s, std::vector<double>(7, 0.0))).constant == 0.0);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    auto mu = random_measure(rng, 1 + t % 5, t);
    auto ind = alpha_test_constant(mu, AlphaSequence::indicator(mu.shape(), 1));
    CHECK(ind.constant == doctest::Approx(mu.total()).epsilon(1e-13));
  }
  CHECK_THROWS_AS(AlphaSequence(s, std::vector<double>{1, -1, 0, 0, 0, 0, 0}), Error);
}

TEST_CASE("embedding constant examples") {
  auto s2 = build_tree(2);
  CHECK(embedding_constant(TreeMeasure::zero(s2, SupportMode::all_nodes)).embedding_constant == 0.0);
  auto s0 = build_tree(0);
  CHECK(embedding_constant(TreeMeasure::point_mass(s0, 1)).embedding_constant == doctest::Approx(1.0).epsilon(1e-12));
  auto pm = TreeMeasure::point_mass(s2, 4);
  double dense = oracle::tree_embedding(pm);
  CHECK(dense == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(embedding_constant(pm).embedding_constant == doctest::Approx(dense).epsilon(1e-10));
  // Frozen from tests/oracle/brute_force.py.
  CHECK(embedding_constant(TreeMeasure::uniform_boundary(s2)).embedding_constant ==
        doctest::Approx(1.75).epsilon(1e-10));
  auto ones = TreeMeasure(s2, std::vector<double>(7, 1.0), SupportMode::all_nodes);
  CHECK(embedding_constant(ones).embedding_constant == doctest::Approx(10.331851412666628).epsilon(1e-10));
  CHECK(oracle::tree_embedding(ones) == doctest::Approx(10.331851412666628).epsilon(1e-12));
}

TEST_CASE("embedding pair check examples") {
  auto s = build_tree(2);
  auto u = embedding_pair_check(TreeMeasure::uniform_boundary(s));
  CHECK(u.report.test_constant == 1.75);
  CHECK(u.report.embedding_constant >= 1.75 - 1e-9);
  CHECK(u.report.embedding_constant <= 7.0);
  CHECK(u.passed);
  auto p = embedding_pair_check(TreeMeasure::point_mass(s, 4));
  CHECK(p.report.test_constant == 3.0);
  CHECK(p.report.embedding_constant >= 3.0 - 1e-9);
  CHECK(p.report.embedding_constant <= 12.0);
  CHECK(p.passed);
  auto z = embedding_pair_check(TreeMeasure::zero(s, SupportMode::boundary_only));
  CHECK(z.report.test_constant == 0.0);
  CHECK(z.report.embedding_constant == 0.0);
  CHECK(z.passed);
}

TEST_CASE("non-convergence is reported, not thrown") {
  std::mt19937_64 rng(8);
  auto mu = random_measure(rng, 6, 1);
  auto r = embedding_constant(mu, 1e-300, 3);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
  CHECK(r.embedding_constant > 0.0);
}

TEST_CASE("embedding_lhs examples") {
  auto s = build_tree(2);
  auto u = TreeMeasure::uniform_boundary(s);
  CHECK(embedding_lhs(NodeVector(s), u, AlphaSequence::length_squared(s)).lhs == 0.0);
  CHECK(embedding_lhs(NodeVector(s, 1.0), u, AlphaSequence::indicator(s, 1)).lhs == 1.0);
  auto sides = embedding_lhs(NodeVector(s, 1.0), u, AlphaSequence::length_squared(s));
  CHECK(sides.lhs == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(sides.rhs == 1.0);
}

TEST_CASE("property: sandwich on random measures") {
  std::mt19937_64 rng(21);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    auto mu = random_measure(rng, 4 + t % 5, t);
    auto c = embedding_pair_check(mu);
    CHECK(c.report.converged);
    CHECK(c.passed);
    CHECK(c.report.test_constant <= c.report.embedding_constant * (1 + 1e-9));
    CHECK(c.report.embedding_constant <= 4.0 * c.report.test_constant * (1 + 1e-9));
    worst = std::max(worst, c.ratio);
  }
  MESSAGE("largest C_emb / C_test: " << worst);
}

TEST_CASE("property: embedding conclusion with constant 4") {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 100; ++t) {
    auto mu = random_measure(rng, 1 + t % 7, t);
    auto s = mu.shape();
    auto w = random_node_function(s, true, rng);
    AlphaSequence alpha = t % 3 == 0 ? AlphaSequence::length_squared(s)
                                     : AlphaSequence(s, {w.values().begin(), w.values().end()});
    double c = alpha_test_constant(mu, alpha).constant;
    if (c == 0.0) continue;
    auto lambda = mu.scaled(1.0 / c);
    CHECK(alpha_test_constant(lambda, alpha).constant <= 1.0 + 1e-12);
    auto phi = random_node_function(s, false, rng);
    auto sides = embedding_lhs(phi, lambda, alpha);
    CHECK(sides.lhs <= 4.0 * sides.rhs * (1 + 1e-12) + 1e-300);
  }
}

TEST_CASE("property: homogeneity") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 40; ++t) {
    auto mu = random_measure(rng, 2 + t % 6, t);
    double scale = std::exp(std::uniform_real_distribution<double>(-5, 5)(rng));
    auto a = carleson_ratios(mu);
    auto b = carleson_ratios(mu.scaled(scale));
    CHECK(b.test_constant == doctest::Approx(scale * a.test_constant).epsilon(1e-12));
    CHECK(a.argmax == b.argmax);
    auto ea = embedding_constant(mu).embedding_constant;
    auto eb = embedding_constant(mu.scaled(scale)).embedding_constant;
    CHECK(eb == doctest::Approx(scale * ea).epsilon(1e-9));
  }
}

TEST_CASE("property: power iteration agrees with the dense eigensolve") {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 40; ++t) {
    int depth = 1 + t % 9;
    auto mu = random_measure(rng, depth, t);
    double dense = oracle::tree_embedding(mu);
    auto r = embedding_constant(mu);
    CHECK(r.converged);
    CHECK(r.embedding_constant == doctest::Approx(dense).epsilon(1e-8));
  }
  // Largest shape in range: 2^11 leaves, 4095 nodes.
  auto big = random_tree_measure(build_tree(11), SupportMode::boundary_only, rng);
  CHECK(embedding_constant(big).embedding_constant == doctest::Approx(oracle::tree_embedding(big)).epsilon(1e-8));
}

TEST_CASE("property: operator application matches the explicit Gram matrix") {
  std::mt19937_64 rng(25);
  auto mu = random_measure(rng, 4, 1);
  auto s = mu.shape();
  auto x = random_node_function(s, false, rng);
  auto y = embedding_operator_apply(mu, x);
  for (NodeId a = 1; a <= s.node_count(); ++a) {
    double expect = 0.0;
    for (NodeId b = 1; b <= s.node_count(); ++b) {
      expect += std::sqrt(mu[a] * mu[b]) * oracle::common_ancestors(a, b) * x[b];
    }
    CHECK(y[a] == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("property: test constant matches the quadratic oracle") {
  std::mt19937_64 rng(26);
  for (int t = 0; t < 30; ++t) {
    auto mu = random_measure(rng, t % 8, t);
    CHECK(carleson_ratios(mu).test_constant == doctest::Approx(oracle::tree_test_constant(mu)).epsilon(1e-12));
  }
}

TEST_CASE("property: length-squared weights reduce to the one-box test") {
  std::mt19937_64 rng(27);
  for (int t = 0; t < 30; ++t) {
    auto mu = random_measure(rng, 1 + t % 7, t);
    auto s = mu.shape();
    double box = carleson_ratios(mu).test_constant;
    double weighted = alpha_test_constant(mu, AlphaSequence::length_squared(s)).constant;
    CHECK(weighted == doctest::Approx(box).epsilon(1e-12));
    auto lambda = normalize_one_box(mu);
    CHECK(carleson_ratios(lambda).test_constant == doctest::Approx(1.0).epsilon(1e-12));
    // With |I|^2 weights the left side is the embedding quadratic form.
    auto phi = random_node_function(s, true, rng);
    auto sides = embedding_lhs(phi, lambda, AlphaSequence::length_squared(s));
    double form = 0.0, energy = 0.0;
    auto down = hardy_down([&] {
      NodeVector w(s);
      for (NodeId k = 1; k <= s.node_count(); ++k) w[k] = phi[k] * lambda[k];
      return w;
    }());
    for (NodeId k = 1; k <= s.node_count(); ++k) {
      form += down[k] * down[k];
      energy += phi[k] * phi[k] * lambda[k];
    }
    CHECK(sides.lhs == doctest::Approx(form).epsilon(1e-12));
    CHECK(sides.rhs == doctest::Approx(energy).epsilon(1e-12));
    CHECK(form <= embedding_constant(lambda).embedding_constant * energy * (1 + 1e-9));
  }
}
