#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "carleson/bitree.hpp"
#include "carleson/random.hpp"
#include "oracles.hpp"

using namespace carleson;

namespace {

double geometric(int n) { return 2.0 - std::ldexp(1.0, -n); }

double b_plain(double F, double f, double A, double v) { return v + A == 0.0 ? F : F - f * f / (v + A); }

}  // namespace

TEST_CASE("build_bitree rectangle counts") {
  CHECK(build_bitree(1, 1).rect_count() == 9);
  CHECK(build_bitree(2, 2).rect_count() == 49);
  CHECK(build_bitree(0, 0).rect_count() == 1);
  CHECK(build_bitree(2, 3).cell_count() == 32);
  CHECK_THROWS_AS(build_bitree(12, 12), Error);
  CHECK_THROWS_AS(build_bitree(-1, 2), Error);
}

TEST_CASE("rectangle geometry") {
  auto s = build_bitree(2, 1);
  CHECK(s.index(s.rect(17)) == 17);
  CHECK(BiTreeShape::area({2, 3}) == 0.25);
  CHECK(s.children({1, 1}).size() == 4);
  CHECK(s.children({4, 1}).size() == 2);
  CHECK(s.children({4, 2}).empty());
  CHECK(s.is_cell({5, 3}));
  CHECK(s.cell_rect(s.rect_cell({6, 2})) == Rect{6, 2});
  auto r = s.cell_range({2, 1});
  CHECK(r.row0 == 0);
  CHECK(r.row1 == 2);
  CHECK(r.col0 == 0);
  CHECK(r.col1 == 2);
  CHECK(BiTreeShape::contains_rect({2, 1}, {5, 3}));
  CHECK_FALSE(BiTreeShape::contains_rect({3, 1}, {5, 3}));
}

TEST_CASE("one-box constant examples") {
  auto u = one_box_constant(BiMeasure::uniform(build_bitree(1, 1)));
  CHECK(u.constant == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(u.argmax == Rect{1, 1});
  for (int n = 0; n <= 4; ++n) {
    for (int m = 0; m <= 4; ++m) {
      auto s = build_bitree(n, m);
      CHECK(one_box_constant(BiMeasure::uniform(s)).constant ==
            doctest::Approx(geometric(n) * geometric(m)).epsilon(1e-12));
      CHECK(one_box_constant(BiMeasure::point_mass(s, s.cell_count() / 3)).constant ==
            doctest::Approx((n + 1.0) * (m + 1.0)).epsilon(1e-12));
    }
  }
  CHECK(one_box_constant(BiMeasure(build_bitree(2, 2), std::vector<double>(16, 0.0))).constant == 0.0);
}

TEST_CASE("cube embedding examples") {
  auto s = build_bitree(1, 1);
  auto mu = normalize_one_box(BiMeasure::uniform(s));
  auto zero = cube_embedding_check(mu, std::vector<double>(4, 0.0));
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  CHECK(zero.passed);
  std::vector<double> ones(4, 1.0);
  auto c = cube_embedding_check(mu, ones);
  // Frozen from tests/oracle/brute_force.py: 25/81 and 4/9.
  CHECK(c.lhs == doctest::Approx(25.0 / 81.0).epsilon(1e-14));
  CHECK(c.rhs == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
  CHECK(c.lhs == doctest::Approx(oracle::cube_lhs(mu, ones)).epsilon(1e-14));
  CHECK(c.passed);
  auto pm = normalize_one_box(BiMeasure::point_mass(s, 0));
  CHECK(cube_embedding_check(pm, ones).lhs == doctest::Approx(0.140625).epsilon(1e-14));
  CHECK_THROWS_AS(cube_embedding_check(BiMeasure::uniform(s), ones), Error);
  CHECK_THROWS_AS(cube_embedding_check(mu, std::vector<double>(3, 1.0)), Error);
}

TEST_CASE("certificate with zero test function") {
  std::mt19937_64 rng(1);
  auto mu = normalize_one_box(random_bimeasure(build_bitree(3, 2), rng));
  auto cert = bitree_bellman_certify(mu, std::vector<double>(mu.shape().cell_count(), 0.0));
  CHECK(cert.passed());
  CHECK(cert.lhs == 0.0);
  CHECK(cert.final_bound == 0.0);
}

TEST_CASE("certificate rows for a normalized point mass on (1,1)") {
  auto s = build_bitree(1, 1);
  auto mu = normalize_one_box(BiMeasure::point_mass(s, 0));
  REQUIRE(mu.cell(0) == 0.25);
  std::vector<double> phi(4, 1.0);
  auto cert = bitree_bellman_certify(mu, phi);
  REQUIRE(cert.rows.size() == 9);
  CHECK(cert.passed());

  // Recompute every row by enumeration.
  std::vector<double> F(9), f(9), A(9), v(9), B(9);
  for (std::size_t i = 0; i < 9; ++i) {
    Rect r = s.rect(i);
    double area = BiTreeShape::area(r);
    double mass = oracle::rect_mass(s, mu.cells(), r);
    double a = 0.0;
    for (std::size_t j = 0; j < 9; ++j) {
      if (BiTreeShape::contains_rect(r, s.rect(j))) {
        double mq = oracle::rect_mass(s, mu.cells(), s.rect(j));
        a += mq * mq;
      }
    }
    F[i] = f[i] = v[i] = mass / area;
    A[i] = a / area;
    CHECK(A[i] <= v[i] + 1e-15);
    B[i] = b_plain(F[i], f[i], A[i], v[i]);
  }
  for (std::size_t i = 0; i < 9; ++i) {
    const auto& row = cert.rows[i];
    Rect r = s.rect(i);
    CHECK(row.rect == r);
    auto kids = s.children(r);
    CHECK(row.children == static_cast<int>(kids.size()));
    double avg = 0.0;
    for (Rect q : kids) avg += B[s.index(q)];
    if (!kids.empty()) avg /= static_cast<double>(kids.size());
    double area = BiTreeShape::area(r);
    double integral = f[i] * area;
    double slack = area * area * (B[i] - avg) - 0.25 * area * integral * integral;
    CHECK(row.row_slack == doctest::Approx(slack).epsilon(1e-14).scale(1.0));
    CHECK(row.row_slack >= -1e-15);
  }
  // Root coefficient +1, interior -|Q|^2, leaf-coordinate rows between.
  CHECK(cert.rows[0].telescope_coefficient == 1.0);
  for (std::size_t i = 1; i < 9; ++i) CHECK(cert.rows[i].telescope_coefficient <= 0.0);
}

TEST_CASE("set test examples") {
  auto s = build_bitree(1, 1);
  auto pm = BiMeasure::point_mass(s, 2);
  auto masses = rect_masses(pm);
  std::vector<char> single(4, 0);
  single[2] = 1;
  CHECK(set_ratio(pm, masses, single) == 1.0);
  auto zero = BiMeasure(s, std::vector<double>(4, 0.0));
  CHECK(set_test_constant(zero, {}).constant == 0.0);
  CHECK_THROWS_AS(set_test_constant(BiMeasure::uniform(build_bitree(3, 3)), {}), Error);
}

TEST_CASE("bi-tree embedding constant examples") {
  CHECK(bi_embedding_constant(BiMeasure(build_bitree(1, 2), std::vector<double>(8, 0.0))).constant == 0.0);
  CHECK(bi_embedding_constant(BiMeasure::point_mass(build_bitree(0, 0), 0)).constant ==
        doctest::Approx(1.0).epsilon(1e-12));
  for (int n = 0; n <= 3; ++n) {
    for (int m = 0; m <= 3; ++m) {
      auto s = build_bitree(n, m);
      CHECK(bi_embedding_constant(BiMeasure::point_mass(s, s.cell_count() - 1)).constant ==
            doctest::Approx((n + 1.0) * (m + 1.0)).epsilon(1e-12));
    }
  }
  // Frozen from tests/oracle/brute_force.py.
  CHECK(bi_embedding_constant(BiMeasure::uniform(build_bitree(1, 1))).constant == doctest::Approx(2.25).epsilon(1e-10));
  CHECK(bi_embedding_constant(BiMeasure::uniform(build_bitree(2, 2))).constant ==
        doctest::Approx(3.0625).epsilon(1e-10));
}

TEST_CASE("gap probe examples") {
  GapProbeConfig cfg;
  cfg.n = 4;
  cfg.m = 4;
  cfg.trials = 0;
  auto empty = gap_probe(cfg);
  CHECK(empty.trajectory.empty());
  CHECK(empty.best_cells.empty());

  GapProbeConfig small;
  small.n = 1;
  small.m = 1;
  small.trials = 300;
  small.optimizer = GapOptimizer::random;
  auto r = gap_probe(small);
  CHECK(r.trajectory.size() == 300);
  for (const auto& g : r.trajectory) CHECK(g.gap >= 1.0 - 1e-9);

  GapProbeConfig big;
  big.n = 4;
  big.m = 4;
  big.trials = 1000;
  big.seed = 9;
  auto a = gap_probe(big);
  auto b = gap_probe(big);
  CHECK(a.best_gap == b.best_gap);
  CHECK(a.best_cells == b.best_cells);
  CHECK(a.accepted == b.accepted);
  CHECK(a.best_gap >= 1.0 - 1e-9);
  MESSAGE("(4,4) anneal best gap: " << a.best_gap);
}

TEST_CASE("property: prefix sums agree with naive rectangle sums") {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 100; ++t) {
    auto s = build_bitree(t % 5, (t / 5) % 5);
    auto mu = random_bimeasure(s, rng);
    SummedAreaTable table(s, mu.cells());
    auto masses = rect_masses(mu);
    for (std::size_t i = 0; i < s.rect_count(); ++i) {
      double naive = oracle::rect_mass(s, mu.cells(), s.rect(i));
      CHECK(table.rect_sum(s.rect(i)) == doctest::Approx(naive).epsilon(1e-12).scale(1.0));
      CHECK(masses[i] == doctest::Approx(naive).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("property: one-box constant matches the quadratic oracle") {
  std::mt19937_64 rng(52);
  for (int t = 0; t < 40; ++t) {
    auto mu = random_bimeasure(build_bitree(t % 4, (t / 4) % 4), rng);
    CHECK(one_box_constant(mu).constant == doctest::Approx(oracle::bi_one_box(mu)).epsilon(1e-12));
  }
}

TEST_CASE("property: power iteration agrees with the dense eigensolve") {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 40; ++t) {
    auto mu = random_bimeasure(build_bitree(t % 6, (t / 6) % 5), rng);
    auto r = bi_embedding_constant(mu);
    CHECK(r.converged);
    CHECK(r.constant == doctest::Approx(oracle::bi_embedding(mu)).epsilon(1e-8));
  }
}

TEST_CASE("property: cube embedding on normalized instances") {
  std::mt19937_64 rng(54);
  for (int t = 0; t < 200; ++t) {
    auto s = build_bitree(1 + t % 5, 1 + (t / 5) % 5);
    auto mu = normalize_one_box(random_bimeasure(s, rng));
    auto phi = random_cell_function(s.cell_count(), t % 2 == 0, rng);
    auto c = cube_embedding_check(mu, phi);
    CHECK(c.passed);
    CHECK(c.lhs <= 4.0 * c.rhs * (1 + 1e-12) + 1e-300);
    if (t < 30) CHECK(c.lhs == doctest::Approx(oracle::cube_lhs(mu, phi)).epsilon(1e-10));
  }
}

TEST_CASE("property: certificate rows at shape (4,4)") {
  std::mt19937_64 rng(55);
  auto s = build_bitree(4, 4);
  for (int t = 0; t < 100; ++t) {
    auto mu = normalize_one_box(random_bimeasure(s, rng));
    auto phi = random_cell_function(s.cell_count(), t % 2 == 0, rng);
    auto cert = bitree_bellman_certify(mu, phi);
    CHECK(cert.martingale_ok);
    CHECK(cert.worst_martingale <= 1e-12);
    CHECK(cert.a_gain_ok);
    CHECK(cert.rows_ok);
    CHECK(cert.coefficients_ok);
    CHECK(cert.global_ok);
    CHECK(cert.lhs <= cert.final_bound * (1 + 1e-12));
  }
}

TEST_CASE("property: telescoping coefficients") {
  auto s = build_bitree(3, 2);
  auto mu = normalize_one_box(BiMeasure::uniform(s));
  auto cert = bitree_bellman_certify(mu, std::vector<double>(s.cell_count(), 1.0));
  for (const auto& row : cert.rows) {
    double a2 = BiTreeShape::area(row.rect) * BiTreeShape::area(row.rect);
    bool root = row.rect == Rect{1, 1};
    bool u_root = row.rect.u == 1, v_root = row.rect.v == 1;
    if (root) {
      CHECK(row.telescope_coefficient == 1.0);
    } else if (u_root || v_root) {
      // One parent only; coefficient 0 unless the parent split two ways.
      CHECK(row.telescope_coefficient <= 0.0);
      CHECK(row.telescope_coefficient >= -a2 - 1e-15);
    } else {
      CHECK(row.telescope_coefficient <= 0.0);
      CHECK(row.telescope_coefficient >= -3.0 * a2 - 1e-15);
    }
  }
}

TEST_CASE("property: A <= v everywhere exactly when the one-box constant is at most 1") {
  std::mt19937_64 rng(56);
  for (int t = 0; t < 60; ++t) {
    auto s = build_bitree(1 + t % 4, 1 + (t / 4) % 4);
    auto raw = random_bimeasure(s, rng);
    double scale = std::exp(std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
    auto mu = normalize_one_box(raw).scaled(scale);
    auto m = rect_masses(mu);
    RectVector sq(s);
    for (std::size_t i = 0; i < s.rect_count(); ++i) sq[i] = m[i] * m[i];
    auto a = descendant_sums(sq);
    bool a_le_v = true;
    for (std::size_t i = 0; i < s.rect_count(); ++i) {
      double area = BiTreeShape::area(s.rect(i));
      if (a[i] / area > m[i] / area * (1 + 1e-12)) a_le_v = false;
    }
    bool box = one_box_constant(mu).constant <= 1.0 + 1e-12;
    CHECK(a_le_v == box);
    CHECK(box == (scale <= 1.0 + 1e-12));
  }
}

TEST_CASE("property: set test brackets") {
  std::mt19937_64 rng(57);
  for (int t = 0; t < 10; ++t) {
    auto mu = random_bimeasure(build_bitree(2, 2), rng);
    auto set = set_test_constant(mu, {});
    double box = one_box_constant(mu).constant;
    auto emb = bi_embedding_constant(mu);
    CHECK(set.evaluated == 65535);
    CHECK(set.constant >= box - 1e-12);
    CHECK(set.constant <= emb.constant + 1e-9);
    std::vector<char> in_e(16, 0);
    for (auto c : set.witness) in_e[c] = 1;
    CHECK(set_ratio(mu, rect_masses(mu), in_e) == doctest::Approx(set.constant).epsilon(1e-14));

    SetTestOptions unions{SetStrategy::rect_unions, 2, 0, 3};
    auto su = set_test_constant(mu, unions);
    CHECK(su.constant >= box - 1e-12);
    CHECK(su.constant <= set.constant + 1e-12);
    SetTestOptions random{SetStrategy::random_subsets, 1, 500, 4};
    CHECK(set_test_constant(mu, random).constant <= set.constant + 1e-12);
  }
}

TEST_CASE("set ratio on the cells of one rectangle equals its one-box ratio") {
  std::mt19937_64 rng(58);
  auto mu = random_bimeasure(build_bitree(2, 3), rng);
  const auto& s = mu.shape();
  auto ob = one_box_constant(mu);
  auto masses = rect_masses(mu);
  for (std::size_t i = 0; i < s.rect_count(); ++i) {
    std::vector<char> in_e(s.cell_count(), 0);
    for (std::size_t c = 0; c < s.cell_count(); ++c) {
      if (BiTreeShape::contains_rect(s.rect(i), s.cell_rect(c))) in_e[c] = 1;
    }
    CHECK(set_ratio(mu, masses, in_e) == doctest::Approx(ob.ratios[i]).epsilon(1e-12).scale(1.0));
  }
}
