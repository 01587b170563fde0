#include "carleson/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace carleson {

BellmanPoint operator+(const BellmanPoint& a, const BellmanPoint& b) {
  return {a.F + b.F, a.f + b.f, a.A + b.A, a.v + b.v};
}

BellmanPoint operator*(double s, const BellmanPoint& p) {
  return {s * p.F, s * p.f, s * p.A, s * p.v};
}

BellmanPoint midpoint(const BellmanPoint& a, const BellmanPoint& b) { return 0.5 * (a + b); }

std::optional<std::string> domain_violation(const BellmanPoint& p, double tol) {
  auto bound = [tol](double scale) { return tol * std::max(1.0, std::abs(scale)); };
  if (!std::isfinite(p.F) || !std::isfinite(p.f) || !std::isfinite(p.A) || !std::isfinite(p.v)) {
    return "non-finite coordinate";
  }
  if (p.F < -bound(0.0)) return "F >= 0 violated (F = " + std::to_string(p.F) + ")";
  if (p.v < -bound(0.0)) return "v >= 0 violated (v = " + std::to_string(p.v) + ")";
  if (p.A < -bound(0.0)) return "A >= 0 violated (A = " + std::to_string(p.A) + ")";
  if (p.A > p.v + bound(p.v)) {
    return "A <= v violated (A = " + std::to_string(p.A) + ", v = " + std::to_string(p.v) + ")";
  }
  double fv = p.F * p.v;
  if (p.f * p.f > fv + bound(fv)) {
    return "f^2 <= F v violated (f^2 = " + std::to_string(p.f * p.f) + ", F v = " + std::to_string(fv) + ")";
  }
  return std::nullopt;
}

void require_domain(const BellmanPoint& p, const char* where, double tol) {
  if (auto why = domain_violation(p, tol)) fail(ErrorCode::domain, std::string(where) + ": " + *why);
}

double bellman_value_unchecked(const BellmanPoint& p) noexcept {
  double denom = p.v + p.A;
  if (denom <= 0.0) return 4.0 * p.F;
  return 4.0 * (p.F - p.f * p.f / denom);
}

double bellman_value(const BellmanPoint& p) {
  require_domain(p, "bellman_value");
  return bellman_value_unchecked(p);
}

BellmanGradient bellman_gradient(const BellmanPoint& p) {
  double denom = p.v + p.A;
  if (denom <= 0.0) return {4.0, 0.0, 0.0, 0.0};
  double r = p.f / denom;
  return {4.0, -8.0 * r, 4.0 * r * r, 4.0 * r * r};
}

BellmanPoint SplitWitness::parent() const {
  BellmanPoint t = tilde();
  return {t.F + b * b, t.f + a * b, t.A + c, t.v + a * a};
}

namespace {

double f_over_v_squared(const BellmanPoint& p) {
  if (p.v <= 0.0) return 0.0;
  double r = p.f / p.v;
  return r * r;
}

}  // namespace

double mi99_check(const BellmanPoint& left, const BellmanPoint& right, double m) {
  require_domain(left, "mi99_check(left)");
  require_domain(right, "mi99_check(right)");
  if (m < 0.0) fail(ErrorCode::domain, "mi99_check: m must be nonnegative");
  BellmanPoint parent = midpoint(left, right);
  parent.A += m;
  require_domain(parent, "mi99_check(parent)");
  return bellman_value_unchecked(parent) -
         0.5 * (bellman_value_unchecked(left) + bellman_value_unchecked(right)) -
         f_over_v_squared(parent) * m;
}

double mi18_check(const SplitWitness& w) {
  require_domain(w.left, "mi18_check(left)");
  require_domain(w.right, "mi18_check(right)");
  if (w.a < 0.0 || w.c < 0.0) fail(ErrorCode::domain, "mi18_check: a and c must be nonnegative");
  BellmanPoint parent = w.parent();
  require_domain(parent, "mi18_check(parent)");
  return bellman_value_unchecked(parent) -
         0.5 * (bellman_value_unchecked(w.left) + bellman_value_unchecked(w.right)) -
         w.c * f_over_v_squared(parent);
}

double neutr_check(const BellmanPoint& parent, double a, double b, double c) {
  BellmanPoint lowered{parent.F, parent.f, parent.A - c, parent.v};
  BellmanPoint shifted{parent.F - b * b, parent.f - a * b, parent.A - c, parent.v - a * a};
  require_domain(lowered, "neutr_check(F, f, A-c, v)");
  require_domain(shifted, "neutr_check(F-b^2, f-ab, A-c, v-a^2)");
  return 0.25 * (bellman_value_unchecked(shifted) - bellman_value_unchecked(lowered));
}

double concavity_gap(const BellmanPoint& x, const BellmanPoint& x_star) {
  require_domain(x, "concavity_gap(x)");
  require_domain(x_star, "concavity_gap(x*)");
  BellmanGradient g = bellman_gradient(x_star);
  double linear = g.dF * (x.F - x_star.F) + g.df * (x.f - x_star.f) + g.dA * (x.A - x_star.A) +
                  g.dv * (x.v - x_star.v);
  return linear - (bellman_value_unchecked(x) - bellman_value_unchecked(x_star));
}

ConcEstMargins conc_est_margins(const BellmanPoint& x, double c) {
  require_domain(x, "conc_est_margins");
  if (c < 0.0 || c > x.A) fail(ErrorCode::domain, "conc_est_margins: need 0 <= c <= A");
  BellmanPoint lowered = x;
  lowered.A -= c;
  double drop = 0.25 * (bellman_value_unchecked(x) - bellman_value_unchecked(lowered));
  ConcEstMargins out;
  double denom = x.v + x.A;
  out.sharp = drop - (denom > 0.0 ? c * x.f * x.f / (denom * denom) : 0.0);
  out.coarse = drop - (x.v > 0.0 ? c * x.f * x.f / (4.0 * x.v * x.v) : 0.0);
  return out;
}

GradientSignsReport gradient_signs_check(const BellmanPoint& p) {
  constexpr double kMargin = 1e-6;
  if (p.F < kMargin || p.v < kMargin || p.A < kMargin || p.v - p.A < kMargin ||
      p.F * p.v - p.f * p.f < kMargin) {
    fail(ErrorCode::precondition, "gradient_signs_check: point within 1e-6 of the domain boundary");
  }
  auto partial = [&p](double BellmanPoint::*coord) {
    double h = 1e-6 * std::max(1.0, std::abs(p.*coord));
    BellmanPoint hi = p;
    BellmanPoint lo = p;
    hi.*coord += h;
    lo.*coord -= h;
    if (domain_violation(hi, 0.0) || domain_violation(lo, 0.0)) {
      fail(ErrorCode::precondition, "gradient_signs_check: finite-difference stencil leaves the domain");
    }
    return (bellman_value_unchecked(hi) - bellman_value_unchecked(lo)) / (2.0 * h);
  };
  GradientSignsReport rep;
  rep.numeric = {partial(&BellmanPoint::F), partial(&BellmanPoint::f), partial(&BellmanPoint::A),
                 partial(&BellmanPoint::v)};
  rep.exact = bellman_gradient(p);
  rep.dF_is_four = std::abs(rep.numeric.dF - 4.0) <= 1e-4;
  rep.dA_nonnegative = rep.numeric.dA >= -1e-8;
  rep.dv_nonnegative = rep.numeric.dv >= -1e-8;
  if (p.f > 0.0) {
    rep.df_sign_opposes_f = rep.numeric.df <= 1e-8;
  } else if (p.f < 0.0) {
    rep.df_sign_opposes_f = rep.numeric.df >= -1e-8;
  } else {
    rep.df_sign_opposes_f = std::abs(rep.numeric.df) <= 1e-4;
  }
  return rep;
}

const char* to_string(SampleMode mode) noexcept {
  switch (mode) {
    case SampleMode::mi99: return "mi99";
    case SampleMode::mi18: return "mi18";
    case SampleMode::neutr: return "neutr";
  }
  return "?";
}

std::optional<SampleMode> parse_sample_mode(const std::string& s) {
  if (s == "mi99") return SampleMode::mi99;
  if (s == "mi18") return SampleMode::mi18;
  if (s == "neutr") return SampleMode::neutr;
  return std::nullopt;
}

WitnessSampler::WitnessSampler(std::uint64_t seed) : rng_(seed) {}

BellmanPoint WitnessSampler::point() {
  std::exponential_distribution<double> expo(1.0);
  BellmanPoint p;
  p.F = expo(rng_);
  p.v = expo(rng_);
  p.A = std::uniform_real_distribution<double>(0.0, p.v)(rng_);
  double r = std::sqrt(p.F * p.v);
  p.f = std::uniform_real_distribution<double>(-r, r)(rng_);
  return p;
}

namespace {

// Records why a candidate parent was rejected; true when it is admissible.
bool admit(const BellmanPoint& parent, SamplerStats& stats) {
  double fv = parent.F * parent.v;
  if (parent.f * parent.f > fv + kDomainTol * std::max(1.0, fv)) {
    ++stats.rejected_cauchy_schwarz;
    return false;
  }
  if (parent.A > parent.v + kDomainTol * std::max(1.0, parent.v)) {
    ++stats.rejected_a_exceeds_v;
    return false;
  }
  return true;
}

[[noreturn]] void rejection_overflow(const char* mode) {
  fail(ErrorCode::internal, std::string("sampler exceeded rejection budget in mode ") + mode);
}

}  // namespace

Mi99Witness WitnessSampler::next_mi99() {
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    Mi99Witness w{point(), point(), 0.0};
    BellmanPoint t = midpoint(w.left, w.right);
    w.m = std::uniform_real_distribution<double>(0.0, std::max(0.0, t.v - t.A))(rng_);
    t.A += w.m;
    if (admit(t, stats_)) {
      ++stats_.emitted;
      return w;
    }
  }
  rejection_overflow("mi99");
}

SplitWitness WitnessSampler::next_mi18() {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    SplitWitness w;
    w.left = point();
    w.right = point();
    w.a = std::abs(gauss(rng_));
    w.b = gauss(rng_);
    BellmanPoint t = w.tilde();
    w.c = std::uniform_real_distribution<double>(0.0, std::max(0.0, t.v + w.a * w.a - t.A))(rng_);
    if (admit(w.parent(), stats_)) {
      ++stats_.emitted;
      return w;
    }
  }
  rejection_overflow("mi18");
}

NeutrWitness WitnessSampler::next_neutr() {
  SplitWitness w = next_mi18();
  return {w.parent(), w.a, w.b, w.c};
}

WitnessBatch sample_admissible(std::uint64_t seed, std::size_t count, SampleMode mode) {
  if (count < 1) fail(ErrorCode::invalid_argument, "sample_admissible: count must be at least 1");
  WitnessSampler sampler(seed);
  WitnessBatch batch;
  batch.mode = mode;
  for (std::size_t i = 0; i < count; ++i) {
    switch (mode) {
      case SampleMode::mi99: batch.mi99.push_back(sampler.next_mi99()); break;
      case SampleMode::mi18: batch.mi18.push_back(sampler.next_mi18()); break;
      case SampleMode::neutr: batch.neutr.push_back(sampler.next_neutr()); break;
    }
  }
  batch.stats = sampler.stats();
  return batch;
}

TreeCertificate certify_tree_embedding(const TreeMeasure& lambda, const NodeVector& phi,
                                       const AlphaSequence& alpha, double slack_tol) {
  require_same_shape(lambda.shape(), phi.shape(), "certify_tree_embedding");
  require_same_shape(lambda.shape(), alpha.shape(), "certify_tree_embedding");
  AlphaTest test = alpha_test_constant(lambda, alpha);
  if (test.constant > 1.0 + 1e-12) {
    fail(ErrorCode::normalization,
         "certify_tree_embedding: weighted test constant " + std::to_string(test.constant) +
             " exceeds 1 at node " + std::to_string(test.argmax) + "; rescale the measure first");
  }

  const TreeShape& shape = lambda.shape();
  const std::size_t n = shape.node_count();
  std::vector<BellmanPoint> x(n + 1);
  std::vector<double> fsq_alpha(n + 1, 0.0);

  for (NodeId k = n; k >= 1; --k) {
    double len = TreeShape::length(k);
    BellmanPoint tilde;
    if (!shape.is_leaf(k)) tilde = midpoint(x[2 * k], x[2 * k + 1]);
    double a = std::sqrt(lambda[k] / len);
    double b = phi[k] / std::sqrt(len);
    double v = a * a + tilde.v;
    double c = alpha[k] * v * v / len;
    x[k] = {b * b + tilde.F, a * b + tilde.f, c + tilde.A, v};
    if (auto why = domain_violation(x[k])) {
      fail(ErrorCode::internal, "certify_tree_embedding: node " + std::to_string(k) + " left the domain: " + *why);
    }
    fsq_alpha[k] = alpha[k] * x[k].f * x[k].f;
  }

  TreeCertificate cert;
  cert.rows.reserve(n);
  cert.min_slack = 0.0;
  bool first = true;
  for (NodeId k = 1; k <= n; ++k) {
    double len = TreeShape::length(k);
    double here = len * bellman_value_unchecked(x[k]);
    double below = 0.0;
    if (!shape.is_leaf(k)) {
      below = 0.5 * len * (bellman_value_unchecked(x[2 * k]) + bellman_value_unchecked(x[2 * k + 1]));
    }
    CertificateRow row{k, x[k], here - below - fsq_alpha[k], here};
    cert.embedding_sum += fsq_alpha[k];
    cert.telescoped += here - below;
    if (first || row.slack < cert.min_slack) cert.min_slack = row.slack;
    first = false;
    cert.rows.push_back(row);
  }
  cert.root_bound = bellman_value_unchecked(x[1]);
  cert.final_bound = 4.0 * x[1].F;
  cert.passed = cert.min_slack >= -slack_tol && cert.embedding_sum <= cert.root_bound + slack_tol &&
                cert.root_bound <= cert.final_bound + slack_tol;
  return cert;
}

}  // namespace carleson
