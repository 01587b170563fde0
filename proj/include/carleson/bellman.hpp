#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "carleson/carleson_tree.hpp"

namespace carleson {

inline constexpr double kDomainTol = 1e-12;

struct BellmanPoint {
  double F = 0.0;
  double f = 0.0;
  double A = 0.0;
  double v = 0.0;

  friend bool operator==(const BellmanPoint&, const BellmanPoint&) = default;
};

BellmanPoint operator+(const BellmanPoint& a, const BellmanPoint& b);
BellmanPoint operator*(double s, const BellmanPoint& p);
BellmanPoint midpoint(const BellmanPoint& a, const BellmanPoint& b);

// Domain {F >= 0, v >= 0, 0 <= A <= v, f^2 <= F v}. The tolerance is additive
// for values of order one and relative beyond that. Returns a description of
// the first violated constraint, or nullopt.
std::optional<std::string> domain_violation(const BellmanPoint& p, double tol = kDomainTol);
void require_domain(const BellmanPoint& p, const char* where, double tol = kDomainTol);

// B(F, f, A, v) = 4 (F - f^2 / (v + A)); 4F on the degenerate face v + A = 0.
double bellman_value(const BellmanPoint& p);
// Same without domain validation, for use inside verified loops.
double bellman_value_unchecked(const BellmanPoint& p) noexcept;

struct BellmanGradient {
  double dF = 0.0;
  double df = 0.0;
  double dA = 0.0;
  double dv = 0.0;
};

BellmanGradient bellman_gradient(const BellmanPoint& p);

// Two children merged at a node carrying extra mass m in the A variable.
struct Mi99Witness {
  BellmanPoint left;
  BellmanPoint right;
  double m = 0.0;
};

// Two children plus the node's own contribution (a, b, c).
struct SplitWitness {
  BellmanPoint left;
  BellmanPoint right;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  BellmanPoint tilde() const { return midpoint(left, right); }
  BellmanPoint parent() const;
};

struct NeutrWitness {
  BellmanPoint parent;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

// B(parent) - (B(l)+B(r))/2 - (f^2/v^2) m, parent = half-sums with A += m.
double mi99_check(const BellmanPoint& left, const BellmanPoint& right, double m);
// B(parent) - (B(l)+B(r))/2 - c f^2/v^2 for the parent built from the split.
double mi18_check(const SplitWitness& w);
// (B(F-b^2, f-ab, A-c, v-a^2) - B(F, f, A-c, v)) / 4; never positive.
double neutr_check(const BellmanPoint& parent, double a, double b, double c);

// Tangent-plane bound for a concave function:
// grad(x*) . (x - x*) - (B(x) - B(x*)), nonnegative up to rounding.
double concavity_gap(const BellmanPoint& x, const BellmanPoint& x_star);

// Lower bounds obtained by lowering A by c: returns the two margins
//   (B(x) - B(x - c e_A))/4 - c f^2/(v+A)^2   and
//   (B(x) - B(x - c e_A))/4 - c f^2/(4 v^2).
struct ConcEstMargins {
  double sharp = 0.0;
  double coarse = 0.0;
};
ConcEstMargins conc_est_margins(const BellmanPoint& x, double c);

struct GradientSignsReport {
  BellmanGradient numeric;
  BellmanGradient exact;
  bool dF_is_four = false;
  bool dA_nonnegative = false;
  bool dv_nonnegative = false;
  bool df_sign_opposes_f = false;
  bool passed() const { return dF_is_four && dA_nonnegative && dv_nonnegative && df_sign_opposes_f; }
};

// Central differences with relative step 1e-6; requires every domain margin
// (F, v, A, v - A, Fv - f^2) to be at least 1e-6.
GradientSignsReport gradient_signs_check(const BellmanPoint& p);

enum class SampleMode { mi99, mi18, neutr };

const char* to_string(SampleMode mode) noexcept;
std::optional<SampleMode> parse_sample_mode(const std::string& s);

struct SamplerStats {
  std::uint64_t emitted = 0;
  std::uint64_t rejected_cauchy_schwarz = 0;  // f^2 > F v at the parent
  std::uint64_t rejected_a_exceeds_v = 0;     // A > v at the parent
};

// Deterministic stream of admissible witnesses. Children: F, v ~ Exp(1),
// A ~ U[0, v], f ~ U[-sqrt(Fv), sqrt(Fv)]; a = |N(0,1)|, b ~ N(0,1).
class WitnessSampler {
public:
  explicit WitnessSampler(std::uint64_t seed);

  BellmanPoint point();
  Mi99Witness next_mi99();
  SplitWitness next_mi18();
  NeutrWitness next_neutr();

  const SamplerStats& stats() const noexcept { return stats_; }

private:
  std::mt19937_64 rng_;
  SamplerStats stats_;
};

inline constexpr int kMaxRejections = 10000;

struct WitnessBatch {
  SampleMode mode = SampleMode::mi18;
  std::vector<Mi99Witness> mi99;
  std::vector<SplitWitness> mi18;
  std::vector<NeutrWitness> neutr;
  SamplerStats stats;
};

WitnessBatch sample_admissible(std::uint64_t seed, std::size_t count, SampleMode mode);

struct CertificateRow {
  NodeId node = 1;
  BellmanPoint point;
  double slack = 0.0;           // |I|B(x_I) - |I-|B(x_I-) - |I+|B(x_I+) - alpha_I f_I^2
  double weighted_value = 0.0;  // |I| B(x_I)
};

struct TreeCertificate {
  std::vector<CertificateRow> rows;  // heap order
  double embedding_sum = 0.0;        // sum_I alpha_I f_I^2
  double telescoped = 0.0;           // sum of the per-node differences
  double root_bound = 0.0;           // |I0| B(x_I0)
  double final_bound = 0.0;          // 4 |I0| F_I0
  double min_slack = 0.0;
  bool passed = false;
};

// Node quadruples F_I = (phi^2)_I, f_I = (phi sqrt(Lambda))_I,
// A_I = (1/|I|) sum alpha_K (Lambda)_K^2, v_I = (Lambda)_I built through the
// one-step recursions, and the per-node main inequality checked at each node.
TreeCertificate certify_tree_embedding(const TreeMeasure& lambda, const NodeVector& phi,
                                       const AlphaSequence& alpha, double slack_tol = 1e-9);

}  // namespace carleson
