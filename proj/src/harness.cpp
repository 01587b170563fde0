#include "carleson/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include "carleson/bellman.hpp"
#include "carleson/bitree.hpp"
#include "carleson/carleson_tree.hpp"
#include "carleson/maximal.hpp"
#include "carleson/random.hpp"

namespace carleson {

namespace {

// Runs body(i) for i in [0, count) across hardware threads. Results must be
// written to per-index slots; the first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string json_str(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

Artifact counterexample(const std::string& command, std::size_t trial,
                        const std::vector<std::pair<std::string, double>>& values, const std::string& measure_json,
                        const std::string& extra = "") {
  std::string body = "{\"version\":" + std::to_string(kFormatVersion) + ",\"command\":" + json_str(command) +
                     ",\"trial\":" + std::to_string(trial);
  for (const auto& [k, v] : values) body += "," + json_str(k) + ":" + json_str(format_double(v));
  if (!extra.empty()) body += "," + extra;
  std::string m = measure_json;
  while (!m.empty() && m.back() == '\n') m.pop_back();
  body += ",\"measure\":" + m + "}\n";
  return {"counterexample.json", body};
}

std::string array_json(std::span<const double> xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_double(xs[i]);
  return out + "]";
}

TreeMeasure input_tree(const RunConfig& cfg, const char* command) {
  Measure m = parse_measure_file(*cfg.input);
  if (!std::holds_alternative<TreeMeasure>(m)) {
    fail(ErrorCode::invalid_argument, std::string(command) + " expects a tree measure file");
  }
  return std::get<TreeMeasure>(m);
}

BiMeasure input_bitree(const RunConfig& cfg, const char* command) {
  Measure m = parse_measure_file(*cfg.input);
  if (!std::holds_alternative<BiMeasure>(m)) {
    fail(ErrorCode::invalid_argument, std::string(command) + " expects a bitree measure file");
  }
  return std::get<BiMeasure>(m);
}

struct TreeInstance {
  TreeMeasure measure;
  std::mt19937_64 rng;
};

// Trial t: depth from --depth or 4 + t mod 5; support mode alternates.
TreeInstance tree_instance(const RunConfig& cfg, std::size_t t, int default_depth = -1) {
  std::mt19937_64 rng(trial_seed(cfg.seed, t));
  if (cfg.input) return {input_tree(cfg, "command"), std::move(rng)};
  int depth = cfg.depth ? *cfg.depth : (default_depth >= 0 ? default_depth : 4 + static_cast<int>(t % 5));
  TreeShape shape = build_tree(depth);
  SupportMode mode = t % 2 == 0 ? SupportMode::boundary_only : SupportMode::all_nodes;
  TreeMeasure mu = random_tree_measure(shape, mode, rng);
  return {std::move(mu), std::move(rng)};
}

std::size_t instance_count(const RunConfig& cfg) { return cfg.input ? 1 : cfg.trials; }

std::pair<int, int> bitree_depths(const RunConfig& cfg, std::size_t t, std::pair<int, int> fallback) {
  if (cfg.depths) return *cfg.depths;
  if (fallback.first < 0) return {1 + static_cast<int>(t % 5), 1 + static_cast<int>((t / 5) % 5)};
  return fallback;
}

struct BiInstance {
  BiMeasure measure;
  std::mt19937_64 rng;
};

BiInstance bi_instance(const RunConfig& cfg, std::size_t t, std::pair<int, int> fallback) {
  std::mt19937_64 rng(trial_seed(cfg.seed, t));
  if (cfg.input) return {input_bitree(cfg, "command"), std::move(rng)};
  auto [n, m] = bitree_depths(cfg, t, fallback);
  BiTreeShape shape = build_bitree(n, m);
  BiMeasure mu = random_bimeasure(shape, rng);
  return {std::move(mu), std::move(rng)};
}

CommandResult finish(Report& report, const RunConfig& cfg, bool passed, std::vector<Artifact> artifacts = {}) {
  report.seed = cfg.seed;
  report.summary.emplace_back("passed", passed);
  return {report.render(cfg.format), passed, std::move(artifacts)};
}

CommandResult run_tree_test(const RunConfig& cfg, bool embed_only) {
  const std::size_t count = instance_count(cfg);
  const double rel = cfg.tol.value_or(1e-9);
  struct Row {
    TreeMeasure mu;
    EmbeddingPairCheck check;
  };
  std::vector<Row> rows(count);
  parallel_for(count, [&](std::size_t t) {
    auto inst = tree_instance(cfg, t);
    rows[t].check = embedding_pair_check(inst.measure, rel);
    rows[t].mu = std::move(inst.measure);
  });

  Report report;
  report.command = embed_only ? "tree-embed" : "tree-test";
  if (embed_only) {
    report.columns = {"trial", "depth", "support_mode", "test_constant", "embedding_constant", "argmax_node",
                      "iterations", "converged"};
  } else {
    report.columns = {"trial", "depth", "support_mode", "c_test", "c_emb", "ratio", "iterations", "converged", "pass"};
  }
  bool passed = true;
  double max_ratio = 0.0;
  std::vector<Artifact> artifacts;
  for (std::size_t t = 0; t < count; ++t) {
    const auto& r = rows[t];
    const auto& rep = r.check.report;
    auto depth = static_cast<std::int64_t>(r.mu.shape().depth());
    std::string mode = to_string(r.mu.support_mode());
    if (embed_only) {
      report.rows.push_back({static_cast<std::int64_t>(t), depth, mode, rep.test_constant, rep.embedding_constant,
                             static_cast<std::int64_t>(rep.argmax_node), static_cast<std::int64_t>(rep.iterations),
                             rep.converged});
      if (!rep.converged && passed) {
        passed = false;
        artifacts.push_back(counterexample(report.command, t, {{"embedding_constant", rep.embedding_constant}},
                                           write_measure_file(r.mu), "\"reason\":\"power iteration did not converge\""));
      }
      continue;
    }
    report.rows.push_back({static_cast<std::int64_t>(t), depth, mode, rep.test_constant, rep.embedding_constant,
                           r.check.ratio, static_cast<std::int64_t>(rep.iterations), rep.converged, r.check.passed});
    max_ratio = std::max(max_ratio, r.check.ratio);
    if (!r.check.passed && passed) {
      passed = false;
      artifacts.push_back(counterexample(report.command, t,
                                         {{"c_test", rep.test_constant}, {"c_emb", rep.embedding_constant}},
                                         write_measure_file(r.mu)));
    }
  }
  report.summary.emplace_back("instances", static_cast<std::int64_t>(count));
  if (!embed_only) report.summary.emplace_back("max_ratio", max_ratio);
  return finish(report, cfg, passed, std::move(artifacts));
}

struct SampleOutcome {
  double worst = 0.0;
  std::size_t worst_index = 0;
  std::string worst_json;
};

std::string point_json(const BellmanPoint& p) {
  return "[" + format_double(p.F) + "," + format_double(p.f) + "," + format_double(p.A) + "," + format_double(p.v) +
         "]";
}

CommandResult run_bellman_sample(const RunConfig& cfg) {
  const std::string& mode = cfg.mode;
  WitnessSampler sampler(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::mt19937_64 aux(trial_seed(cfg.seed, 0xB311));
  // "upper" modes bound a quantity from above; the rest bound a slack from below.
  bool upper = mode == "neutr";
  double threshold;
  if (mode == "mi99" || mode == "mi18" || mode == "tangent") {
    threshold = cfg.tol ? -*cfg.tol : -1e-9;
  } else if (mode == "neutr") {
    threshold = cfg.tol.value_or(1e-12);
  } else if (mode == "range" || mode == "midpoint" || mode == "conc-est" || mode == "gradient") {
    threshold = cfg.tol ? -*cfg.tol : -1e-12;
  } else {
    fail(ErrorCode::invalid_argument, "unknown bellman-sample mode '" + mode +
                                          "' (mi99, mi18, neutr, range, midpoint, tangent, conc-est, gradient)");
  }

  SampleOutcome out;
  out.worst = upper ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  auto offer = [&](std::size_t i, double value, const std::function<std::string()>& describe) {
    bool worse = upper ? value > out.worst : value < out.worst;
    if (worse) {
      out.worst = value;
      out.worst_index = i;
      out.worst_json = describe();
    }
  };

  for (std::size_t i = 0; i < cfg.trials; ++i) {
    if (mode == "mi99") {
      auto w = sampler.next_mi99();
      offer(i, mi99_check(w.left, w.right, w.m), [&] {
        return "{\"left\":" + point_json(w.left) + ",\"right\":" + point_json(w.right) + ",\"m\":" + format_double(w.m) + "}";
      });
    } else if (mode == "mi18") {
      auto w = sampler.next_mi18();
      offer(i, mi18_check(w), [&] {
        return "{\"left\":" + point_json(w.left) + ",\"right\":" + point_json(w.right) + ",\"a\":" + format_double(w.a) +
               ",\"b\":" + format_double(w.b) + ",\"c\":" + format_double(w.c) + "}";
      });
    } else if (mode == "neutr") {
      auto w = sampler.next_neutr();
      offer(i, neutr_check(w.parent, w.a, w.b, w.c), [&] {
        return "{\"parent\":" + point_json(w.parent) + ",\"a\":" + format_double(w.a) + ",\"b\":" + format_double(w.b) +
               ",\"c\":" + format_double(w.c) + "}";
      });
    } else if (mode == "range") {
      auto p = sampler.point();
      double b = bellman_value(p);
      double margin = std::min(b, 4.0 * p.F - b) / std::max(1.0, 4.0 * p.F);
      offer(i, margin, [&] { return "{\"point\":" + point_json(p) + "}"; });
    } else if (mode == "midpoint") {
      auto p = sampler.point();
      auto q = sampler.point();
      double gap = bellman_value(midpoint(p, q)) - 0.5 * (bellman_value(p) + bellman_value(q));
      offer(i, gap, [&] { return "{\"p\":" + point_json(p) + ",\"q\":" + point_json(q) + "}"; });
    } else if (mode == "tangent") {
      auto x = sampler.point();
      auto xs = sampler.point();
      offer(i, concavity_gap(x, xs), [&] { return "{\"x\":" + point_json(x) + ",\"x_star\":" + point_json(xs) + "}"; });
    } else if (mode == "conc-est") {
      auto p = sampler.point();
      double c = unit(aux) * p.A;
      auto mg = conc_est_margins(p, c);
      offer(i, std::min(mg.sharp, mg.coarse),
            [&] { return "{\"point\":" + point_json(p) + ",\"c\":" + format_double(c) + "}"; });
    } else {
      // gradient: resample until the point is comfortably inside the domain.
      BellmanPoint p;
      do {
        p = sampler.point();
      } while (p.A < 1e-3 || p.v - p.A < 1e-3 || p.F * p.v - p.f * p.f < 1e-3 || p.F < 1e-3);
      auto rep = gradient_signs_check(p);
      offer(i, rep.passed() ? 0.0 : -1.0, [&] { return "{\"point\":" + point_json(p) + "}"; });
    }
  }
  bool passed = cfg.trials == 0 || (upper ? out.worst <= threshold : out.worst >= threshold);

  Report report;
  report.command = "bellman-sample";
  report.columns = {"mode", "trials", upper ? "max_value" : "min_slack", "worst_trial", "threshold",
                    "rejected_cauchy_schwarz", "rejected_a_exceeds_v", "pass"};
  double worst = cfg.trials == 0 ? 0.0 : out.worst;
  report.rows.push_back({mode, static_cast<std::int64_t>(cfg.trials), worst,
                         static_cast<std::int64_t>(out.worst_index), threshold,
                         static_cast<std::int64_t>(sampler.stats().rejected_cauchy_schwarz),
                         static_cast<std::int64_t>(sampler.stats().rejected_a_exceeds_v), passed});
  std::vector<Artifact> artifacts;
  if (!passed) {
    artifacts.push_back({"counterexample.json", "{\"version\":1,\"command\":\"bellman-sample\",\"mode\":" +
                                                    json_str(mode) + ",\"trial\":" + std::to_string(out.worst_index) +
                                                    ",\"value\":" + json_str(format_double(out.worst)) +
                                                    ",\"witness\":" + out.worst_json + "}\n"});
  }
  return finish(report, cfg, passed, std::move(artifacts));
}

CommandResult run_maximal_verify(const RunConfig& cfg) {
  const std::size_t count = instance_count(cfg);
  const double tol = cfg.tol.value_or(1e-9);
  struct Row {
    TreeMeasure lambda;
    NodeVector phi;
    double scale = 1.0;
    MaximalCheck check;
    StoppingReport invariants;
    std::size_t stopping = 0;
    std::size_t generations = 0;
  };
  std::vector<Row> rows(count);
  parallel_for(count, [&](std::size_t t) {
    auto inst = tree_instance(cfg, t);
    Row& r = rows[t];
    double c = carleson_ratios(inst.measure).test_constant;
    r.scale = c > 0.0 ? 1.0 / c : 1.0;
    r.lambda = inst.measure.scaled(r.scale);
    r.phi = random_node_function(r.lambda.shape(), !cfg.signed_phi, inst.rng);
    r.check = maximal_theorem_check(r.lambda, r.phi, tol);
    auto dec = stopping_decomposition(r.lambda, r.phi);
    r.stopping = dec.vertices.size();
    r.generations = dec.generations.size();
    r.invariants = verify_stopping_invariants(dec, r.lambda, r.phi);
  });

  Report report;
  report.command = "maximal-verify";
  report.columns = {"trial", "depth", "support_mode", "lhs", "rhs", "stopping_sum", "ratio", "stopping_vertices",
                    "generations", "invariants", "pass"};
  bool passed = true;
  double max_ratio = 0.0;
  std::vector<Artifact> artifacts;
  for (std::size_t t = 0; t < count; ++t) {
    const Row& r = rows[t];
    bool inv = r.invariants.passed();
    bool ok = r.check.passed && r.check.intermediate_ok && inv;
    if (cfg.signed_phi) ok = true;
    max_ratio = std::max(max_ratio, r.check.ratio);
    report.rows.push_back({static_cast<std::int64_t>(t), static_cast<std::int64_t>(r.lambda.shape().depth()),
                           std::string(to_string(r.lambda.support_mode())), r.check.lhs, r.check.rhs,
                           r.check.stopping_sum, r.check.ratio, static_cast<std::int64_t>(r.stopping),
                           static_cast<std::int64_t>(r.generations), inv, ok});
    if (!ok && passed) {
      passed = false;
      std::string failed;
      for (const auto& c : r.invariants.checks) {
        if (!c.passed) failed += (failed.empty() ? "" : ",") + json_str(c.name);
      }
      artifacts.push_back(counterexample(report.command, t,
                                         {{"lhs", r.check.lhs}, {"rhs", r.check.rhs}, {"stopping_sum", r.check.stopping_sum}},
                                         write_measure_file(r.lambda),
                                         "\"failed_invariants\":[" + failed + "],\"phi\":" + array_json(r.phi.values())));
    }
  }
  report.summary.emplace_back("instances", static_cast<std::int64_t>(count));
  report.summary.emplace_back("max_ratio", max_ratio);
  report.summary.emplace_back("signed_phi", cfg.signed_phi);
  return finish(report, cfg, passed, std::move(artifacts));
}

CommandResult run_certify(const RunConfig& cfg) {
  const std::size_t count = instance_count(cfg);
  const double tol = cfg.tol.value_or(1e-9);
  struct Row {
    TreeMeasure lambda;
    NodeVector phi;
    TreeCertificate cert;
  };
  std::vector<Row> rows(count);
  parallel_for(count, [&](std::size_t t) {
    auto inst = tree_instance(cfg, t, 6);
    Row& r = rows[t];
    AlphaSequence alpha = AlphaSequence::length_squared(inst.measure.shape());
    double c = alpha_test_constant(inst.measure, alpha).constant;
    r.lambda = c > 0.0 ? inst.measure.scaled(1.0 / c) : inst.measure;
    r.phi = random_node_function(r.lambda.shape(), false, inst.rng);
    r.cert = certify_tree_embedding(r.lambda, r.phi, alpha, tol);
  });
  Report report;
  report.command = "certify";
  report.columns = {"trial", "depth", "support_mode", "min_slack", "embedding_sum", "root_bound", "final_bound", "pass"};
  bool passed = true;
  std::vector<Artifact> artifacts;
  for (std::size_t t = 0; t < count; ++t) {
    const Row& r = rows[t];
    report.rows.push_back({static_cast<std::int64_t>(t), static_cast<std::int64_t>(r.lambda.shape().depth()),
                           std::string(to_string(r.lambda.support_mode())), r.cert.min_slack, r.cert.embedding_sum,
                           r.cert.root_bound, r.cert.final_bound, r.cert.passed});
    if (!r.cert.passed && passed) {
      passed = false;
      artifacts.push_back(counterexample(report.command, t,
                                         {{"min_slack", r.cert.min_slack}, {"embedding_sum", r.cert.embedding_sum},
                                          {"final_bound", r.cert.final_bound}},
                                         write_measure_file(r.lambda), "\"phi\":" + array_json(r.phi.values())));
    }
  }
  report.summary.emplace_back("instances", static_cast<std::int64_t>(count));
  return finish(report, cfg, passed, std::move(artifacts));
}

CommandResult run_bitree_onebox(const RunConfig& cfg) {
  const std::size_t count = instance_count(cfg);
  Report report;
  report.command = "bitree-onebox";
  report.columns = {"trial", "n", "m", "total_mass", "one_box", "argmax_u", "argmax_v"};
  std::vector<std::pair<BiMeasure, OneBox>> rows(count);
  parallel_for(count, [&](std::size_t t) {
    auto inst = bi_instance(cfg, t, {2, 2});
    rows[t].second = one_box_constant(inst.measure);
    rows[t].first = std::move(inst.measure);
  });
  for (std::size_t t = 0; t < count; ++t) {
    const auto& [mu, ob] = rows[t];
    report.rows.push_back({static_cast<std::int64_t>(t), static_cast<std::int64_t>(mu.shape().n()),
                           static_cast<std::int64_t>(mu.shape().m()), mu.total(), ob.constant,
                           static_cast<std::int64_t>(ob.argmax.u), static_cast<std::int64_t>(ob.argmax.v)});
  }
  return finish(report, cfg, true);
}

SetTestOptions parse_strategy(const std::string& s, std::uint64_t seed) {
  SetTestOptions o;
  o.seed = seed;
  auto number_after = [&s](std::size_t colon) -> long long {
    long long v = 0;
    const char* first = s.data() + colon + 1;
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || v < 1) {
      fail(ErrorCode::invalid_argument, "bad strategy parameter in '" + s + "'");
    }
    return v;
  };
  if (s == "exhaustive") {
    o.strategy = SetStrategy::exhaustive;
  } else if (s.rfind("rect-unions", 0) == 0) {
    o.strategy = SetStrategy::rect_unions;
    o.k = s.size() > 11 && s[11] == ':' ? static_cast<int>(number_after(11)) : 2;
  } else if (s.rfind("random", 0) == 0) {
    o.strategy = SetStrategy::random_subsets;
    o.trials = s.size() > 6 && s[6] == ':' ? static_cast<std::size_t>(number_after(6)) : 1000;
  } else {
    fail(ErrorCode::invalid_argument, "unknown strategy '" + s + "' (exhaustive, rect-unions:K, random:T)");
  }
  return o;
}

CommandResult run_bitree_settest(const RunConfig& cfg) {
  const std::size_t count = instance_count(cfg);
  const double tol = cfg.tol.value_or(1e-9);
  struct Row {
    BiMeasure mu;
    double one_box = 0.0;
    SetTest set;
    BiEmbedding emb;
  };
  std::vector<Row> rows(count);
  parallel_for(count, [&](std::size_t t) {
    auto inst = bi_instance(cfg, t, {2, 2});
    Row& r = rows[t];
    r.one_box = one_box_constant(inst.measure).constant;
    r.set = set_test_constant(inst.measure, parse_strategy(cfg.strategy, trial_seed(cfg.seed, t) ^ 0x5e7));
    r.emb = bi_embedding_constant(inst.measure);
    r.mu = std::move(inst.measure);
  });
  Report report;
  report.command = "bitree-settest";
  report.columns = {"trial", "n", "m", "one_box", "set_test", "embedding", "embedding_over_set", "witness_cells",
                    "evaluated", "pass"};
  bool passed = true;
  double max_ratio = 0.0;
  std::vector<Artifact> artifacts;
  for (std::size_t t = 0; t < count; ++t) {
    const Row& r = rows[t];
    bool ok = r.set.constant <= r.emb.constant + tol;
    double ratio = r.set.constant > 0.0 ? r.emb.constant / r.set.constant : 0.0;
    max_ratio = std::max(max_ratio, ratio);
    report.rows.push_back({static_cast<std::int64_t>(t), static_cast<std::int64_t>(r.mu.shape().n()),
                           static_cast<std::int64_t>(r.mu.shape().m()), r.one_box, r.set.constant, r.emb.constant,
                           ratio, static_cast<std::int64_t>(r.set.witness.size()),
                           static_cast<std::int64_t>(r.set.evaluated), ok});
    if (!ok && passed) {
      passed = false;
      artifacts.push_back(counterexample(report.command, t, {{"set_test", r.set.constant}, {"embedding", r.emb.constant}},
                                         write_measure_file(r.mu)));
    }
  }
  report.summary.emplace_back("strategy", cfg.strategy);
  report.summary.emplace_back("max_embedding_over_set", max_ratio);
  return finish(report, cfg, passed, std::move(artifacts));
}

CommandResult run_bitree_certify(const RunConfig& cfg) {
  const std::size_t count = instance_count(cfg);
  struct Row {
    BiMeasure mu;
    std::vector<double> phi;
    BiCertificate cert;
    CubeCheck cube;
  };
  std::vector<Row> rows(count);
  parallel_for(count, [&](std::size_t t) {
    auto inst = bi_instance(cfg, t, {-1, -1});
    Row& r = rows[t];
    r.mu = normalize_one_box(inst.measure);
    r.phi = random_cell_function(r.mu.shape().cell_count(), t % 2 == 0, inst.rng);
    r.cert = bitree_bellman_certify(r.mu, r.phi, cfg.tol.value_or(1e-12));
    r.cube = cube_embedding_check(r.mu, r.phi);
  });
  Report report;
  report.command = "bitree-certify";
  report.columns = {"trial", "n", "m", "martingale_error", "a_gain_margin", "row_slack", "lhs", "final_bound",
                    "ratio", "cube_pass", "pass"};
  bool passed = true;
  std::vector<Artifact> artifacts;
  for (std::size_t t = 0; t < count; ++t) {
    const Row& r = rows[t];
    bool ok = r.cert.passed() && r.cube.passed;
    report.rows.push_back({static_cast<std::int64_t>(t), static_cast<std::int64_t>(r.mu.shape().n()),
                           static_cast<std::int64_t>(r.mu.shape().m()), r.cert.worst_martingale, r.cert.worst_a_gain,
                           r.cert.worst_row_slack, r.cube.lhs, r.cert.final_bound, r.cube.ratio, r.cube.passed, ok});
    if (!ok && passed) {
      passed = false;
      artifacts.push_back(counterexample(report.command, t, {{"lhs", r.cube.lhs}, {"rhs", r.cube.rhs}},
                                         write_measure_file(r.mu), "\"phi\":" + array_json(r.phi)));
    }
  }
  report.summary.emplace_back("instances", static_cast<std::int64_t>(count));
  return finish(report, cfg, passed, std::move(artifacts));
}

CommandResult run_gap_probe(const RunConfig& cfg) {
  GapProbeConfig gc;
  auto [n, m] = cfg.depths.value_or(std::pair{2, 2});
  gc.n = n;
  gc.m = m;
  gc.trials = cfg.trials;
  gc.seed = cfg.seed;
  gc.restarts = cfg.restarts;
  if (cfg.optimizer == "anneal") {
    gc.optimizer = GapOptimizer::anneal;
  } else if (cfg.optimizer == "random") {
    gc.optimizer = GapOptimizer::random;
  } else {
    fail(ErrorCode::invalid_argument, "unknown optimizer '" + cfg.optimizer + "' (anneal, random)");
  }
  if (cfg.tol) gc.power_tol = *cfg.tol;
  GapProbeReport rep = gap_probe(gc);
  Report report;
  report.command = "gap-probe";
  report.columns = {"step", "gap", "one_box", "embedding"};
  for (const auto& s : rep.trajectory) {
    report.rows.push_back({static_cast<std::int64_t>(s.step), s.gap, s.one_box, s.embedding});
  }
  report.summary.emplace_back("n", static_cast<std::int64_t>(n));
  report.summary.emplace_back("m", static_cast<std::int64_t>(m));
  report.summary.emplace_back("optimizer", cfg.optimizer);
  report.summary.emplace_back("best_gap", rep.best_gap);
  report.summary.emplace_back("accepted", static_cast<std::int64_t>(rep.accepted));
  std::vector<Artifact> artifacts;
  if (!rep.best_cells.empty()) {
    artifacts.push_back({"best-measure.json", write_measure_file(BiMeasure(build_bitree(n, m), rep.best_cells))});
  }
  return finish(report, cfg, true, std::move(artifacts));
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    fail(ErrorCode::invalid_argument, "--" + key + ": cannot parse '" + value + "'");
  }
  return out;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"tree-test",     "tree-embed",      "bellman-sample",
                                                 "maximal-verify", "bitree-onebox",  "bitree-settest",
                                                 "bitree-certify", "gap-probe",      "certify"};
  return names;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "seed") {
    config.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "trials") {
    config.trials = parse_number<std::size_t>(key, value);
  } else if (key == "depth") {
    config.depth = parse_number<int>(key, value);
    if (*config.depth < 0) fail(ErrorCode::invalid_argument, "--depth must be nonnegative");
  } else if (key == "depths") {
    auto comma = value.find(',');
    if (comma == std::string::npos) fail(ErrorCode::invalid_argument, "--depths expects n,m");
    int n = parse_number<int>(key, value.substr(0, comma));
    int m = parse_number<int>(key, value.substr(comma + 1));
    if (n < 0 || m < 0) fail(ErrorCode::invalid_argument, "--depths must be nonnegative");
    config.depths = std::pair{n, m};
  } else if (key == "tol") {
    double t = parse_number<double>(key, value);
    if (!(t > 0.0)) fail(ErrorCode::invalid_argument, "--tol must be positive");
    config.tol = t;
  } else if (key == "format") {
    if (value == "csv") {
      config.format = OutputFormat::csv;
    } else if (value == "json") {
      config.format = OutputFormat::json;
    } else {
      fail(ErrorCode::invalid_argument, "--format must be csv or json");
    }
  } else if (key == "mode") {
    config.mode = value;
  } else if (key == "strategy") {
    config.strategy = value;
  } else if (key == "optimizer") {
    config.optimizer = value;
  } else if (key == "restarts") {
    config.restarts = parse_number<std::size_t>(key, value);
  } else if (key == "signed") {
    if (value != "true" && value != "false") fail(ErrorCode::invalid_argument, "--signed expects true|false");
    config.signed_phi = value == "true";
  } else if (key == "input") {
    config.input = value;
  } else {
    fail(ErrorCode::invalid_argument, "unknown setting '" + key + "'");
  }
}

CommandResult run_command(const std::string& command, const RunConfig& config) {
  if (command == "tree-test") return run_tree_test(config, false);
  if (command == "tree-embed") return run_tree_test(config, true);
  if (command == "bellman-sample") return run_bellman_sample(config);
  if (command == "maximal-verify") return run_maximal_verify(config);
  if (command == "certify") return run_certify(config);
  if (command == "bitree-onebox") return run_bitree_onebox(config);
  if (command == "bitree-settest") return run_bitree_settest(config);
  if (command == "bitree-certify") return run_bitree_certify(config);
  if (command == "gap-probe") return run_gap_probe(config);
  fail(ErrorCode::invalid_argument, "unknown command '" + command + "'");
}

}  // namespace carleson
