#include "carleson/carleson.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "carleson/bellman.hpp"
#include "carleson/bitree.hpp"
#include "carleson/carleson_tree.hpp"
#include "carleson/harness.hpp"
#include "carleson/io.hpp"

struct crl_tree_measure {
  carleson::TreeMeasure value;
};
struct crl_bi_measure {
  carleson::BiMeasure value;
};
struct crl_run_config {
  carleson::RunConfig value;
};
struct crl_report {
  carleson::CommandResult value;
};

namespace {

thread_local std::string last_error;

crl_status set_error(crl_status status, const char* msg) {
  last_error = msg;
  return status;
}

template <class F>
crl_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return CRL_OK;
  } catch (const carleson::Error& e) {
    return set_error(static_cast<crl_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(CRL_ERR_SIZE, "out of memory");
  } catch (const std::exception& e) {
    return set_error(CRL_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(CRL_ERR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define CRL_REQUIRE(ptr) \
  if ((ptr) == nullptr) return set_error(CRL_ERR_NULL, #ptr " is null")

}  // namespace

extern "C" {

const char* crl_last_error(void) { return last_error.c_str(); }

const char* crl_status_name(crl_status status) {
  switch (status) {
    case CRL_OK: return "ok";
    case CRL_ERR_NULL: return "null";
    default:
      if (status >= CRL_ERR_SIZE && status <= CRL_ERR_INTERNAL) {
        return carleson::to_string(static_cast<carleson::ErrorCode>(status));
      }
      return "unknown";
  }
}

int crl_format_version(void) { return carleson::kFormatVersion; }

void crl_string_free(char* s) { delete[] s; }

crl_status crl_tree_measure_create(int depth, crl_support_mode mode, const double* masses, size_t count,
                                   crl_tree_measure** out) {
  CRL_REQUIRE(out);
  CRL_REQUIRE(masses);
  return guarded([&] {
    auto shape = carleson::build_tree(depth);
    if (count != shape.node_count()) {
      carleson::fail(carleson::ErrorCode::shape_mismatch, "expected " + std::to_string(shape.node_count()) +
                                                              " masses, got " + std::to_string(count));
    }
    auto sm = mode == CRL_SUPPORT_BOUNDARY_ONLY ? carleson::SupportMode::boundary_only : carleson::SupportMode::all_nodes;
    *out = new crl_tree_measure{carleson::TreeMeasure(shape, std::vector<double>(masses, masses + count), sm)};
  });
}

void crl_tree_measure_free(crl_tree_measure* mu) { delete mu; }

crl_status crl_tree_measure_depth(const crl_tree_measure* mu, int* out) {
  CRL_REQUIRE(mu);
  CRL_REQUIRE(out);
  *out = mu->value.shape().depth();
  return CRL_OK;
}

crl_status crl_tree_measure_to_json(const crl_tree_measure* mu, char** out) {
  CRL_REQUIRE(mu);
  CRL_REQUIRE(out);
  return guarded([&] { *out = copy_string(carleson::write_measure_file(mu->value)); });
}

crl_status crl_tree_test_constant(const crl_tree_measure* mu, double* constant, size_t* argmax_node) {
  CRL_REQUIRE(mu);
  CRL_REQUIRE(constant);
  return guarded([&] {
    auto r = carleson::carleson_ratios(mu->value);
    *constant = r.test_constant;
    if (argmax_node) *argmax_node = r.argmax;
  });
}

crl_status crl_tree_embedding_constant(const crl_tree_measure* mu, double tol, int max_iter, double* constant,
                                       int* converged) {
  CRL_REQUIRE(mu);
  CRL_REQUIRE(constant);
  return guarded([&] {
    auto r = carleson::embedding_constant(mu->value, tol, max_iter);
    *constant = r.embedding_constant;
    if (converged) *converged = r.converged ? 1 : 0;
  });
}

crl_status crl_tree_potential(const crl_tree_measure* mu, double* out, size_t count) {
  CRL_REQUIRE(mu);
  CRL_REQUIRE(out);
  return guarded([&] {
    auto v = carleson::potential(mu->value);
    if (count != v.size()) carleson::fail(carleson::ErrorCode::shape_mismatch, "output buffer has wrong length");
    std::memcpy(out, v.values().data(), count * sizeof(double));
  });
}

crl_status crl_bellman_value(double F, double f, double A, double v, double* out) {
  CRL_REQUIRE(out);
  return guarded([&] { *out = carleson::bellman_value({F, f, A, v}); });
}

crl_status crl_bi_measure_create(int n, int m, const double* cells, size_t count, crl_bi_measure** out) {
  CRL_REQUIRE(out);
  CRL_REQUIRE(cells);
  return guarded([&] {
    auto shape = carleson::build_bitree(n, m);
    if (count != shape.cell_count()) {
      carleson::fail(carleson::ErrorCode::shape_mismatch,
                     "expected " + std::to_string(shape.cell_count()) + " cells, got " + std::to_string(count));
    }
    *out = new crl_bi_measure{carleson::BiMeasure(shape, std::vector<double>(cells, cells + count))};
  });
}

void crl_bi_measure_free(crl_bi_measure* mu) { delete mu; }

crl_status crl_bi_measure_to_json(const crl_bi_measure* mu, char** out) {
  CRL_REQUIRE(mu);
  CRL_REQUIRE(out);
  return guarded([&] { *out = copy_string(carleson::write_measure_file(mu->value)); });
}

crl_status crl_bi_one_box(const crl_bi_measure* mu, double* out) {
  CRL_REQUIRE(mu);
  CRL_REQUIRE(out);
  return guarded([&] { *out = carleson::one_box_constant(mu->value).constant; });
}

crl_status crl_bi_embedding_constant(const crl_bi_measure* mu, double tol, int max_iter, double* out) {
  CRL_REQUIRE(mu);
  CRL_REQUIRE(out);
  return guarded([&] { *out = carleson::bi_embedding_constant(mu->value, tol, max_iter).constant; });
}

crl_status crl_bi_cube_check(const crl_bi_measure* mu, const double* phi, size_t count, double* lhs, double* rhs) {
  CRL_REQUIRE(mu);
  CRL_REQUIRE(phi);
  return guarded([&] {
    auto c = carleson::cube_embedding_check(mu->value, std::span<const double>(phi, count));
    if (lhs) *lhs = c.lhs;
    if (rhs) *rhs = c.rhs;
  });
}

crl_status crl_measure_parse(const char* bytes, size_t len, crl_tree_measure** tree_out, crl_bi_measure** bi_out) {
  CRL_REQUIRE(bytes);
  CRL_REQUIRE(tree_out);
  CRL_REQUIRE(bi_out);
  *tree_out = nullptr;
  *bi_out = nullptr;
  return guarded([&] {
    auto m = carleson::parse_measure_file(std::string_view(bytes, len));
    if (auto* t = std::get_if<carleson::TreeMeasure>(&m)) {
      *tree_out = new crl_tree_measure{std::move(*t)};
    } else {
      *bi_out = new crl_bi_measure{std::move(std::get<carleson::BiMeasure>(m))};
    }
  });
}

crl_status crl_run_config_create(crl_run_config** out) {
  CRL_REQUIRE(out);
  return guarded([&] { *out = new crl_run_config{}; });
}

void crl_run_config_free(crl_run_config* cfg) { delete cfg; }

crl_status crl_run_config_set(crl_run_config* cfg, const char* key, const char* value) {
  CRL_REQUIRE(cfg);
  CRL_REQUIRE(key);
  CRL_REQUIRE(value);
  return guarded([&] { carleson::apply_setting(cfg->value, key, value); });
}

crl_status crl_run(const char* command, const crl_run_config* cfg, crl_report** out) {
  CRL_REQUIRE(command);
  CRL_REQUIRE(cfg);
  CRL_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new crl_report{carleson::run_command(command, cfg->value)}; });
}

void crl_report_free(crl_report* report) { delete report; }

const char* crl_report_output(const crl_report* report) { return report ? report->value.output.c_str() : ""; }

int crl_report_passed(const crl_report* report) { return report && report->value.passed ? 1 : 0; }

size_t crl_report_artifact_count(const crl_report* report) { return report ? report->value.artifacts.size() : 0; }

const char* crl_report_artifact_name(const crl_report* report, size_t i) {
  if (!report || i >= report->value.artifacts.size()) return nullptr;
  return report->value.artifacts[i].name.c_str();
}

const char* crl_report_artifact_content(const crl_report* report, size_t i) {
  if (!report || i >= report->value.artifacts.size()) return nullptr;
  return report->value.artifacts[i].content.c_str();
}

const char* const* crl_command_names(void) {
  static const std::vector<const char*> names = [] {
    std::vector<const char*> v;
    for (const auto& n : carleson::command_names()) v.push_back(n.c_str());
    v.push_back(nullptr);
    return v;
  }();
  return names.data();
}

}  // extern "C"
