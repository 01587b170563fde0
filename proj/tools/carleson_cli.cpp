#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "carleson/carleson.h"

namespace {

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for dyadic Carleson embeddings on trees and bi-trees"};
  app.require_subcommand(1);

  std::map<std::string, std::string> settings;
  std::string in_path;
  std::string out_path;

  std::vector<std::string> names;
  for (const char* const* n = crl_command_names(); *n; ++n) names.emplace_back(*n);
  for (const auto& name : names) {
    CLI::App* sub = app.add_subcommand(name);
    auto add = [&](const char* flag, const char* key, const char* help) {
      sub->add_option_function<std::string>(flag, [&settings, key](const std::string& v) { settings[key] = v; }, help);
    };
    add("--seed", "seed", "base RNG seed");
    add("--trials", "trials", "number of trials (steps for gap-probe)");
    add("--depth", "depth", "tree depth; unset cycles through 4..8");
    add("--depths", "depths", "bi-tree depths n,m");
    add("--tol", "tol", "tolerance (command-specific default)");
    add("--format", "format", "csv or json");
    add("--mode", "mode", "bellman-sample mode: mi99, mi18, neutr, range, midpoint, tangent, conc-est, gradient");
    add("--strategy", "strategy", "bitree-settest: exhaustive, rect-unions:K, random:T");
    add("--optimizer", "optimizer", "gap-probe: anneal or random");
    add("--restarts", "restarts", "gap-probe restarts");
    sub->add_flag_function("--signed", [&settings](std::int64_t) { settings["signed"] = "true"; },
                           "signed test functions for maximal-verify (no assertions)");
    sub->add_option("--in", in_path, "measure file (JSON)");
    sub->add_option("--out", out_path, "report path; artifacts go to the same directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  std::string command = app.get_subcommands().front()->get_name();

  crl_run_config* cfg = nullptr;
  if (crl_run_config_create(&cfg) != CRL_OK) {
    std::cerr << "error: " << crl_last_error() << "\n";
    return 1;
  }
  auto fail = [&](const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    crl_run_config_free(cfg);
    return 1;
  };

  for (const auto& [key, value] : settings) {
    if (crl_run_config_set(cfg, key.c_str(), value.c_str()) != CRL_OK) return fail(crl_last_error());
  }
  if (!in_path.empty()) {
    std::string bytes;
    if (!read_file(in_path, bytes)) return fail("cannot read " + in_path);
    if (crl_run_config_set(cfg, "input", bytes.c_str()) != CRL_OK) return fail(crl_last_error());
  }

  crl_report* report = nullptr;
  crl_status st = crl_run(command.c_str(), cfg, &report);
  if (st != CRL_OK) return fail(std::string(crl_status_name(st)) + ": " + crl_last_error());
  crl_run_config_free(cfg);

  std::filesystem::path artifact_dir = ".";
  int rc = crl_report_passed(report) ? 0 : 2;
  if (out_path.empty()) {
    std::cout << crl_report_output(report);
  } else {
    artifact_dir = std::filesystem::path(out_path).parent_path();
    if (artifact_dir.empty()) artifact_dir = ".";
    if (!write_file(out_path, crl_report_output(report))) {
      std::cerr << "error: cannot write " << out_path << "\n";
      rc = 1;
    }
  }
  for (std::size_t i = 0; i < crl_report_artifact_count(report); ++i) {
    auto path = artifact_dir / crl_report_artifact_name(report, i);
    if (!write_file(path, crl_report_artifact_content(report, i))) {
      std::cerr << "error: cannot write " << path.string() << "\n";
      rc = 1;
    } else if (rc == 2) {
      std::cerr << "assertion failed; wrote " << path.string() << "\n";
    }
  }
  crl_report_free(report);
  return rc;
}
