#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "carleson/io.hpp"

namespace carleson {

struct RunConfig {
  std::uint64_t seed = 1;
  std::size_t trials = 100;
  std::optional<int> depth;                    // single trees; unset cycles through 4..8
  std::optional<std::pair<int, int>> depths;   // bi-trees
  std::optional<double> tol;                   // command-specific default when unset
  OutputFormat format = OutputFormat::csv;
  std::string mode = "mi18";                   // bellman-sample
  std::string strategy = "exhaustive";         // bitree-settest: exhaustive | rect-unions:K | random:T
  std::string optimizer = "anneal";            // gap-probe: anneal | random
  std::size_t restarts = 4;                    // gap-probe
  bool signed_phi = false;                     // maximal-verify: experimental, no assertions
  std::optional<std::string> input;            // measure file contents (--in)
};

struct Artifact {
  std::string name;
  std::string content;
};

struct CommandResult {
  std::string output;
  bool passed = true;
  std::vector<Artifact> artifacts;
};

const std::vector<std::string>& command_names();

// Applies a "key=value"-style setting; keys mirror the CLI flags.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

// Runs one subcommand. Library errors (bad input, size guard, ...) propagate
// as carleson::Error; assertion failures come back as passed == false with a
// counterexample artifact.
CommandResult run_command(const std::string& command, const RunConfig& config);

}  // namespace carleson
