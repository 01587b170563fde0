#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "carleson/bitree.hpp"
#include "carleson/tree.hpp"

namespace carleson {

inline constexpr int kFormatVersion = 1;

using Measure = std::variant<TreeMeasure, BiMeasure>;

// Measure files (JSON):
//   {"version":1, "kind":"tree", "depth":N, "support_mode":"boundary-only"|"all-nodes",
//    "masses":[... heap order, 2^(N+1)-1 values ...]}
//   {"version":1, "kind":"bitree", "depths":[n,m],
//    "masses":[... row-major 2^n x 2^m grid, flat or as rows ...]}
// "version" may be omitted. Unknown keys are rejected.
Measure parse_measure_file(std::string_view bytes);
std::string write_measure_file(const TreeMeasure& mu);
std::string write_measure_file(const BiMeasure& mu);

// Shortest round-trip decimal representation.
std::string format_double(double x);

using Cell = std::variant<std::int64_t, double, bool, std::string>;

enum class OutputFormat { csv, json };

// A table of trial rows plus summary fields, rendered as CSV (with '#'
// comment header and summary lines) or as one JSON document.
struct Report {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, Cell>> summary;

  std::string render(OutputFormat format) const;
};

}  // namespace carleson
