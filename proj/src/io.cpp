#include "carleson/io.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

namespace carleson {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& where, const std::string& why) {
  fail(ErrorCode::validation, where + ": " + why);
}

void reject_unknown_keys(const json& doc, const std::set<std::string>& allowed) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!allowed.count(it.key())) invalid(it.key(), "unknown field");
  }
}

int read_depth(const json& v, const std::string& where) {
  if (!v.is_number_integer()) invalid(where, "must be an integer");
  auto d = v.get<std::int64_t>();
  if (d < 0 || d > 40) invalid(where, "out of range (" + std::to_string(d) + ")");
  return static_cast<int>(d);
}

double read_mass(const json& v, const std::string& where) {
  if (!v.is_number()) invalid(where, "mass must be a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) invalid(where, "mass must be finite");
  if (x < 0.0) invalid(where, "negative mass " + format_double(x));
  return x;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Measure parse_measure_file(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse, "measure file: parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) invalid("measure file", "top level must be an object");
  if (doc.contains("version")) {
    const json& v = doc["version"];
    if (!v.is_number_integer() || v.get<std::int64_t>() != kFormatVersion) {
      invalid("version", "unsupported version (expected " + std::to_string(kFormatVersion) + ")");
    }
  }
  if (!doc.contains("kind") || !doc["kind"].is_string()) invalid("kind", "missing or not a string");
  const std::string kind = doc["kind"].get<std::string>();
  if (!doc.contains("masses") || !doc["masses"].is_array()) invalid("masses", "missing or not an array");
  const json& masses = doc["masses"];

  if (kind == "tree") {
    reject_unknown_keys(doc, {"version", "kind", "depth", "support_mode", "masses"});
    if (!doc.contains("depth")) invalid("depth", "missing");
    int depth = read_depth(doc["depth"], "depth");
    SupportMode mode = SupportMode::all_nodes;
    if (doc.contains("support_mode")) {
      const json& m = doc["support_mode"];
      if (m == "boundary-only") {
        mode = SupportMode::boundary_only;
      } else if (m != "all-nodes") {
        invalid("support_mode", "expected \"boundary-only\" or \"all-nodes\"");
      }
    }
    TreeShape shape = build_tree(depth);
    if (masses.size() != shape.node_count()) {
      invalid("masses", "expected " + std::to_string(shape.node_count()) + " values for depth " +
                            std::to_string(depth) + ", got " + std::to_string(masses.size()));
    }
    std::vector<double> m(masses.size());
    for (std::size_t i = 0; i < masses.size(); ++i) {
      m[i] = read_mass(masses[i], "masses[" + std::to_string(i) + "]");
      if (mode == SupportMode::boundary_only && !shape.is_leaf(i + 1) && m[i] != 0.0) {
        invalid("masses[" + std::to_string(i) + "]", "boundary-only measure has mass at interior node " +
                                                        std::to_string(i + 1));
      }
    }
    return TreeMeasure(shape, std::move(m), mode);
  }

  if (kind == "bitree") {
    reject_unknown_keys(doc, {"version", "kind", "depths", "support_mode", "masses"});
    if (!doc.contains("depths") || !doc["depths"].is_array() || doc["depths"].size() != 2) {
      invalid("depths", "expected a pair [n, m]");
    }
    if (doc.contains("support_mode") && doc["support_mode"] != "boundary-only") {
      invalid("support_mode", "bi-tree measures live on boundary cells only");
    }
    int n = read_depth(doc["depths"][0], "depths[0]");
    int m = read_depth(doc["depths"][1], "depths[1]");
    BiTreeShape shape = build_bitree(n, m);
    std::vector<double> cells;
    cells.reserve(shape.cell_count());
    bool nested = !masses.empty() && masses[0].is_array();
    if (nested) {
      if (masses.size() != shape.cell_rows()) {
        invalid("masses", "expected " + std::to_string(shape.cell_rows()) + " rows, got " +
                              std::to_string(masses.size()));
      }
      for (std::size_t i = 0; i < masses.size(); ++i) {
        const json& row = masses[i];
        std::string where = "masses[" + std::to_string(i) + "]";
        if (!row.is_array() || row.size() != shape.cell_cols()) {
          invalid(where, "expected a row of " + std::to_string(shape.cell_cols()) + " values");
        }
        for (std::size_t j = 0; j < row.size(); ++j) {
          cells.push_back(read_mass(row[j], where + "[" + std::to_string(j) + "]"));
        }
      }
    } else {
      if (masses.size() != shape.cell_count()) {
        invalid("masses", "expected " + std::to_string(shape.cell_count()) + " cell values, got " +
                              std::to_string(masses.size()));
      }
      for (std::size_t i = 0; i < masses.size(); ++i) {
        cells.push_back(read_mass(masses[i], "masses[" + std::to_string(i) + "]"));
      }
    }
    return BiMeasure(shape, std::move(cells));
  }
  invalid("kind", "expected \"tree\" or \"bitree\", got \"" + kind + "\"");
}

namespace {

// Emits doubles through format_double so files are byte-stable.
std::string number_array(std::span<const double> xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += format_double(xs[i]);
  }
  return out + "]";
}

}  // namespace

std::string write_measure_file(const TreeMeasure& mu) {
  std::ostringstream os;
  os << "{\"version\":" << kFormatVersion << ",\"kind\":\"tree\",\"depth\":" << mu.shape().depth()
     << ",\"support_mode\":\"" << to_string(mu.support_mode()) << "\",\"masses\":"
     << number_array(mu.masses().values()) << "}\n";
  return os.str();
}

std::string write_measure_file(const BiMeasure& mu) {
  std::ostringstream os;
  os << "{\"version\":" << kFormatVersion << ",\"kind\":\"bitree\",\"depths\":[" << mu.shape().n() << ","
     << mu.shape().m() << "],\"masses\":" << number_array(mu.cells()) << "}\n";
  return os.str();
}

namespace {

std::string cell_text(const Cell& c) {
  struct {
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const { return v; }
  } visitor;
  return std::visit(visitor, c);
}

std::string cell_json(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return json(*s).dump();
  if (const auto* d = std::get_if<double>(&c)) {
    // JSON has no inf/nan literals.
    return std::isfinite(*d) ? format_double(*d) : json(format_double(*d)).dump();
  }
  return cell_text(c);
}

}  // namespace

std::string Report::render(OutputFormat format) const {
  std::ostringstream os;
  if (format == OutputFormat::csv) {
    os << "# carleson-report version=" << kFormatVersion << " command=" << command << " seed=" << seed << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
      os << "\n";
    }
    for (const auto& [key, value] : summary) os << "# " << key << "=" << cell_text(value) << "\n";
    return os.str();
  }
  os << "{\"version\":" << kFormatVersion << ",\"command\":" << json(command).dump() << ",\"seed\":" << seed
     << ",\"columns\":[";
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << json(columns[i]).dump();
  os << "],\"rows\":[";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    os << (r ? "," : "") << "[";
    for (std::size_t i = 0; i < rows[r].size(); ++i) os << (i ? "," : "") << cell_json(rows[r][i]);
    os << "]";
  }
  os << "],\"summary\":{";
  for (std::size_t i = 0; i < summary.size(); ++i) {
    os << (i ? "," : "") << json(summary[i].first).dump() << ":" << cell_json(summary[i].second);
  }
  os << "}}\n";
  return os.str();
}

}  // namespace carleson
