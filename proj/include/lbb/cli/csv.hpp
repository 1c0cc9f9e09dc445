#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lbb/cli/config.hpp"
#include "lbb/errors.hpp"
#include "lbb/version.hpp"

namespace lbb::cli {

/// Self-describing report: named columns, pre-formatted cells, and a footer
/// that embeds the resolved config so the report alone can regenerate itself.
struct CsvReport {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> footer_lines;
};

inline std::string csv_cell(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline int column_index(const CsvReport& report, const std::string& name) {
  for (std::size_t i = 0; i < report.columns.size(); ++i)
    if (report.columns[i] == name) return static_cast<int>(i);
  return -1;
}

inline constexpr const char* footer_config_begin = "--- config ---";
inline constexpr const char* footer_config_end = "--- end config ---";

/// Footer: tool version, the subcommand to rerun, and the full resolved config.
/// Deliberately no timestamps or worker counts, which would break byte-level
/// reproducibility across reruns and worker counts.
inline std::vector<std::string> make_footer(const ExperimentConfig& cfg) {
  std::vector<std::string> lines;
  lines.push_back(std::string("wiretap-lbb ") + version + " report");
  lines.push_back(std::string("regenerate: wiretap-lbb ") + kind_name(cfg.kind) +
                  " --config <file with the config below> --out <this file>");
  lines.push_back(footer_config_begin);
  std::istringstream cfg_text(serialize_config(cfg));
  std::string line;
  while (std::getline(cfg_text, line)) lines.push_back(line);
  lines.push_back(footer_config_end);
  return lines;
}

inline std::string render_csv(const CsvReport& report) {
  std::ostringstream out;
  for (std::size_t i = 0; i < report.columns.size(); ++i)
    out << (i ? "," : "") << report.columns[i];
  out << "\n";
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  for (const auto& line : report.footer_lines) out << "# " << line << "\n";
  return out.str();
}

inline void write_csv(const CsvReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write report to '" + path + "'");
  out << render_csv(report);
}

/// Recovers the embedded config TOML from rendered CSV text.
inline std::string extract_footer_config(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  std::ostringstream cfg;
  bool inside = false;
  bool found = false;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) != 0) continue;
    const std::string body = line.substr(2);
    if (body == footer_config_begin) {
      inside = true;
      found = true;
      continue;
    }
    if (body == footer_config_end) {
      inside = false;
      continue;
    }
    if (inside) cfg << body << "\n";
  }
  if (!found) throw ConfigError("CSV footer carries no embedded config");
  return cfg.str();
}

}  // namespace lbb::cli
