#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbb/cli/csv.hpp"

namespace lbb::cli {

namespace detail {

struct PlotSeries {
  int column = 0;  // 1-based CSV column
  std::string title;
};

inline std::string gnuplot_script(const std::string& csv_name, const std::string& xlabel,
                                  const std::string& ylabel, int x_column,
                                  const std::vector<PlotSeries>& series, bool log_y) {
  std::ostringstream out;
  out << "# gnuplot script generated by wiretap-lbb; run: gnuplot -p " << csv_name << ".gp\n";
  out << "set datafile separator ','\n";
  out << "set datafile commentschars '#'\n";
  out << "set key top right\n";
  out << "set grid\n";
  out << "set xlabel '" << xlabel << "'\n";
  out << "set ylabel '" << ylabel << "'\n";
  if (log_y) out << "set logscale y\n";
  out << "plot ";
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (i) out << ", \\\n     ";
    out << "'" << csv_name << "' using " << x_column << ":" << series[i].column
        << " with linespoints lw 2 title '" << series[i].title << "'";
  }
  out << "\n";
  return out.str();
}

}  // namespace detail

/// Emits a self-contained gnuplot script for a curve report. The x column and
/// one series per matching y column are located by name; a missing column is
/// a descriptive error.
inline std::string emit_plot_script(const CsvReport& report, ExperimentKind kind,
                                    const std::string& csv_name) {
  using detail::PlotSeries;
  auto need = [&](const std::string& name) {
    const int idx = column_index(report, name);
    if (idx < 0)
      throw std::invalid_argument("plot script: report is missing required column '" + name +
                                  "'");
    return idx + 1;  // gnuplot columns are 1-based
  };
  auto series_with_prefix = [&](const std::string& prefix, const std::string& title_prefix) {
    std::vector<PlotSeries> out;
    for (std::size_t i = 0; i < report.columns.size(); ++i)
      if (report.columns[i].rfind(prefix, 0) == 0) {
        const std::string suffix = report.columns[i].substr(prefix.size());
        out.push_back({static_cast<int>(i) + 1,
                       suffix.empty() ? report.columns[i] : title_prefix + suffix});
      }
    if (out.empty())
      throw std::invalid_argument("plot script: report has no columns starting with '" + prefix +
                                  "'");
    return out;
  };

  switch (kind) {
    case ExperimentKind::sweep_tau:
      return detail::gnuplot_script(csv_name, "tau", "secrecy outage probability", need("tau"),
                                    series_with_prefix("analytic_sop_na", "N_A = "), true);
    case ExperimentKind::uncertainty:
      return detail::gnuplot_script(csv_name, "tau", "averaged secrecy outage probability",
                                    need("tau"),
                                    series_with_prefix("avg_sop_csigma_t_", "c sigma_t = "),
                                    false);
    case ExperimentKind::sweep_snr:
      return detail::gnuplot_script(csv_name, "mean SNR at Bob [dB]",
                                    "minimal secrecy outage probability",
                                    need("mean_snr_bob_db"),
                                    series_with_prefix("min_sop_na", "N_A = "), true);
    case ExperimentKind::optimize:
      return detail::gnuplot_script(csv_name, "number of transmit antennas",
                                    "minimal secrecy outage probability", need("n_alice"),
                                    series_with_prefix("min_sop", ""), true);
    case ExperimentKind::validate:
    case ExperimentKind::fisher:
      throw std::invalid_argument("plot script: experiment kind '" +
                                  std::string(kind_name(kind)) + "' has no curve to plot");
  }
  throw std::invalid_argument("plot script: unknown experiment kind");
}

}  // namespace lbb::cli
