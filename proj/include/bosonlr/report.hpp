#pragma once

#include <string>
#include <vector>

#include "bosonlr/config.hpp"

namespace bosonlr {

/// One sweep point. `values` line up with ExperimentReport::columns.
struct Record {
  std::string series;
  std::vector<double> values;
  bool has_bound = false;
  bool pass = true;
};

/// A named whole-experiment check (certificate, monotonicity, exact zero).
struct Check {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct PlotSpec {
  std::string x;               // column name on the x axis
  std::vector<std::string> y;  // column names drawn per series
  bool log_x = false;
  bool log_y = true;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::string> column_docs;  // one line per column, same order
  std::vector<Record> records;
  std::vector<Check> checks;
  json summary = json::object();  // fitted exponents, ratios, m_0, ...
  json config = json::object();   // effective configuration
  PlotSpec plot;
  std::uint64_t seed = 0;
  double runtime_seconds = 0.0;

  bool passed() const;
  std::size_t failures() const;
  /// Column index by name; throws InvalidArgument.
  std::size_t column(const std::string& name) const;
  void add(std::string series, std::vector<double> values);
  void add(std::string series, std::vector<double> values, bool pass);
  void check(std::string name, bool pass, std::string detail = "");

  /// The JSON summary written next to the CSV.
  json summary_json() const;
};

struct ReportPaths {
  std::string csv, json, plot;
};

/// <dir>/<experiment>-<stamp>.{csv,json,plt}; the plot script is skipped
/// (plot left empty) when there is nothing to plot. Throws IoError.
ReportPaths write_report(const ExperimentReport& report, const std::string& dir,
                         const std::string& stamp, bool with_plot = true);

/// CSV text: '#' comment lines documenting the columns, a header row, one
/// row per record. Numbers use 17 significant digits.
std::string csv_text(const ExperimentReport& report);

/// gnuplot script reading `csv_name` (relative to the script). Throws
/// NothingToPlot for fewer than two records.
std::string plot_script(const ExperimentReport& report, const std::string& csv_name);
void emit_plot_script(const ExperimentReport& report, const std::string& path,
                      const std::string& csv_name);

/// UTC time as YYYYmmddTHHMMSSZ.
std::string utc_stamp();

}  // namespace bosonlr
