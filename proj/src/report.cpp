#include "bosonlr/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "bosonlr/errors.hpp"

namespace bosonlr {

namespace fs = std::filesystem;

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("write failed for " + path);
}

json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return number(v);
}

}  // namespace

bool ExperimentReport::passed() const { return failures() == 0; }

std::size_t ExperimentReport::failures() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.pass ? 0 : 1;
  for (const auto& c : checks) n += c.pass ? 0 : 1;
  return n;
}

std::size_t ExperimentReport::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InvalidArgument("report has no column \"" + name + "\"");
  return static_cast<std::size_t>(it - columns.begin());
}

void ExperimentReport::add(std::string series, std::vector<double> values) {
  if (values.size() != columns.size()) throw InvalidArgument("record width mismatch");
  records.push_back({std::move(series), std::move(values), false, true});
}

void ExperimentReport::add(std::string series, std::vector<double> values, bool pass) {
  if (values.size() != columns.size()) throw InvalidArgument("record width mismatch");
  records.push_back({std::move(series), std::move(values), true, pass});
}

void ExperimentReport::check(std::string name, bool pass, std::string detail) {
  checks.push_back({std::move(name), pass, std::move(detail)});
}

json ExperimentReport::summary_json() const {
  json checks_json = json::array();
  for (const auto& c : checks) {
    checks_json.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  std::size_t bounded = 0;
  for (const auto& r : records) bounded += r.has_bound ? 1 : 0;
  json clean = json::object();
  for (const auto& [k, v] : summary.items()) {
    clean[k] = v.is_number_float() ? finite_or_string(v.get<double>()) : v;
  }
  return {{"schema_version", 1},
          {"experiment", experiment},
          {"passed", passed()},
          {"points", records.size()},
          {"bounded_points", bounded},
          {"failures", failures()},
          {"columns", columns},
          {"checks", checks_json},
          {"summary", clean},
          {"config", config},
          {"meta",
           {{"version", BOSONLR_VERSION}, {"seed", seed}, {"runtime_seconds", runtime_seconds}}}};
}

std::string csv_text(const ExperimentReport& report) {
  std::ostringstream out;
  out << "# " << report.experiment << "\n";
  out << "# series: sweep label\n";
  for (std::size_t i = 0; i < report.columns.size(); ++i) {
    out << "# " << report.columns[i] << ": "
        << (i < report.column_docs.size() ? report.column_docs[i] : "") << "\n";
  }
  out << "# pass: 1 if the point satisfies its bound or check\n";
  out << "series";
  for (const auto& c : report.columns) out << "," << csv_field(c);
  out << ",pass\n";
  for (const auto& r : report.records) {
    out << csv_field(r.series);
    for (double v : r.values) out << "," << number(v);
    out << "," << (r.pass ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string plot_script(const ExperimentReport& report, const std::string& csv_name) {
  if (report.records.size() < 2) {
    throw NothingToPlot(report.experiment + ": " + std::to_string(report.records.size()) +
                        " point(s), nothing to plot");
  }
  const PlotSpec& p = report.plot;
  const std::size_t xcol = report.column(p.x) + 2;  // gnuplot columns are 1-based after series
  std::vector<std::string> series;
  for (const auto& r : report.records) {
    if (std::find(series.begin(), series.end(), r.series) == series.end()) series.push_back(r.series);
  }
  std::ostringstream out;
  out << "# " << report.experiment << ": measured and bound per series\n";
  out << "set datafile separator ','\n";
  out << "set datafile commentschars '#'\n";
  out << "set key outside right\n";
  out << "set xlabel '" << p.x << "'\n";
  if (p.log_x) out << "set logscale x\n";
  if (p.log_y) out << "set logscale y\n";
  out << "set terminal pngcairo size 1000,650\n";
  out << "set output '" << report.experiment << ".png'\n";
  out << "plot \\\n";
  bool first = true;
  for (const auto& s : series) {
    for (const auto& y : p.y) {
      const std::size_t ycol = report.column(y) + 2;
      if (!first) out << ", \\\n";
      first = false;
      out << "  '" << csv_name << "' every ::1 using " << xcol << ":(strcol(1) eq '" << s
          << "' ? $" << ycol << " : NaN) with linespoints title '" << s << " " << y << "'";
    }
  }
  out << "\n";
  return out.str();
}

void emit_plot_script(const ExperimentReport& report, const std::string& path,
                      const std::string& csv_name) {
  write_file(path, plot_script(report, csv_name));
}

ReportPaths write_report(const ExperimentReport& report, const std::string& dir,
                         const std::string& stamp, bool with_plot) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  const std::string stem = report.experiment + "-" + stamp;
  ReportPaths paths;
  paths.csv = (fs::path(dir) / (stem + ".csv")).string();
  paths.json = (fs::path(dir) / (stem + ".json")).string();
  write_file(paths.csv, csv_text(report));
  write_file(paths.json, report.summary_json().dump(2) + "\n");
  if (with_plot && report.records.size() >= 2) {
    paths.plot = (fs::path(dir) / (stem + ".plt")).string();
    emit_plot_script(report, paths.plot, stem + ".csv");
  }
  return paths;
}

std::string utc_stamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

}  // namespace bosonlr
