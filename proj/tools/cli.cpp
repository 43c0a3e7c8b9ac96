#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <exception>
#include <optional>

#include "bosonlr/config.hpp"
#include "bosonlr/errors.hpp"
#include "bosonlr/experiments.hpp"
#include "bosonlr/report.hpp"

namespace bosonlr::cli {

namespace {

struct Invocation {
  std::string subcommand;
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::optional<int> workers;
  std::optional<double> tolerance;
  int verbosity = 0;
  bool keep_going = false;
};

json user_json(const Invocation& inv) {
  return inv.config_path.empty() ? json::object() : read_config_file(inv.config_path);
}

// Loads the configuration for one experiment and applies the CLI overrides.
// The experiment list is replaced before validation so that cross-field
// checks only apply to the experiment actually run.
ExperimentConfig load(const Invocation& inv, const std::string& id) {
  const std::string fallback = inv.preset.empty() ? default_preset(id) : inv.preset;
  json j = user_json(inv);
  if (!j.is_object()) throw ConfigError("<root>", "expected an object");
  j["experiments"] = {id};
  ExperimentConfig cfg = config_from_json(j, fallback);
  if (inv.workers) cfg.workers = *inv.workers;
  if (inv.tolerance) cfg.tol.residual = *inv.tolerance;
  if (const char* env = std::getenv("BOSONLR_OUT"); env && *env) cfg.out_dir = env;
  if (!inv.out_dir.empty()) cfg.out_dir = inv.out_dir;
  validate(cfg);
  return cfg;
}

int run_one(const Invocation& inv, const ExperimentConfig& cfg, const std::string& id,
            std::ostream& out) {
  const ExperimentReport rep = run_experiment(id, cfg);
  const ReportPaths paths = write_report(rep, cfg.out_dir, utc_stamp(), cfg.plot);
  out << id << ": " << (rep.passed() ? "PASS" : "FAIL") << "  (" << rep.records.size()
      << " points, " << rep.failures() << " failing, " << rep.runtime_seconds << " s)\n";
  for (const Check& c : rep.checks) {
    if (!c.pass || inv.verbosity > 0) {
      out << "  [" << (c.pass ? "ok" : "FAILED") << "] " << c.name;
      if (!c.detail.empty()) out << ": " << c.detail;
      out << '\n';
    }
  }
  if (inv.verbosity > 0) out << "  summary: " << rep.summary.dump() << '\n';
  out << "  report: " << paths.csv << '\n';
  return rep.passed() ? kPass : kViolation;
}

}  // namespace

int exit_code_for_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const FileNotFound& e) {
    err << "file not found: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kConfigError;
  } catch (const NotInBasis& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kConfigError;
  } catch (const ResourceLimit& e) {
    err << "resource limit: " << e.what() << '\n';
    return kResourceError;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kResourceError;
  } catch (const DivergingPartitionFunction& e) {
    err << "diverging partition function: " << e.what() << '\n';
    return kResourceError;
  } catch (const BoundaryContamination& e) {
    err << "boundary contamination: " << e.what() << '\n';
    return kResourceError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kResourceError;
  } catch (const std::bad_alloc&) {
    err << "resource limit: out of memory\n";
    return kResourceError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kResourceError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Invocation inv;
  CLI::App app{"Finite-lattice Bose-Hubbard checks of Lieb-Robinson, cutoff and KMS bounds",
               "bosonlr"};
  app.set_version_flag("--version", BOSONLR_VERSION);
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("-c,--config", inv.config_path, "JSON configuration file");
  app.add_option("-p,--preset", inv.preset, "named preset used as the base configuration");
  app.add_option("-o,--out", inv.out_dir, "output directory (overrides BOSONLR_OUT)");
  app.add_option("-w,--workers", inv.workers, "worker threads (default: all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--tolerance", inv.tolerance, "residual tolerance")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", inv.verbosity, "print checks and summaries");
  app.add_flag("--keep-going", inv.keep_going, "with 'all': continue after a failure");

  for (const std::string& id : experiment_ids()) {
    app.add_subcommand(id, "run the " + id + " experiment");
  }
  app.add_subcommand("all", "run every experiment on its default preset");
  app.add_subcommand("validate-config", "check a configuration and exit");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForVersion&) {
    out << BOSONLR_VERSION << '\n';
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kConfigError;
  }
  inv.subcommand = app.get_subcommands().front()->get_name();

  const std::vector<std::string>& ids = experiment_ids();
  try {
    if (inv.subcommand == "validate-config") {
      if (inv.config_path.empty() && inv.preset.empty()) {
        throw ConfigError("--config", "validate-config needs --config or --preset");
      }
      const std::string fallback = inv.preset;
      const ExperimentConfig cfg = inv.config_path.empty()
                                       ? config_from_json(json::object(), fallback)
                                       : parse_config(inv.config_path, fallback);
      out << "valid configuration";
      if (!cfg.preset.empty()) out << " (preset " << cfg.preset << ")";
      out << '\n';
      if (inv.verbosity > 0) out << cfg.to_json().dump(2) << '\n';
      return kPass;
    }

    if (inv.subcommand != "all") {
      const ExperimentConfig cfg = load(inv, inv.subcommand);
      return run_one(inv, cfg, inv.subcommand, out);
    }

    // Configurations are all loaded first so a bad file fails before any run.
    std::vector<std::pair<std::string, ExperimentConfig>> plan;
    // A config file restricts the run to its experiment list, or to the
    // list of the preset it names.
    std::optional<std::vector<std::string>> enabled;
    if (!inv.config_path.empty()) {
      const json j = user_json(inv);
      if (!j.is_object()) throw ConfigError("<root>", "expected an object");
      std::string named = inv.preset;
      if (j.contains("preset") && j.at("preset").is_string()) named = j.at("preset");
      try {
        if (j.contains("experiments")) {
          enabled = j.at("experiments").get<std::vector<std::string>>();
        } else if (!named.empty()) {
          enabled = preset_json(named).at("experiments").get<std::vector<std::string>>();
        }
      } catch (const json::exception&) {
        throw ConfigError("experiments", "expected a list of experiment ids");
      }
      for (const std::string& id : enabled.value_or(std::vector<std::string>{})) {
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
          throw ConfigError("experiments", "unknown experiment \"" + id + "\"");
        }
      }
    }
    for (const std::string& id : ids) {
      if (enabled && std::find(enabled->begin(), enabled->end(), id) == enabled->end()) continue;
      plan.emplace_back(id, load(inv, id));
    }
    int worst = kPass;
    for (const auto& [id, cfg] : plan) {
      int code;
      try {
        code = run_one(inv, cfg, id, out);
      } catch (...) {
        err << id << ": ";
        code = exit_code_for_current_exception(err);
      }
      worst = std::max(worst, code);
      if (code != kPass && !inv.keep_going) break;
    }
    return worst;
  } catch (...) {
    return exit_code_for_current_exception(err);
  }
}

}  // namespace bosonlr::cli
