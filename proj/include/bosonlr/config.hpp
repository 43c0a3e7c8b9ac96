#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bosonlr/lattice.hpp"
#include "bosonlr/operators.hpp"
#include "json.hpp"

namespace bosonlr {

using json = nlohmann::json;

/// {"type": "chain", "length": L} | {"type": "grid", "dims": [...]} |
/// {"type": "edges", "vertices": n, "edges": [[x, y], ...], "dim": d}
struct GraphSpec {
  std::string type = "chain";
  std::size_t length = 1;
  std::vector<std::size_t> dims;
  std::size_t vertices = 0;
  std::vector<Edge> edges;
  int dim = 1;

  LatticeGraph build() const;
  /// Same family with a different linear size (chains only).
  GraphSpec with_length(std::size_t n) const;
  int dimension() const;
};

/// Observable recipes: identity, inverse-number {site}, projector {site, k},
/// hopping {sites: [x, y]}, table {site, values}.
struct ObservableConfig {
  std::string kind = "identity";
  std::vector<Vertex> sites;
  int k = 0;
  std::vector<double> values;

  ObservableSpec build() const;
};

struct Tolerances {
  double bound = 1e-12;     // relative slack on measured <= bound
  double residual = 1e-9;   // KMS, invariance, engine agreement
  double tail = 1e-10;      // Gibbs truncation certificate
  double bessel = 1e-8;     // propagator vs series oracle
  double boundary = 1e-8;   // chain vs doubled chain
  double eig = 1e-8;        // min-eig certificate slack
  double fd_step = 1e-4;    // central-difference step
  double fd_flag = 1e-5;    // Richardson disagreement that flags a point
};

struct ExperimentConfig {
  std::string preset;
  std::vector<std::string> experiments;  // enabled experiment ids

  GraphSpec graph;
  double J = 1.0;
  double U = 0.0;
  double mu = 0.0;
  double hopping_multiplicity = 1.0;
  std::vector<double> interaction_profile;

  std::optional<int> sector;
  std::optional<int> max_total;
  std::optional<int> cap;

  double beta = 1.0;
  /// Treat the truncated basis as the whole system (no tail certificate).
  bool basis_is_system = false;

  ObservableConfig A, B;
  double p = 2.0;
  double lambda = 1.0;
  double epsilon = 1e-3;
  int R = 2;
  int cutoff_radius = 1;

  std::vector<double> t_grid;
  std::vector<double> lambda_grid;
  std::vector<int> m_grid;
  std::vector<int> distances;
  std::vector<std::size_t> volumes;
  std::vector<double> approx_t_grid;  // local-approx sup is taken over this grid

  int max_displacement = 10;
  Vertex nonlocality_site = 1;
  double nonlocality_time = 0.5;
  std::vector<int> initial_occupation;
  int strip_points = 11;
  int growth_n_max = 8;

  Tolerances tol;
  int workers = 0;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  bool plot = true;

  ModelParams model(const LatticeGraph& g) const;
  BasisSpec basis_spec() const;
  int range() const { return static_cast<int>(interaction_profile.size()) + 1; }
  bool enabled(const std::string& id) const;

  /// Effective configuration, defaults filled in.
  json to_json() const;
};

/// Experiment ids in the order the "all" command runs them.
const std::vector<std::string>& experiment_ids();
/// Preset names, and the preset each experiment defaults to.
std::vector<std::string> preset_names();
const std::string& default_preset(const std::string& experiment);
json preset_json(const std::string& name);

/// Preset (from "preset" or `fallback_preset`) merged with the overrides in
/// `j`, then validated. Throws ConfigError with a dotted field path.
ExperimentConfig config_from_json(const json& j, const std::string& fallback_preset = "");
/// Raw JSON of a configuration file. Throws FileNotFound, or ConfigError for
/// malformed JSON.
json read_config_file(const std::string& path);
/// read_config_file followed by config_from_json.
ExperimentConfig parse_config(const std::string& path, const std::string& fallback_preset = "");
/// Cross-field checks (p > 2d+2 for lr / local-approx, range, grids).
void validate(const ExperimentConfig& cfg);

}  // namespace bosonlr
