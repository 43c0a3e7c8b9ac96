#include "bosonlr/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bosonlr/errors.hpp"

namespace bosonlr {

namespace {

std::vector<double> linspace_step(double a, double b, double h) {
  std::vector<double> out;
  const auto n = static_cast<int>(std::lround((b - a) / h));
  for (int i = 0; i <= n; ++i) out.push_back(a + i * h);
  return out;
}

const std::map<std::string, json>& presets() {
  static const std::map<std::string, json> table = [] {
    std::map<std::string, json> p;
    p["chain-81"] = {
        {"experiments", {"free-evolution"}},
        {"graph", {{"type", "chain"}, {"length", 81}}},
        {"model", {{"J", 1.0}, {"U", 0.0}, {"mu", 0.0}}},
        {"basis", {{"sector", 1}}},
        {"sweep", {{"t", {0.5, 1.0, 2.0}}, {"m", {1, 10, 100, 1000, 10000}}}},
        {"free_evolution",
         {{"max_displacement", 10}, {"nonlocality_site", 1}, {"nonlocality_time", 0.5}}}};
    p["chain-6"] = {
        {"experiments", {"moments"}},
        {"graph", {{"type", "chain"}, {"length", 6}}},
        {"model", {{"J", 1.0}, {"U", 1.0}, {"mu", -1.0}}},
        {"basis", {{"sector", 3}}},
        {"thermal", {{"beta", 1.0}}},
        {"p", 4.0},
        {"sweep", {{"t", linspace_step(0.0, 2.0, 0.1)}}},
        {"moments", {{"initial_occupation", {3, 0, 0, 0, 0, 0}}}}};
    p["chain-4-cap-5"] = {
        {"experiments", {"cutoff"}},
        {"graph", {{"type", "chain"}, {"length", 4}}},
        {"model", {{"J", 1.0}, {"U", 1.0}, {"mu", -1.0}}},
        {"basis", {{"cap", 5}}},
        {"thermal", {{"beta", 1.0}}},
        {"p", 6.0},
        {"observables",
         {{"A", {{"kind", "inverse-number"}, {"sites", {1}}}},
          {"B", {{"kind", "hopping"}, {"sites", {1, 2}}}}}},
        {"cutoff_radius", 1},
        {"sweep", {{"t", {0.5}}, {"lambda", {1, 2, 3, 4, 5}}}}};
    p["chain-10"] = {
        {"experiments", {"lr", "local-approx"}},
        {"graph", {{"type", "chain"}, {"length", 10}}},
        {"model", {{"J", 1.0}, {"U", 1.0}, {"mu", -1.0}}},
        {"basis", {{"cap", 2}, {"max_total", 3}}},
        {"thermal", {{"beta", 1.0}, {"basis_is_system", true}}},
        {"p", 6.0},
        {"lambda", 2.0},
        {"epsilon", 1e-3},
        {"observables",
         {{"A", {{"kind", "inverse-number"}, {"sites", {4}}}},
          {"B", {{"kind", "hopping"}, {"sites", {4, 5}}}}}},
        {"sweep",
         {{"t", {0.25, 0.5}},
          {"m", {1, 2, 3, 4}},
          {"distance", {1, 2, 3, 4, 5, 6, 7, 8, 9}},
          {"approx_t", linspace_step(0.0, 1.0, 0.1)}}}};
    p["2-site"] = {
        {"experiments", {"kms"}},
        {"graph", {{"type", "chain"}, {"length", 2}}},
        {"model", {{"J", 1.0}, {"U", 1.0}, {"mu", -1.0}}},
        {"basis", {{"max_total", 6}}},
        {"thermal", {{"beta", 1.0}}},
        {"sweep", {{"t", {0.0, 0.5, 1.0}}, {"volumes", {2, 3, 4}}}},
        {"kms", {{"strip_points", 11}, {"growth_n_max", 8}}}};
    p["chain-4"] = {
        {"experiments", {"derivative"}},
        {"graph", {{"type", "chain"}, {"length", 4}}},
        {"model", {{"J", 1.0}, {"U", 1.0}, {"mu", -1.0}}},
        {"basis", {{"max_total", 2}}},
        {"thermal", {{"beta", 1.0}, {"basis_is_system", true}}},
        {"R", 2},
        {"observables",
         {{"A", {{"kind", "inverse-number"}, {"sites", {0}}}},
          {"B", {{"kind", "hopping"}, {"sites", {1, 2}}}}}},
        {"sweep", {{"t", linspace_step(0.0, 2.0, 0.1)}, {"volumes", {4, 5, 6}}}}};
    return p;
  }();
  return table;
}

const std::map<std::string, std::string>& defaults_by_experiment() {
  static const std::map<std::string, std::string> table = {
      {"free-evolution", "chain-81"}, {"moments", "chain-6"}, {"cutoff", "chain-4-cap-5"},
      {"lr", "chain-10"},             {"local-approx", "chain-10"},
      {"kms", "2-site"},              {"derivative", "chain-4"}};
  return table;
}

// Typed accessors that report the dotted path on failure.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items()) {
      if (!ok.count(k)) throw ConfigError(field(k), "unknown field");
    }
  }

  bool has(const char* k) const { return j_.contains(k) && !j_.at(k).is_null(); }
  std::string field(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  const json& raw(const char* k) const { return j_.at(k); }

  template <class T>
  void get(const char* k, T& out) const {
    if (!has(k)) return;
    out = convert<T>(j_.at(k), field(k));
  }
  template <class T>
  void get(const char* k, std::optional<T>& out) const {
    if (!j_.contains(k)) return;
    if (j_.at(k).is_null()) {
      out.reset();
      return;
    }
    out = convert<T>(j_.at(k), field(k));
  }

  template <class T>
  static T convert(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where, "expected true or false");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where, "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() &&
          !(v.is_number_float() && std::floor(v.get<double>()) == v.get<double>())) {
        throw ConfigError(where, "expected an integer");
      }
      const double d = v.get<double>();
      if (std::is_unsigned_v<T> && d < 0) throw ConfigError(where, "expected a nonnegative integer");
      return static_cast<T>(v.get<long long>());
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where, "expected a number");
      const double d = v.get<double>();
      if (!std::isfinite(d)) throw ConfigError(where, "expected a finite number");
      return d;
    } else {
      if (!v.is_array()) throw ConfigError(where, "expected a list");
      T out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(convert<typename T::value_type>(v[i], where + "[" + std::to_string(i) + "]"));
      }
      return out;
    }
  }

 private:
  const json& j_;
  std::string path_;
};

GraphSpec parse_graph(const json& j) {
  Reader r(j, "graph");
  r.allow({"type", "length", "dims", "vertices", "edges", "dim"});
  GraphSpec g;
  r.get("type", g.type);
  if (g.type == "chain") {
    if (!r.has("length")) throw ConfigError("graph.length", "missing field");
    r.get("length", g.length);
  } else if (g.type == "grid") {
    if (!r.has("dims")) throw ConfigError("graph.dims", "missing field");
    r.get("dims", g.dims);
    if (g.dims.empty()) throw ConfigError("graph.dims", "must not be empty");
  } else if (g.type == "edges") {
    if (!r.has("vertices")) throw ConfigError("graph.vertices", "missing field");
    r.get("vertices", g.vertices);
    if (r.has("edges")) {
      const json& e = r.raw("edges");
      if (!e.is_array()) throw ConfigError("graph.edges", "expected a list of pairs");
      for (std::size_t i = 0; i < e.size(); ++i) {
        const auto pair = Reader::convert<std::vector<int>>(e[i], "graph.edges[" + std::to_string(i) + "]");
        if (pair.size() != 2) {
          throw ConfigError("graph.edges[" + std::to_string(i) + "]", "expected [x, y]");
        }
        g.edges.push_back({pair[0], pair[1]});
      }
    }
    r.get("dim", g.dim);
  } else {
    throw ConfigError("graph.type", "expected chain, grid or edges, got \"" + g.type + "\"");
  }
  return g;
}

ObservableConfig parse_observable(const json& j, const std::string& path) {
  Reader r(j, path);
  r.allow({"kind", "sites", "k", "values"});
  ObservableConfig o;
  r.get("kind", o.kind);
  r.get("sites", o.sites);
  r.get("k", o.k);
  r.get("values", o.values);
  const std::map<std::string, std::size_t> arity = {
      {"identity", 0}, {"inverse-number", 1}, {"projector", 1}, {"hopping", 2}, {"table", 1}};
  const auto it = arity.find(o.kind);
  if (it == arity.end()) {
    throw ConfigError(path + ".kind",
                      "expected identity, inverse-number, projector, hopping or table");
  }
  if (o.sites.size() != it->second) {
    throw ConfigError(path + ".sites", o.kind + " needs " + std::to_string(it->second) + " site(s)");
  }
  if (o.kind == "table" && o.values.empty()) throw ConfigError(path + ".values", "must not be empty");
  if (o.kind == "hopping" && o.sites[0] == o.sites[1]) {
    throw ConfigError(path + ".sites", "hopping needs two distinct sites");
  }
  return o;
}

json observable_json(const ObservableConfig& o) {
  json j = {{"kind", o.kind}, {"sites", o.sites}};
  if (o.kind == "projector") j["k"] = o.k;
  if (o.kind == "table") j["values"] = o.values;
  return j;
}

json graph_json(const GraphSpec& g) {
  if (g.type == "chain") return {{"type", "chain"}, {"length", g.length}};
  if (g.type == "grid") return {{"type", "grid"}, {"dims", g.dims}};
  json edges = json::array();
  for (auto [x, y] : g.edges) edges.push_back({x, y});
  return {{"type", "edges"}, {"vertices", g.vertices}, {"edges", edges}, {"dim", g.dim}};
}

}  // namespace

LatticeGraph GraphSpec::build() const {
  if (type == "chain") return build_chain(length);
  if (type == "grid") return build_grid(dims);
  return LatticeGraph(vertices, edges, dim);
}

GraphSpec GraphSpec::with_length(std::size_t n) const {
  if (type != "chain") throw InvalidArgument("volume sweeps need a chain graph");
  GraphSpec g = *this;
  g.length = n;
  return g;
}

int GraphSpec::dimension() const {
  if (type == "chain") return 1;
  if (type == "grid") return static_cast<int>(dims.size());
  return dim;
}

ObservableSpec ObservableConfig::build() const {
  if (kind == "identity") return IdentityObservable{};
  if (kind == "inverse-number") return inverse_number(sites.at(0));
  if (kind == "projector") return NumberProjector{sites.at(0), k};
  if (kind == "hopping") return NormalizedHopping{sites.at(0), sites.at(1)};
  return tabulated_function(sites.at(0), values);
}

ModelParams ExperimentConfig::model(const LatticeGraph& g) const {
  ModelParams m = with_interaction_profile(g, J, U, interaction_profile, mu);
  m.hopping_multiplicity = hopping_multiplicity;
  return m;
}

BasisSpec ExperimentConfig::basis_spec() const { return {sector, max_total, cap}; }

bool ExperimentConfig::enabled(const std::string& id) const {
  return std::find(experiments.begin(), experiments.end(), id) != experiments.end();
}

json ExperimentConfig::to_json() const {
  auto opt = [](const std::optional<int>& v) { return v ? json(*v) : json(nullptr); };
  return {
      {"preset", preset},
      {"experiments", experiments},
      {"graph", graph_json(graph)},
      {"model",
       {{"J", J},
        {"U", U},
        {"mu", mu},
        {"hopping_multiplicity", hopping_multiplicity},
        {"interaction_profile", interaction_profile}}},
      {"basis", {{"sector", opt(sector)}, {"max_total", opt(max_total)}, {"cap", opt(cap)}}},
      {"thermal", {{"beta", beta}, {"basis_is_system", basis_is_system}}},
      {"observables", {{"A", observable_json(A)}, {"B", observable_json(B)}}},
      {"p", p},
      {"lambda", lambda},
      {"epsilon", epsilon},
      {"R", R},
      {"cutoff_radius", cutoff_radius},
      {"sweep",
       {{"t", t_grid},
        {"lambda", lambda_grid},
        {"m", m_grid},
        {"distance", distances},
        {"volumes", volumes},
        {"approx_t", approx_t_grid}}},
      {"free_evolution",
       {{"max_displacement", max_displacement},
        {"nonlocality_site", nonlocality_site},
        {"nonlocality_time", nonlocality_time}}},
      {"moments", {{"initial_occupation", initial_occupation}}},
      {"kms", {{"strip_points", strip_points}, {"growth_n_max", growth_n_max}}},
      {"tolerances",
       {{"bound", tol.bound},
        {"residual", tol.residual},
        {"tail", tol.tail},
        {"bessel", tol.bessel},
        {"boundary", tol.boundary},
        {"eig", tol.eig},
        {"fd_step", tol.fd_step},
        {"fd_flag", tol.fd_flag}}},
      {"workers", workers},
      {"seed", seed},
      {"output", {{"dir", out_dir}, {"plot", plot}}}};
}

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {"free-evolution", "moments", "derivative",
                                               "cutoff",         "kms",     "local-approx",
                                               "lr"};
  return ids;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : presets()) out.push_back(k);
  return out;
}

const std::string& default_preset(const std::string& experiment) {
  const auto& t = defaults_by_experiment();
  const auto it = t.find(experiment);
  if (it == t.end()) throw ConfigError("experiments", "unknown experiment \"" + experiment + "\"");
  return it->second;
}

json preset_json(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("preset", "unknown preset \"" + name + "\" (known: " + known + ")");
  }
  return it->second;
}

ExperimentConfig config_from_json(const json& user, const std::string& fallback_preset) {
  if (!user.is_object()) throw ConfigError("<root>", "expected an object");
  std::string preset = fallback_preset;
  if (user.contains("preset")) preset = Reader::convert<std::string>(user.at("preset"), "preset");

  json merged = preset.empty() ? json::object() : preset_json(preset);
  merged.merge_patch(user);
  merged.erase("preset");

  ExperimentConfig c;
  c.preset = preset;
  Reader r(merged, "");
  r.allow({"experiments", "graph", "model", "basis", "thermal", "observables", "p", "lambda",
           "epsilon", "R", "cutoff_radius", "sweep", "free_evolution", "moments", "kms",
           "tolerances", "workers", "seed", "output"});

  r.get("experiments", c.experiments);
  if (!r.has("graph")) throw ConfigError("graph", "missing field");
  c.graph = parse_graph(r.raw("graph"));

  if (r.has("model")) {
    Reader m(r.raw("model"), "model");
    m.allow({"J", "U", "mu", "hopping_multiplicity", "interaction_profile"});
    m.get("J", c.J);
    m.get("U", c.U);
    m.get("mu", c.mu);
    m.get("hopping_multiplicity", c.hopping_multiplicity);
    m.get("interaction_profile", c.interaction_profile);
  }
  if (r.has("basis")) {
    Reader b(r.raw("basis"), "basis");
    b.allow({"sector", "max_total", "cap"});
    b.get("sector", c.sector);
    b.get("max_total", c.max_total);
    b.get("cap", c.cap);
  }
  if (r.has("thermal")) {
    Reader t(r.raw("thermal"), "thermal");
    t.allow({"beta", "basis_is_system"});
    t.get("beta", c.beta);
    t.get("basis_is_system", c.basis_is_system);
  }
  if (r.has("observables")) {
    Reader o(r.raw("observables"), "observables");
    o.allow({"A", "B"});
    if (o.has("A")) c.A = parse_observable(o.raw("A"), "observables.A");
    if (o.has("B")) c.B = parse_observable(o.raw("B"), "observables.B");
  }
  r.get("p", c.p);
  r.get("lambda", c.lambda);
  r.get("epsilon", c.epsilon);
  r.get("R", c.R);
  r.get("cutoff_radius", c.cutoff_radius);
  if (r.has("sweep")) {
    Reader s(r.raw("sweep"), "sweep");
    s.allow({"t", "lambda", "m", "distance", "volumes", "approx_t"});
    s.get("t", c.t_grid);
    s.get("lambda", c.lambda_grid);
    s.get("m", c.m_grid);
    s.get("distance", c.distances);
    s.get("volumes", c.volumes);
    s.get("approx_t", c.approx_t_grid);
  }
  if (r.has("free_evolution")) {
    Reader f(r.raw("free_evolution"), "free_evolution");
    f.allow({"max_displacement", "nonlocality_site", "nonlocality_time"});
    f.get("max_displacement", c.max_displacement);
    f.get("nonlocality_site", c.nonlocality_site);
    f.get("nonlocality_time", c.nonlocality_time);
  }
  if (r.has("moments")) {
    Reader m(r.raw("moments"), "moments");
    m.allow({"initial_occupation"});
    m.get("initial_occupation", c.initial_occupation);
  }
  if (r.has("kms")) {
    Reader k(r.raw("kms"), "kms");
    k.allow({"strip_points", "growth_n_max"});
    k.get("strip_points", c.strip_points);
    k.get("growth_n_max", c.growth_n_max);
  }
  if (r.has("tolerances")) {
    Reader t(r.raw("tolerances"), "tolerances");
    t.allow({"bound", "residual", "tail", "bessel", "boundary", "eig", "fd_step", "fd_flag"});
    t.get("bound", c.tol.bound);
    t.get("residual", c.tol.residual);
    t.get("tail", c.tol.tail);
    t.get("bessel", c.tol.bessel);
    t.get("boundary", c.tol.boundary);
    t.get("eig", c.tol.eig);
    t.get("fd_step", c.tol.fd_step);
    t.get("fd_flag", c.tol.fd_flag);
  }
  r.get("workers", c.workers);
  r.get("seed", c.seed);
  if (r.has("output")) {
    Reader o(r.raw("output"), "output");
    o.allow({"dir", "plot"});
    o.get("dir", c.out_dir);
    o.get("plot", c.plot);
  }
  validate(c);
  return c;
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("config file not found: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", path + ": malformed JSON (" + e.what() + ")");
  }
}

ExperimentConfig parse_config(const std::string& path, const std::string& fallback_preset) {
  return config_from_json(read_config_file(path), fallback_preset);
}

void validate(const ExperimentConfig& c) {
  if (c.experiments.empty()) throw ConfigError("experiments", "no experiment enabled");
  for (std::size_t i = 0; i < c.experiments.size(); ++i) {
    const auto& ids = experiment_ids();
    if (std::find(ids.begin(), ids.end(), c.experiments[i]) == ids.end()) {
      throw ConfigError("experiments[" + std::to_string(i) + "]",
                        "unknown experiment \"" + c.experiments[i] + "\"");
    }
  }
  // Building the graph checks connectivity and sizes.
  LatticeGraph g = [&] {
    try {
      return c.graph.build();
    } catch (const std::exception& e) {
      throw ConfigError("graph", e.what());
    }
  }();
  const int d = c.graph.dimension();
  if (d < 1) throw ConfigError("graph.dim", "dimension must be >= 1");

  if ((c.enabled("lr") || c.enabled("local-approx")) && !(c.p > 2.0 * d + 2.0)) {
    std::ostringstream msg;
    msg << "p > 2d+2 required when lr or local-approx is enabled (p = " << c.p << ", d = " << d
        << ")";
    throw ConfigError("p", msg.str());
  }
  if (c.p < 1.0) throw ConfigError("p", "must be >= 1");
  if (!(c.beta > 0.0)) throw ConfigError("thermal.beta", "must be positive");
  if (c.lambda < 1.0) throw ConfigError("lambda", "must be >= 1");
  if (!(c.epsilon > 0.0)) throw ConfigError("epsilon", "must be positive");
  if (c.R < 1) throw ConfigError("R", "must be >= 1");
  if (c.cutoff_radius < 0) throw ConfigError("cutoff_radius", "must be >= 0");
  if (c.strip_points < 2) throw ConfigError("kms.strip_points", "must be >= 2");
  if (c.workers < 0) throw ConfigError("workers", "must be >= 0");
  if (c.sector && *c.sector < 0) throw ConfigError("basis.sector", "must be >= 0");
  if (c.max_total && *c.max_total < 0) throw ConfigError("basis.max_total", "must be >= 0");
  if (c.cap && *c.cap < 0) throw ConfigError("basis.cap", "must be >= 0");
  if (!c.sector && !c.max_total && !c.cap) {
    throw ConfigError("basis", "one of sector, max_total or cap must bound the particle number");
  }
  for (std::size_t i = 0; i < c.lambda_grid.size(); ++i) {
    if (c.lambda_grid[i] < 1.0) throw ConfigError("sweep.lambda[" + std::to_string(i) + "]", "must be >= 1");
  }
  for (std::size_t i = 0; i < c.m_grid.size(); ++i) {
    if (c.m_grid[i] < 1) throw ConfigError("sweep.m[" + std::to_string(i) + "]", "must be >= 1");
  }
  const auto check_sites = [&](const ObservableConfig& o, const std::string& path) {
    for (std::size_t i = 0; i < o.sites.size(); ++i) {
      if (!g.has_vertex(o.sites[i])) {
        throw ConfigError(path + ".sites[" + std::to_string(i) + "]", "not a vertex of the graph");
      }
    }
  };
  check_sites(c.A, "observables.A");
  check_sites(c.B, "observables.B");
  // Range consistency: v(x, y) = 0 for d(x, y) >= r holds by construction of
  // the profile table; reject profiles longer than the graph can express.
  if (c.range() > g.diameter() + 1 && !c.interaction_profile.empty()) {
    throw ConfigError("model.interaction_profile", "range exceeds the graph diameter");
  }
  if (c.enabled("free-evolution") && c.graph.type != "chain") {
    throw ConfigError("graph.type", "free-evolution needs a chain");
  }
  if ((c.enabled("derivative") || c.enabled("kms")) && !c.volumes.empty() && c.graph.type != "chain") {
    throw ConfigError("sweep.volumes", "volume sweeps need a chain graph");
  }
}

}  // namespace bosonlr
