#include "bosonlr/experiments.hpp"

#include <omp.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include "bosonlr/bessel.hpp"
#include "bosonlr/block_matrix.hpp"
#include "bosonlr/bounds.hpp"
#include "bosonlr/dynamics.hpp"
#include "bosonlr/errors.hpp"
#include "bosonlr/operators.hpp"
#include "bosonlr/thermal.hpp"

namespace bosonlr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs f(i) for i in [0, n) over the worker pool; rethrows the first failure.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(bosonlr_parallel_for)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

struct Model {
  LatticeGraph g;
  Region lambda;
  std::shared_ptr<const FockBasis> basis;
  ModelParams params;
  SparseOperator H;
};

Model build_model(const ExperimentConfig& cfg, const GraphSpec& spec, const BasisSpec& bs) {
  LatticeGraph g = spec.build();
  Region lambda = Region::whole(g);
  auto basis = std::make_shared<const FockBasis>(lambda, bs);
  ModelParams params = cfg.model(g);
  SparseOperator H = assemble_hamiltonian(g, lambda, *basis, params);
  return {std::move(g), std::move(lambda), std::move(basis), std::move(params), std::move(H)};
}

Model build_model(const ExperimentConfig& cfg) {
  return build_model(cfg, cfg.graph, cfg.basis_spec());
}

bool same_operator(const SparseOperator& a, const SparseOperator& b) {
  return a.basis_id() == b.basis_id() && std::ranges::equal(a.row_ptr(), b.row_ptr()) &&
         std::ranges::equal(a.cols(), b.cols()) && std::ranges::equal(a.values(), b.values());
}

GibbsState make_gibbs(const ExperimentConfig& cfg, std::shared_ptr<const SpectralDecomposition> d,
                      const FockBasis& basis) {
  GibbsOptions opts;
  opts.tail_tolerance = cfg.tol.tail;
  opts.basis_is_system = cfg.basis_is_system;
  return gibbs_state(std::move(d), cfg.beta, cfg.mu, basis, opts);
}

Region support_of(const Model& m, const ObservableConfig& o) {
  if (o.sites.empty()) throw ConfigError("observables", "this experiment needs a localized A");
  return Region(m.g, o.sites);
}

/// sigma used by the cutoff and LR constants: the larger of the surface
/// parameter and the maximum degree.
double effective_sigma(const LatticeGraph& g) {
  const SurfaceParameter s = surface_parameter(g, std::max(1, g.diameter()));
  return std::max(s.sigma, static_cast<double>(s.max_degree));
}

bool within(double measured, double bound, double rel) {
  return measured <= bound * (1.0 + rel) + std::numeric_limits<double>::min();
}

ExperimentReport new_report(const std::string& id, const ExperimentConfig& cfg,
                            std::vector<std::string> columns, std::vector<std::string> docs) {
  ExperimentReport r;
  r.experiment = id;
  r.columns = std::move(columns);
  r.column_docs = std::move(docs);
  r.config = cfg.to_json();
  r.seed = cfg.seed;
  return r;
}

}  // namespace

double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return kNaN;
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return kNaN;
  return (n * sxy - sx * sy) / den;
}

double minimal_certified_constant(const Eigen::MatrixXd& K, const Eigen::MatrixXd& W, double tol,
                                  double rel) {
  auto min_eig = [&](double c) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c * W - K, Eigen::EigenvaluesOnly);
    return es.eigenvalues().size() ? es.eigenvalues()(0) : 0.0;
  };
  if (min_eig(0.0) >= -tol) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; min_eig(hi) < -tol; ++i) {
    if (i > 200) throw NumericalFailure("no finite constant certifies the operator inequality");
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > rel * hi) {
    const double mid = 0.5 * (lo + hi);
    (min_eig(mid) >= -tol ? hi : lo) = mid;
  }
  return hi;
}

// ---------------------------------------------------------------------------

ExperimentReport run_free_evolution_check(const ExperimentConfig& cfg) {
  if (cfg.graph.type != "chain") throw ConfigError("graph.type", "free-evolution needs a chain");
  if (cfg.sector != 1) throw ConfigError("basis.sector", "free-evolution needs the one-particle sector");
  ExperimentReport rep = new_report(
      "free-evolution", cfg, {"t", "x", "m", "re", "im", "ref_re", "ref_im", "error", "bound"},
      {"time", "displacement from the start site", "condensate size (nonlocality rows)",
       "propagated amplitude (real part) or closed-form expectation",
       "propagated amplitude (imaginary part)",
       "series oracle (real part) or direct binomial sum (m <= 100)",
       "series oracle (imaginary part)", "|propagated - oracle| or |closed form - direct sum|",
       "tolerance (amplitude rows) or variance bound (nonlocality rows)"});
  rep.plot = {"x", {"error"}, false, true};

  const int D = cfg.max_displacement;
  auto amplitudes = [&](std::size_t length) {
    const Model m = build_model(cfg, cfg.graph.with_length(length), {1, std::nullopt, std::nullopt});
    const auto center = static_cast<Vertex>(length / 2);
    if (center - D < 0 || center + D >= static_cast<Vertex>(length)) {
      throw ConfigError("free_evolution.max_displacement", "displacements leave the chain");
    }
    std::vector<Occupation> occ(length, 0);
    occ[static_cast<std::size_t>(center)] = 1;
    const StateVector psi0 = StateVector::basis_state(*m.basis, m.basis->index_of(occ));
    std::vector<std::vector<cplx>> out(cfg.t_grid.size());
    parallel_for(cfg.t_grid.size(), [&](std::size_t i) {
      const StateVector psi = evolve_state(m.H, psi0, cfg.t_grid[i]);
      for (int x = -D; x <= D; ++x) {
        std::vector<Occupation> o(length, 0);
        o[static_cast<std::size_t>(center + x)] = 1;
        out[i].push_back(psi.amplitudes[m.basis->index_of(o)]);
      }
    });
    return out;
  };

  const auto amps = amplitudes(cfg.graph.length);
  const auto doubled = amplitudes(2 * cfg.graph.length - 1);
  double worst_boundary = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    for (std::size_t k = 0; k < amps[i].size(); ++k) {
      worst_boundary = std::max(worst_boundary, std::abs(amps[i][k] - doubled[i][k]));
    }
  }
  if (!(worst_boundary < cfg.tol.boundary)) {
    std::ostringstream msg;
    msg << "chain of length " << cfg.graph.length << " differs from its doubled copy by "
        << worst_boundary << " (tolerance " << cfg.tol.boundary
        << "); enlarge the lattice or shorten the times";
    throw BoundaryContamination(msg.str());
  }
  rep.check("boundary", true, "max |chain - doubled chain| = " + fmt(worst_boundary));

  double worst = 0.0;
  for (std::size_t i = 0; i < cfg.t_grid.size(); ++i) {
    const double t = cfg.t_grid[i];
    for (int x = -D; x <= D; ++x) {
      const cplx a = amps[i][static_cast<std::size_t>(x + D)];
      const cplx ref = free_particle_amplitude(x, t);
      const double err = std::abs(a - ref);
      worst = std::max(worst, err);
      rep.add("amplitude t=" + fmt(t),
              {t, double(x), kNaN, a.real(), a.imag(), ref.real(), ref.imag(), err, cfg.tol.bessel},
              err < cfg.tol.bessel);
    }
  }
  rep.summary["max_amplitude_error"] = worst;

  // Condensate nonlocality.
  const double tn = cfg.nonlocality_time;
  const int xn = cfg.nonlocality_site;
  const double p = std::norm(free_particle_amplitude(xn, tn));
  double prev = std::numeric_limits<double>::infinity();
  bool monotone = true;
  double last = kNaN;
  int last_m = 0;
  for (int m : cfg.m_grid) {
    const double value = condensate_nonlocality_expectation(m, xn, tn);
    double direct = kNaN, err = kNaN;
    if (m <= 100) {
      // sum_k C(m,k) p^k (1-p)^{m-k} / (k+1), binomial weights in log space
      long double acc = 0.0L;
      for (int k = 0; k <= m; ++k) {
        const double lw = std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) +
                          (k > 0 ? k * std::log(p) : 0.0) +
                          (m - k > 0 ? (m - k) * std::log1p(-p) : 0.0);
        acc += std::exp(static_cast<long double>(lw)) / (k + 1);
      }
      direct = static_cast<double>(acc);
      err = std::abs(value - direct);
    }
    const double bound = condensate_nonlocality_bound(m, p);
    const bool ok = value <= bound && (std::isnan(err) || err < 1e-12);
    monotone = monotone && value < prev;
    prev = value;
    last = value;
    last_m = m;
    rep.add("nonlocality", {tn, double(xn), double(m), value, 0.0, direct, 0.0, err, bound}, ok);
  }
  rep.summary["nonlocality_probability"] = p;
  rep.check("nonlocality decreasing in m", monotone);
  if (last_m * p > 400.0) {
    rep.check("nonlocality small at largest m", last < 0.05,
              "m = " + std::to_string(last_m) + ", value " + fmt(last));
  }
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_moment_propagation(const ExperimentConfig& cfg) {
  ExperimentReport rep = new_report(
      "moments", cfg, {"t", "x", "measured", "M", "bound", "ratio"},
      {"time", "site", "gamma(tau_t((1+N_x)^p))", "initial moment bound sup_x gamma((1+N_x)^p)",
       "e^{eta |t|} M", "measured / bound"});
  rep.plot = {"t", {"measured", "bound"}, false, true};

  const Model m = build_model(cfg);
  const auto decomp =
      std::make_shared<const SpectralDecomposition>(eigendecompose(m.H, *m.basis));
  const GibbsState gamma = make_gibbs(cfg, decomp, *m.basis);
  const double sigma = static_cast<double>(m.g.max_degree());
  const double eta = gronwall_rate(cfg.p, sigma);
  rep.summary["eta"] = eta;
  rep.summary["sigma"] = sigma;
  rep.summary["tail"] = gamma.tail_estimate();

  const std::vector<Vertex>& sites = m.lambda.members();
  std::vector<SparseOperator> moments;
  for (Vertex x : sites) moments.push_back(number_moment(*m.basis, x, cfg.p));

  const std::size_t nt = cfg.t_grid.size();
  // Gibbs initial state.
  const double M = moment_sup(gamma, *m.basis, cfg.p);
  rep.summary["M_gibbs"] = M;
  std::vector<double> gibbs(nt * sites.size());
  parallel_for(nt * sites.size(), [&](std::size_t k) {
    const std::size_t i = k / sites.size(), s = k % sites.size();
    gibbs[k] = expectation(gamma, heisenberg_operator(*decomp, moments[s], cfg.t_grid[i])).real();
  });
  double max_ratio = 0.0;
  for (std::size_t k = 0; k < gibbs.size(); ++k) {
    const double t = cfg.t_grid[k / sites.size()];
    const Vertex x = sites[k % sites.size()];
    const double bound = std::exp(eta * std::abs(t)) * M;
    max_ratio = std::max(max_ratio, gibbs[k] / bound);
    rep.add("gibbs x=" + std::to_string(x), {t, double(x), gibbs[k], M, bound, gibbs[k] / bound},
            within(gibbs[k], bound, cfg.tol.bound));
  }
  rep.summary["max_ratio_gibbs"] = max_ratio;

  // Occupation-vector initial state.
  if (!cfg.initial_occupation.empty()) {
    if (cfg.initial_occupation.size() != sites.size()) {
      throw ConfigError("moments.initial_occupation", "length must equal the number of sites");
    }
    std::vector<Occupation> occ;
    for (int n : cfg.initial_occupation) occ.push_back(static_cast<Occupation>(n));
    const StateVector psi0 = StateVector::basis_state(*m.basis, m.basis->index_of(occ));
    double M0 = 0.0;
    for (const auto& op : moments) {
      M0 = std::max(M0, kernels::dot(psi0.amplitudes, op.apply(psi0.amplitudes)).real());
    }
    rep.summary["M_pure"] = M0;
    std::vector<double> pure(nt * sites.size());
    parallel_for(nt, [&](std::size_t i) {
      const StateVector psi = evolve_dense(*decomp, psi0, cfg.t_grid[i]);
      for (std::size_t s = 0; s < sites.size(); ++s) {
        pure[i * sites.size() + s] =
            kernels::dot(psi.amplitudes, moments[s].apply(psi.amplitudes)).real();
      }
    });
    double max_pure = 0.0;
    for (std::size_t k = 0; k < pure.size(); ++k) {
      const double t = cfg.t_grid[k / sites.size()];
      const Vertex x = sites[k % sites.size()];
      const double bound = std::exp(eta * std::abs(t)) * M0;
      max_pure = std::max(max_pure, pure[k] / bound);
      rep.add("occupation x=" + std::to_string(x), {t, double(x), pure[k], M0, bound, pure[k] / bound},
              within(pure[k], bound, cfg.tol.bound));
    }
    rep.summary["max_ratio_pure"] = max_pure;
  }
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_cutoff_scaling(const ExperimentConfig& cfg) {
  ExperimentReport rep = new_report(
      "cutoff", cfg,
      {"lambda", "t", "measured", "bound", "ratio", "boundary_term", "drift_term",
       "projection_term", "commutator_term"},
      {"cutoff level", "time", "|gamma(tau_t(A)B) - gamma(tau~_t(A)B)|",
       "explicit bound (sum of the four contributions times ||A|| ||B||)", "measured / bound",
       "(1 + e^{eta t/2}) sqrt(lambda^-p M |Y|)",
       "4 |Y| lambda^{1-p/2} (e^{eta t/2} - 1) sigma^2 sqrt(M)",
       "e^{eta t} sqrt(lambda^-p |X|^p M |Y|) (counted twice in the bound)",
       "4 |Y| lambda^{1-p/2} t e^{eta t/2} sigma^2 sqrt(M |X|^p)"});
  rep.plot = {"lambda", {"measured", "bound"}, true, true};

  const Model m = build_model(cfg);
  const auto decomp =
      std::make_shared<const SpectralDecomposition>(eigendecompose(m.H, *m.basis));
  const GibbsState gamma = make_gibbs(cfg, decomp, *m.basis);
  const Region X = support_of(m, cfg.A);
  const Region Y = enlargement(m.g, X, cfg.cutoff_radius);
  const SparseOperator A = local_observable(*m.basis, cfg.A.build());
  const SparseOperator B = local_observable(*m.basis, cfg.B.build());
  NormOptions nopts;
  nopts.seed = cfg.seed;
  const double norm_a = operator_norm(A, nopts), norm_b = operator_norm(B, nopts);
  const BlockMatrix Bb = BlockMatrix::from_sparse(B, decomp->partition_ptr());

  const double M = moment_sup(gamma, *m.basis, cfg.p);
  const double sigma = effective_sigma(m.g);
  const double eta = gronwall_rate(cfg.p, static_cast<double>(m.g.max_degree()));
  rep.summary["M"] = M;
  rep.summary["eta"] = eta;
  rep.summary["sigma"] = sigma;
  rep.summary["norm_A"] = norm_a;
  rep.summary["norm_B"] = norm_b;
  rep.summary["tail"] = gamma.tail_estimate();

  struct Point {
    double lambda, t, measured;
  };
  std::vector<Point> pts;
  for (double t : cfg.t_grid) {
    for (double lam : cfg.lambda_grid) pts.push_back({lam, t, 0.0});
  }
  // One decomposition per cutoff level; P H P equal to H reuses H's.
  std::vector<std::shared_ptr<const SpectralDecomposition>> tilde(cfg.lambda_grid.size());
  parallel_for(cfg.lambda_grid.size(), [&](std::size_t i) {
    const SparseOperator P =
        cutoff_projection(*m.basis, Y, static_cast<int>(std::floor(cfg.lambda_grid[i])));
    const SparseOperator K = sandwich(P, m.H);
    tilde[i] = same_operator(K, m.H)
                   ? decomp
                   : std::make_shared<const SpectralDecomposition>(eigendecompose(K, *m.basis));
  });
  parallel_for(pts.size(), [&](std::size_t k) {
    const std::size_t li = k % cfg.lambda_grid.size();
    const cplx full = expectation(gamma, heisenberg_operator(*decomp, A, pts[k].t) * Bb);
    const cplx cut = expectation(gamma, heisenberg_operator(*tilde[li], A, pts[k].t) * Bb);
    pts[k].measured = std::abs(full - cut);
  });

  const int cap = m.basis->max_occupation();
  bool zero_ok = true, monotone = true;
  std::map<double, std::pair<std::vector<double>, std::vector<double>>> fit;
  double max_ratio = 0.0;
  double prev_t = kNaN, prev = kNaN;
  for (const auto& pt : pts) {
    BoundInputs in;
    in.p = cfg.p;
    in.M = M;
    in.sigma = sigma;
    in.d = m.g.dim();
    in.lambda = pt.lambda;
    in.t = pt.t;
    in.x_size = static_cast<double>(X.size());
    in.y_size = static_cast<double>(Y.size());
    in.norm_a = norm_a;
    in.norm_b = norm_b;
    const CutoffTerms terms = cutoff_terms(in, eta);
    const double ratio = pt.measured / terms.total;
    max_ratio = std::max(max_ratio, ratio);
    rep.add("t=" + fmt(pt.t),
            {pt.lambda, pt.t, pt.measured, terms.total, ratio, terms.boundary, terms.drift,
             terms.projection, terms.commutator},
            within(pt.measured, terms.total, cfg.tol.bound));
    if (pt.lambda >= cap && pt.measured != 0.0) zero_ok = false;
    if (pt.t == prev_t && pt.measured > prev) monotone = false;
    prev_t = pt.t;
    prev = pt.measured;
    if (pt.lambda < cap) {
      fit[pt.t].first.push_back(pt.lambda);
      fit[pt.t].second.push_back(pt.measured);
    }
  }
  rep.check("exact zero at lambda >= cap", zero_ok, "cap = " + std::to_string(cap));
  rep.summary["monotone_in_lambda"] = monotone;
  rep.summary["max_ratio"] = max_ratio;
  rep.summary["predicted_exponent"] = 1.0 - cfg.p / 2.0;
  json fits = json::object();
  for (const auto& [t, xy] : fit) fits[fmt(t)] = fit_log_slope(xy.first, xy.second);
  rep.summary["fitted_exponent"] = fits;
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_lr_decay(const ExperimentConfig& cfg) {
  ExperimentReport rep = new_report(
      "lr", cfg, {"t", "m", "distance", "measured", "bound", "ratio"},
      {"time", "shell count (norm rows)", "d(X, Y) (commutator rows)",
       "||tau^shell_t(A) - tau^full_t(A)|| or |gamma([tau_t(A), B])|",
       "explicit Lieb-Robinson bound (norm rows)", "measured / bound"});
  rep.plot = {"m", {"measured", "bound"}, false, true};

  const Model m = build_model(cfg);
  const int r = cfg.range();
  const Region X = support_of(m, cfg.A);
  const SparseOperator A = local_observable(*m.basis, cfg.A.build());
  NormOptions nopts;
  nopts.seed = cfg.seed;
  const double norm_a = operator_norm(A, nopts);
  const double sigma = effective_sigma(m.g);
  const int lam = static_cast<int>(std::floor(cfg.lambda));
  rep.summary["sigma"] = sigma;
  rep.summary["kappa"] = lr_kappa(sigma, r, m.g.dim());
  rep.summary["norm_A"] = norm_a;

  // (a) Operator-norm difference per shell count.
  struct Shell {
    bool covers;
    std::shared_ptr<const SpectralDecomposition> full, shell;
  };
  std::vector<Shell> shells(cfg.m_grid.size());
  parallel_for(cfg.m_grid.size(), [&](std::size_t i) {
    const int mm = cfg.m_grid[i];
    const SparseOperator P = cutoff_projection(*m.basis, enlargement(m.g, X, (2 * mm + 1) * r), lam);
    const Region shell_region = enlargement(m.g, X, 2 * mm * r);
    const SparseOperator Kf = sandwich(P, m.H);
    auto full = std::make_shared<const SpectralDecomposition>(eigendecompose(Kf, *m.basis));
    const bool covers = shell_region == m.lambda;
    std::shared_ptr<const SpectralDecomposition> shell = full;
    if (!covers) {
      const SparseOperator Ks =
          sandwich(P, assemble_hamiltonian(m.g, shell_region, *m.basis, m.params));
      shell = std::make_shared<const SpectralDecomposition>(eigendecompose(Ks, *m.basis));
    }
    shells[i] = {covers, std::move(full), std::move(shell)};
  });

  const std::size_t nm = cfg.m_grid.size();
  std::vector<double> diffs(cfg.t_grid.size() * nm);
  parallel_for(diffs.size(), [&](std::size_t k) {
    const double t = cfg.t_grid[k / nm];
    const Shell& s = shells[k % nm];
    diffs[k] =
        (heisenberg_operator(*s.shell, A, t) - heisenberg_operator(*s.full, A, t)).norm();
  });
  bool zero_ok = true;
  double max_ratio = 0.0;
  for (std::size_t k = 0; k < diffs.size(); ++k) {
    const double t = cfg.t_grid[k / nm];
    const int mm = cfg.m_grid[k % nm];
    BoundInputs in;
    in.sigma = sigma;
    in.d = m.g.dim();
    in.r = r;
    in.lambda = cfg.lambda;
    in.m = mm;
    in.t = t;
    in.x_size = static_cast<double>(X.size());
    in.norm_a = norm_a;
    in.v_sup = m.params.v.sup_norm();
    const double bound = lr_bound(in);
    const double ratio = bound > 0 ? diffs[k] / bound : kNaN;
    if (bound > 0) max_ratio = std::max(max_ratio, ratio);
    if (shells[k % nm].covers && diffs[k] != 0.0) zero_ok = false;
    rep.add("norm t=" + fmt(t), {t, double(mm), kNaN, diffs[k], bound, ratio},
            within(diffs[k], bound, cfg.tol.bound));
  }
  rep.check("exact zero once the shell covers the volume", zero_ok);
  rep.summary["max_ratio"] = max_ratio;

  // (b) Gibbs commutators |gamma([tau_t(f(N_0)), f(N_j)])| against distance.
  if (!cfg.distances.empty()) {
    const auto decomp =
        std::make_shared<const SpectralDecomposition>(eigendecompose(m.H, *m.basis));
    const GibbsState gamma = make_gibbs(cfg, decomp, *m.basis);
    const Vertex origin = m.lambda.members().front();
    const SparseOperator f0 = local_observable(*m.basis, inverse_number(origin));
    std::vector<Vertex> targets;
    for (int d : cfg.distances) {
      for (Vertex y : m.lambda) {
        if (m.g.distance(origin, y) == d) {
          targets.push_back(y);
          break;
        }
      }
    }
    const std::size_t nt = cfg.t_grid.size();
    std::vector<double> comm(targets.size() * nt);
    parallel_for(targets.size(), [&](std::size_t j) {
      const SparseOperator fj = local_observable(*m.basis, inverse_number(targets[j]));
      const GreenFunction F(gamma, f0, fj);
      for (std::size_t i = 0; i < nt; ++i) {
        const double t = cfg.t_grid[i];
        comm[j * nt + i] = std::abs(F(cplx(t, 0.0)) - F(cplx(t, -gamma.beta())));
      }
    });
    json fits = json::object();
    for (std::size_t i = 0; i < nt; ++i) {
      std::vector<double> xs, ys;
      for (std::size_t j = 0; j < targets.size(); ++j) {
        const double d = m.g.distance(origin, targets[j]);
        const double v = comm[j * nt + i];
        rep.add("commutator t=" + fmt(cfg.t_grid[i]), {cfg.t_grid[i], kNaN, d, v, kNaN, kNaN});
        if (v > 1e-13) {
          xs.push_back(d);
          ys.push_back(v);
        }
      }
      fits[fmt(cfg.t_grid[i])] = fit_log_slope(xs, ys);
    }
    rep.summary["commutator_fitted_exponent"] = fits;
    rep.summary["predicted_exponent"] = lrb_decay_exponent(m.g.dim(), cfg.p);
  }
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_local_approx(const ExperimentConfig& cfg) {
  ExperimentReport rep = new_report(
      "local-approx", cfg, {"t", "m", "measured", "threshold", "envelope"},
      {"time (NaN on sup rows)", "shell count",
       "|gamma((tau_t(A) - tau^{X[2mr]}_t(A)) B)| or its sup over t",
       "epsilon ||A|| ||B||", "m^{d+1} e^{-m} + m^{d-p/2+1}"});
  rep.plot = {"m", {"measured", "threshold"}, false, true};

  const Model m = build_model(cfg);
  const int r = cfg.range();
  const Region X = support_of(m, cfg.A);
  const auto decomp =
      std::make_shared<const SpectralDecomposition>(eigendecompose(m.H, *m.basis));
  const GibbsState gamma = make_gibbs(cfg, decomp, *m.basis);
  const SparseOperator A = local_observable(*m.basis, cfg.A.build());
  const SparseOperator B = local_observable(*m.basis, cfg.B.build());
  NormOptions nopts;
  nopts.seed = cfg.seed;
  const double threshold = cfg.epsilon * operator_norm(A, nopts) * operator_norm(B, nopts);
  const BlockMatrix Bb = BlockMatrix::from_sparse(B, decomp->partition_ptr());
  const std::vector<double>& ts = cfg.approx_t_grid.empty() ? cfg.t_grid : cfg.approx_t_grid;

  const std::size_t nm = cfg.m_grid.size();
  std::vector<std::shared_ptr<const SpectralDecomposition>> shells(nm);
  parallel_for(nm, [&](std::size_t i) {
    const Region shell = enlargement(m.g, X, 2 * cfg.m_grid[i] * r);
    shells[i] = shell == m.lambda
                    ? decomp
                    : std::make_shared<const SpectralDecomposition>(eigendecompose(
                          assemble_hamiltonian(m.g, shell, *m.basis, m.params), *m.basis));
  });
  std::vector<double> diff(nm * ts.size());
  parallel_for(diff.size(), [&](std::size_t k) {
    const double t = ts[k % ts.size()];
    const auto& s = shells[k / ts.size()];
    const BlockMatrix full = heisenberg_operator(*decomp, A, t);
    const BlockMatrix local = s == decomp ? full : heisenberg_operator(*s, A, t);
    diff[k] = std::abs(expectation(gamma, (full - local) * Bb));
  });

  std::vector<double> sups(nm, 0.0);
  for (std::size_t i = 0; i < nm; ++i) {
    const double env = local_approx_envelope(cfg.m_grid[i], m.g.dim(), cfg.p);
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const double v = diff[i * ts.size() + j];
      sups[i] = std::max(sups[i], v);
      rep.add("m=" + std::to_string(cfg.m_grid[i]), {ts[j], double(cfg.m_grid[i]), v, threshold, env});
    }
  }
  int m0 = -1;
  bool decreasing = true;
  for (std::size_t i = 0; i < nm; ++i) {
    const double env = local_approx_envelope(cfg.m_grid[i], m.g.dim(), cfg.p);
    rep.add("sup", {kNaN, double(cfg.m_grid[i]), sups[i], threshold, env});
    if (i > 0 && sups[i] > sups[i - 1] + cfg.tol.residual) decreasing = false;
    if (m0 < 0 && sups[i] < threshold) m0 = cfg.m_grid[i];
  }
  rep.check("sup difference decreases with m", decreasing);
  rep.check("below epsilon within the sweep", m0 >= 0,
            m0 >= 0 ? "empirical m_0 = " + std::to_string(m0) : "no m in the sweep reaches epsilon");
  rep.summary["empirical_m0"] = m0;
  rep.summary["threshold"] = threshold;
  rep.summary["tail"] = gamma.tail_estimate();
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_kms_check(const ExperimentConfig& cfg) {
  ExperimentReport rep = new_report(
      "kms", cfg,
      {"pair", "t", "forward_residual", "backward_residual", "invariance", "strip_ratio",
       "volume", "value"},
      {"observable pair index", "time", "|F(t) - gamma(tau_t(A)B)|",
       "|F(t - i beta) - gamma(B tau_t(A))|", "|gamma(tau_t(A)) - gamma(A)|",
       "max over the strip grid of |F(z)| / (||A|| ||B||)", "chain length (growth rows)",
       "gamma(tau_t(A)B) (growth rows) or |difference to the previous volume|"});
  rep.plot = {"t", {"forward_residual", "backward_residual"}, false, true};

  const Model m = build_model(cfg);
  const auto decomp =
      std::make_shared<const SpectralDecomposition>(eigendecompose(m.H, *m.basis));
  const GibbsState gamma = make_gibbs(cfg, decomp, *m.basis);
  rep.summary["tail"] = gamma.tail_estimate();
  rep.summary["n_max"] = gamma.n_max();
  rep.check("tail certified", gamma.certified(),
            "tail " + fmt(gamma.tail_estimate()) + " vs tolerance " + fmt(cfg.tol.tail) +
                " at N_max = " + std::to_string(gamma.n_max()));

  const auto& sites = m.lambda.members();
  const Vertex a = sites.front(), b = sites.size() > 1 ? sites[1] : sites.front();
  std::vector<std::pair<ObservableSpec, ObservableSpec>> pairs = {
      {IdentityObservable{}, IdentityObservable{}},
      {inverse_number(a), inverse_number(b)},
      {NormalizedHopping{a, b}, inverse_number(a)},
      {NumberProjector{a, 1}, NormalizedHopping{a, b}},
      {NumberProjector{b, 2}, tabulated_function(a, {0.3, -0.7, 1.0})}};
  if (a == b) pairs.resize(2);
  if (!(cfg.A.kind == "identity" && cfg.B.kind == "identity")) {
    pairs.push_back({cfg.A.build(), cfg.B.build()});
  }

  NormOptions nopts;
  nopts.seed = cfg.seed;
  const std::size_t nt = cfg.t_grid.size();
  struct Row {
    double fwd, bwd, inv;
  };
  std::vector<Row> rows(pairs.size() * nt);
  std::vector<double> strip(pairs.size());
  const int n = cfg.strip_points;
  const double t_span = std::max(1.0, cfg.t_grid.empty() ? 1.0 : *std::max_element(cfg.t_grid.begin(), cfg.t_grid.end()));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const SparseOperator A = local_observable(*m.basis, pairs[p].first);
    const SparseOperator B = local_observable(*m.basis, pairs[p].second);
    const GreenFunction F(gamma, A, B);
    const double scale = operator_norm(A, nopts) * operator_norm(B, nopts);
    for (std::size_t i = 0; i < nt; ++i) {
      const double t = cfg.t_grid[i];
      const KmsBoundary direct = kms_boundary_direct(gamma, m.H, A, B, t);
      rows[p * nt + i] = {std::abs(F(cplx(t, 0.0)) - direct.forward),
                          std::abs(F(cplx(t, -gamma.beta())) - direct.backward),
                          invariance_residual(gamma, m.H, A, t)};
    }
    double worst = 0.0;
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        const double re = -t_span + 2.0 * t_span * u / (n - 1);
        const double im = -gamma.beta() * v / (n - 1);
        const double mag = std::abs(F(cplx(re, im)));
        worst = std::max(worst, scale > 0 ? mag / scale : (mag == 0 ? 0.0 : kNaN));
      }
    }
    strip[p] = worst;
  }
  double worst_res = 0.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const std::string label = describe(pairs[p].first) + " ; " + describe(pairs[p].second);
    for (std::size_t i = 0; i < nt; ++i) {
      const Row& row = rows[p * nt + i];
      worst_res = std::max({worst_res, row.fwd, row.bwd, row.inv});
      rep.add(label, {double(p), cfg.t_grid[i], row.fwd, row.bwd, row.inv, strip[p], kNaN, kNaN},
              row.fwd < cfg.tol.residual && row.bwd < cfg.tol.residual &&
                  row.inv < cfg.tol.residual);
    }
    rep.add("strip " + label, {double(p), kNaN, kNaN, kNaN, kNaN, strip[p], kNaN, kNaN},
            strip[p] <= 1.0 + 1e-12);
  }
  rep.summary["max_residual"] = worst_res;

  // Volume growth along nested chains.
  if (!cfg.volumes.empty()) {
    std::vector<std::vector<double>> values(cfg.volumes.size());
    std::vector<double> tails(cfg.volumes.size());
    parallel_for(cfg.volumes.size(), [&](std::size_t v) {
      const Model mv = build_model(cfg, cfg.graph.with_length(cfg.volumes[v]),
                                   {std::nullopt, cfg.growth_n_max, cfg.cap});
      const auto dv =
          std::make_shared<const SpectralDecomposition>(eigendecompose(mv.H, *mv.basis));
      const GibbsState gv = make_gibbs(cfg, dv, *mv.basis);
      tails[v] = gv.tail_estimate();
      const GreenFunction F(gv, local_observable(*mv.basis, inverse_number(0)),
                            local_observable(*mv.basis, inverse_number(1)));
      for (double t : cfg.t_grid) values[v].push_back(F(cplx(t, 0.0)).real());
    });
    json growth = json::array();
    for (std::size_t v = 0; v < cfg.volumes.size(); ++v) {
      for (std::size_t i = 0; i < nt; ++i) {
        const double val = values[v][i];
        rep.add("growth value", {kNaN, cfg.t_grid[i], kNaN, kNaN, kNaN, kNaN,
                                 double(cfg.volumes[v]), val});
        if (v > 0) {
          rep.add("growth difference", {kNaN, cfg.t_grid[i], kNaN, kNaN, kNaN, kNaN,
                                        double(cfg.volumes[v]), std::abs(val - values[v - 1][i])});
        }
      }
      growth.push_back({{"length", cfg.volumes[v]}, {"tail", tails[v]}});
    }
    rep.summary["growth"] = growth;
  }
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_derivative_bound(const ExperimentConfig& cfg) {
  ExperimentReport rep = new_report(
      "derivative", cfg,
      {"volume", "t", "C", "min_eig", "derivative", "forward", "backward", "moment", "bound"},
      {"chain length", "time", "certified constant in H_{X[r]}^2 <= C (1 + N_{X[r]}^4)",
       "min-eig(C (1 + N^4) - H^2) at the certified C",
       "|d/dt gamma(tau_t(A)B)| + |d/dt gamma(B tau_t(A))|",
       "d/dt gamma(tau_t^{X[R]}(A) B) (real part, central difference)",
       "d/dt gamma(B tau_t^{X[R]}(A)) (real part, central difference)",
       "gamma(tau_t^{X[R]}(1 + N_{X[r]}^4))", "C' ||A|| ||B||"});
  rep.plot = {"t", {"derivative", "bound"}, false, true};

  std::vector<std::size_t> volumes = cfg.volumes;
  if (volumes.empty()) volumes.push_back(cfg.graph.length);
  const int r = cfg.range();
  const double h = cfg.tol.fd_step;
  const std::size_t nt = cfg.t_grid.size();

  struct Volume {
    double C = 0, min_eig = 0, norm_a = 0, norm_b = 0;
    std::vector<cplx> fwd, bwd, fwd2, bwd2;
    std::vector<double> moment;
  };
  std::vector<Volume> vols(volumes.size());
  parallel_for(volumes.size(), [&](std::size_t v) {
    const GraphSpec spec = cfg.graph.type == "chain" ? cfg.graph.with_length(volumes[v]) : cfg.graph;
    const Model m = build_model(cfg, spec, cfg.basis_spec());
    const Region X = support_of(m, cfg.A);
    const Region Xr = enlargement(m.g, X, r);
    const Region XR = enlargement(m.g, X, cfg.R);

    const SparseOperator Hr = assemble_hamiltonian(m.g, Xr, *m.basis, m.params);
    const Eigen::MatrixXd Hd = Hr.to_dense().real();
    const Eigen::MatrixXd K = Hd * Hd;
    const SparseOperator W = region_number_function(
        *m.basis, Xr, [](int n) { return 1.0 + std::pow(static_cast<double>(n), 4); });
    const Eigen::MatrixXd Wd = W.to_dense().real();
    Volume& out = vols[v];
    out.C = minimal_certified_constant(K, Wd, cfg.tol.eig);
    {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((out.C + cfg.tol.eig) * Wd - K,
                                                        Eigen::EigenvaluesOnly);
      out.min_eig = es.eigenvalues()(0);
    }

    const auto decomp =
        std::make_shared<const SpectralDecomposition>(eigendecompose(m.H, *m.basis));
    const GibbsState gamma = make_gibbs(cfg, decomp, *m.basis);
    const SpectralDecomposition dR = eigendecompose(
        assemble_hamiltonian(m.g, XR, *m.basis, m.params), *m.basis);
    const SparseOperator A = local_observable(*m.basis, cfg.A.build());
    const SparseOperator B = local_observable(*m.basis, cfg.B.build());
    NormOptions nopts;
    nopts.seed = cfg.seed;
    out.norm_a = operator_norm(A, nopts);
    out.norm_b = operator_norm(B, nopts);
    const BlockMatrix Bb = BlockMatrix::from_sparse(B, decomp->partition_ptr());
    const BlockMatrix Wb = BlockMatrix::from_sparse(W, decomp->partition_ptr());

    auto fwd_at = [&](double t) { return expectation(gamma, heisenberg_operator(dR, A, t) * Bb); };
    auto bwd_at = [&](double t) { return expectation(gamma, Bb * heisenberg_operator(dR, A, t)); };
    for (double t : cfg.t_grid) {
      out.fwd.push_back((fwd_at(t + h) - fwd_at(t - h)) / (2.0 * h));
      out.bwd.push_back((bwd_at(t + h) - bwd_at(t - h)) / (2.0 * h));
      out.fwd2.push_back((fwd_at(t + 2 * h) - fwd_at(t - 2 * h)) / (4.0 * h));
      out.bwd2.push_back((bwd_at(t + 2 * h) - bwd_at(t - 2 * h)) / (4.0 * h));
      out.moment.push_back(expectation(gamma, heisenberg_operator(dR, Wb, t)).real());
    }
  });

  double C = 0.0, S = 0.0;
  bool certified = true;
  for (std::size_t v = 0; v < vols.size(); ++v) {
    C = std::max(C, vols[v].C);
    certified = certified && vols[v].min_eig >= -cfg.tol.eig;
    for (double s : vols[v].moment) S = std::max(S, s);
    rep.add("constant", {double(volumes[v]), kNaN, vols[v].C, vols[v].min_eig, kNaN, kNaN, kNaN,
                         kNaN, kNaN},
            vols[v].min_eig >= -cfg.tol.eig);
  }
  const double c_prime = 4.0 * std::sqrt(C * S);
  rep.check("operator inequality certified", certified);
  rep.summary["C"] = C;
  rep.summary["moment_sup"] = S;
  rep.summary["C_prime"] = c_prime;

  bool fd_ok = true;
  double worst_ratio = 0.0;
  for (std::size_t v = 0; v < vols.size(); ++v) {
    const Volume& vo = vols[v];
    const double bound = c_prime * vo.norm_a * vo.norm_b;
    for (std::size_t i = 0; i < nt; ++i) {
      const double deriv = std::abs(vo.fwd[i]) + std::abs(vo.bwd[i]);
      const bool flagged = std::abs(vo.fwd[i] - vo.fwd2[i]) > cfg.tol.fd_flag ||
                           std::abs(vo.bwd[i] - vo.bwd2[i]) > cfg.tol.fd_flag;
      fd_ok = fd_ok && !flagged;
      if (bound > 0) worst_ratio = std::max(worst_ratio, deriv / bound);
      rep.add("L=" + std::to_string(volumes[v]),
              {double(volumes[v]), cfg.t_grid[i], C, kNaN, deriv, vo.fwd[i].real(),
               vo.bwd[i].real(), vo.moment[i], bound},
              within(deriv, bound, cfg.tol.bound) && !flagged);
    }
  }
  rep.check("finite differences stable", fd_ok);
  rep.summary["max_ratio"] = worst_ratio;
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_experiment(const std::string& id, const ExperimentConfig& cfg) {
  if (cfg.workers > 0) set_worker_count(cfg.workers);
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  if (id == "free-evolution") {
    rep = run_free_evolution_check(cfg);
  } else if (id == "moments") {
    rep = run_moment_propagation(cfg);
  } else if (id == "cutoff") {
    rep = run_cutoff_scaling(cfg);
  } else if (id == "lr") {
    rep = run_lr_decay(cfg);
  } else if (id == "local-approx") {
    rep = run_local_approx(cfg);
  } else if (id == "kms") {
    rep = run_kms_check(cfg);
  } else if (id == "derivative") {
    rep = run_derivative_bound(cfg);
  } else {
    throw ConfigError("experiments", "unknown experiment \"" + id + "\"");
  }
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace bosonlr
