#include "bosonlr/operators.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "bosonlr/errors.hpp"

namespace bosonlr {

InteractionTable::InteractionTable(std::size_t num_vertices, std::vector<double> values,
                                   int range)
    : n_(num_vertices), values_(std::move(values)), range_(range) {
  if (values_.size() != n_ * n_) throw InvalidArgument("interaction table must be n x n");
  if (range_ < 1) throw InvalidArgument("interaction range must be >= 1");
}

double InteractionTable::sup_norm() const {
  double best = 0.0;
  for (double v : values_) best = std::max(best, std::abs(v));
  return best;
}

void InteractionTable::validate(const LatticeGraph& g) const {
  if (n_ != g.size()) throw InvalidArgument("interaction table sized for a different graph");
  for (std::size_t x = 0; x < n_; ++x) {
    for (std::size_t y = 0; y < n_; ++y) {
      const auto vx = static_cast<Vertex>(x), vy = static_cast<Vertex>(y);
      if ((*this)(vx, vy) != (*this)(vy, vx)) {
        throw InvalidArgument("interaction is not symmetric at (" + std::to_string(x) + "," +
                              std::to_string(y) + ")");
      }
      if (g.distance(vx, vy) >= range_ && (*this)(vx, vy) != 0.0) {
        throw InvalidArgument("interaction nonzero beyond its range at (" + std::to_string(x) +
                              "," + std::to_string(y) + ")");
      }
    }
  }
}

ModelParams bose_hubbard(const LatticeGraph& g, double J, double U, double mu) {
  return with_interaction_profile(g, J, U, {}, mu);
}

ModelParams with_interaction_profile(const LatticeGraph& g, double J, double U,
                                     std::span<const double> profile, double mu) {
  const std::size_t n = g.size();
  std::vector<double> table(n * n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const int d = g.distance(static_cast<Vertex>(x), static_cast<Vertex>(y));
      if (d == 0) {
        table[x * n + y] = U;
      } else if (static_cast<std::size_t>(d) <= profile.size()) {
        table[x * n + y] = profile[static_cast<std::size_t>(d) - 1];
      }
    }
  }
  ModelParams p;
  p.J = J;
  p.U = U;
  p.mu = mu;
  p.v = InteractionTable(n, std::move(table), static_cast<int>(profile.size()) + 1);
  return p;
}

namespace {

void require_region_in_basis(const Region& region, const FockBasis& basis, const char* what) {
  if (region.graph_id() != basis.region().graph_id() || !region.is_subset_of(basis.region())) {
    throw InvalidArgument(std::string(what) + ": region is not inside the basis region");
  }
}

int require_slot(const FockBasis& basis, Vertex x, const char* what) {
  const int slot = basis.slot_of(x);
  if (slot < 0) {
    throw InvalidArgument(std::string(what) + ": site " + std::to_string(x) +
                          " is outside the basis region");
  }
  return slot;
}

// Appends coeff * a_x^* a_y matrix elements (column k -> row k').
void append_hop(const FockBasis& basis, int sx, int sy, cplx coeff, std::vector<Triplet>& out) {
  std::vector<Occupation> occ(basis.num_sites());
  const int cap = basis.max_occupation();
  for (std::size_t k = 0; k < basis.dimension(); ++k) {
    const int ny = basis.occupation(k, static_cast<std::size_t>(sy));
    const int nx = basis.occupation(k, static_cast<std::size_t>(sx));
    if (ny == 0 || nx + 1 > cap) continue;
    const auto src = basis.state(k);
    std::copy(src.begin(), src.end(), occ.begin());
    occ[static_cast<std::size_t>(sy)] = static_cast<Occupation>(ny - 1);
    occ[static_cast<std::size_t>(sx)] = static_cast<Occupation>(nx + 1);
    if (auto target = basis.find(occ)) {
      out.push_back({*target, k, coeff * std::sqrt(static_cast<double>(ny * (nx + 1)))});
    }
  }
}

std::vector<Triplet> hopping_triplets(const LatticeGraph& g, const Region& region,
                                      const FockBasis& basis, double J, double multiplicity) {
  std::vector<Triplet> t;
  for (auto [x, y] : g.edges()) {
    if (!region.contains(x) || !region.contains(y)) continue;
    const int sx = basis.slot_of(x), sy = basis.slot_of(y);
    append_hop(basis, sx, sy, -J * multiplicity, t);
    append_hop(basis, sy, sx, -J * multiplicity, t);
  }
  return t;
}

std::vector<double> interaction_diagonal(const ModelParams& params, const Region& region,
                                         const FockBasis& basis) {
  const auto& members = basis.region().members();
  std::vector<std::size_t> slots;
  for (Vertex x : region) slots.push_back(static_cast<std::size_t>(basis.slot_of(x)));
  std::vector<double> diag(basis.dimension(), 0.0);
  for (std::size_t k = 0; k < basis.dimension(); ++k) {
    double e = 0.0;
    for (std::size_t a : slots) {
      const double na = basis.occupation(k, a);
      if (na == 0.0) continue;
      for (std::size_t b : slots) {
        const double vab = params.v(members[a], members[b]);
        if (vab == 0.0) continue;
        e += (a == b) ? vab * na * (na - 1.0) : vab * na * basis.occupation(k, b);
      }
    }
    diag[k] = e;
  }
  return diag;
}

void require_model_graph(const LatticeGraph& g, const ModelParams& params) {
  if (params.v.size() != g.size()) {
    throw InvalidArgument("model interaction table does not match the graph");
  }
}

}  // namespace

SparseOperator assemble_hopping(const LatticeGraph& g, const Region& region,
                                const FockBasis& basis, double J, double multiplicity) {
  if (region.graph_id() != g.id()) throw InvalidArgument("hopping: region from another graph");
  require_region_in_basis(region, basis, "hopping");
  auto t = hopping_triplets(g, region, basis, J, multiplicity);
  return SparseOperator::from_triplets(basis.id(), basis.dimension(), std::move(t))
      .set_support(region);
}

SparseOperator hop_term(const FockBasis& basis, Vertex x, Vertex y) {
  const int sx = require_slot(basis, x, "hop_term");
  const int sy = require_slot(basis, y, "hop_term");
  std::vector<Triplet> t;
  append_hop(basis, sx, sy, 1.0, t);
  return SparseOperator::from_triplets(basis.id(), basis.dimension(), std::move(t));
}

SparseOperator assemble_interaction(const ModelParams& params, const Region& region,
                                    const FockBasis& basis) {
  require_region_in_basis(region, basis, "interaction");
  for (Vertex x : region) {
    for (Vertex y : region) {
      if (params.v(x, y) != params.v(y, x)) throw InvalidArgument("interaction is not symmetric");
    }
  }
  const auto diag = interaction_diagonal(params, region, basis);
  return SparseOperator::diagonal(basis, diag).set_support(region);
}

SparseOperator assemble_hamiltonian(const LatticeGraph& g, const Region& region,
                                    const FockBasis& basis, const ModelParams& params) {
  require_model_graph(g, params);
  params.v.validate(g);
  if (region.graph_id() != g.id()) throw InvalidArgument("hamiltonian: region from another graph");
  require_region_in_basis(region, basis, "hamiltonian");
  auto t = hopping_triplets(g, region, basis, params.J, params.hopping_multiplicity);
  const auto diag = interaction_diagonal(params, region, basis);
  for (std::size_t k = 0; k < diag.size(); ++k) t.push_back({k, k, diag[k]});
  return SparseOperator::from_triplets(basis.id(), basis.dimension(), std::move(t))
      .set_support(region);
}

SparseOperator number_operator(const FockBasis& basis, Vertex x) {
  const auto slot = static_cast<std::size_t>(require_slot(basis, x, "number_operator"));
  std::vector<double> d(basis.dimension());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = basis.occupation(k, slot);
  return SparseOperator::diagonal(basis, d).set_support(basis.region().subregion({x}));
}

SparseOperator number_moment(const FockBasis& basis, Vertex x, double p) {
  if (p < 1.0) throw InvalidArgument("moment exponent must be >= 1");
  const auto slot = static_cast<std::size_t>(require_slot(basis, x, "number_moment"));
  std::vector<double> d(basis.dimension());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = std::pow(1.0 + basis.occupation(k, slot), p);
  return SparseOperator::diagonal(basis, d).set_support(basis.region().subregion({x}));
}

SparseOperator region_number_function(const FockBasis& basis, const Region& X,
                                      const std::function<double(int)>& f) {
  require_region_in_basis(X, basis, "region_number_function");
  std::vector<std::size_t> slots;
  for (Vertex x : X) slots.push_back(static_cast<std::size_t>(basis.slot_of(x)));
  std::vector<double> d(basis.dimension());
  for (std::size_t k = 0; k < d.size(); ++k) {
    int n = 0;
    for (std::size_t s : slots) n += basis.occupation(k, s);
    d[k] = f(n);
  }
  return SparseOperator::diagonal(basis, d).set_support(X);
}

SparseOperator total_number(const FockBasis& basis) {
  std::vector<double> d(basis.dimension());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = basis.total(k);
  return SparseOperator::diagonal(basis, d);
}

SparseOperator cutoff_projection(const FockBasis& basis, const Region& Y, int lambda) {
  require_region_in_basis(Y, basis, "cutoff_projection");
  if (lambda < 0) throw InvalidArgument("cutoff level must be nonnegative");
  std::vector<std::size_t> slots;
  for (Vertex y : Y) slots.push_back(static_cast<std::size_t>(basis.slot_of(y)));
  std::vector<double> d(basis.dimension(), 1.0);
  for (std::size_t k = 0; k < d.size(); ++k) {
    for (std::size_t s : slots) {
      if (basis.occupation(k, s) > lambda) {
        d[k] = 0.0;
        break;
      }
    }
  }
  return SparseOperator::diagonal(basis, d).set_support(Y);
}

SparseOperator sandwich(const SparseOperator& P, const SparseOperator& H) {
  require_same_basis(P, H, "sandwich");
  if (!P.is_diagonal()) throw InvalidArgument("sandwich: P must be diagonal");
  std::vector<double> keep(P.dim(), 0.0);
  for (std::size_t i = 0; i < P.dim(); ++i) {
    const cplx v = P.entry(i, i);
    if (v != 0.0 && v != 1.0) throw InvalidArgument("sandwich: P must be a 0/1 projection");
    keep[i] = v.real();
  }
  std::vector<Triplet> t;
  t.reserve(H.nnz());
  for (std::size_t i = 0; i < H.dim(); ++i) {
    if (keep[i] == 0.0) continue;
    for (std::size_t p = H.row_ptr()[i]; p < H.row_ptr()[i + 1]; ++p) {
      if (keep[H.cols()[p]] != 0.0) t.push_back({i, H.cols()[p], H.values()[p]});
    }
  }
  auto out = SparseOperator::from_triplets(H.basis_id(), H.dim(), std::move(t));
  if (H.support()) out.set_support(*H.support());
  return out;
}

SparseOperator commutator(const SparseOperator& A, const SparseOperator& B) {
  require_same_basis(A, B, "commutator");
  return multiply(A, B) - multiply(B, A);
}

double operator_norm_power(const SparseOperator& A, const NormOptions& opts) {
  const std::size_t n = A.dim();
  if (n == 0 || A.nnz() == 0) return 0.0;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  std::vector<cplx> v(n), w(n), u(n);
  for (auto& c : v) c = {gauss(rng), gauss(rng)};
  double nv = kernels::norm(v);
  for (auto& c : v) c /= nv;

  double estimate = 0.0;
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    A.apply(v, u);
    A.apply_adjoint(u, w);
    // Rayleigh quotient <v, A^dagger A v> = ||A v||^2 with ||v|| = 1. Stopping
    // on the residual ||A^dagger A v - theta v|| <= tol theta pins theta to an
    // eigenvalue within relative tol, which a small change between iterates
    // does not when the top singular values are close.
    const double theta = kernels::dot(u, u).real();
    estimate = theta;
    if (theta == 0.0) return 0.0;
    double res2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) res2 += std::norm(w[i] - theta * v[i]);
    if (std::sqrt(res2) <= opts.tol * theta) return std::sqrt(theta);
    const double nw = kernels::norm(w);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
  }
  std::ostringstream msg;
  msg << "power iteration for the operator norm did not converge in " << opts.max_iterations
      << " steps (dimension " << n << ", last estimate " << std::sqrt(estimate) << ")";
  throw NumericalFailure(msg.str());
}

double operator_norm(const SparseOperator& A, const NormOptions& opts) {
  if (A.dim() == 0 || A.nnz() == 0) return 0.0;
  if (A.is_diagonal()) return A.max_abs();
  if (A.dim() <= opts.dense_limit) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A.to_dense());
    return svd.singularValues()(0);
  }
  return operator_norm_power(A, opts);
}

NumberFunction inverse_number(Vertex x) {
  return {{x}, [](std::span<const int> n) { return 1.0 / (1.0 + n[0]); },
          "1/(1+N_" + std::to_string(x) + ")"};
}

NumberFunction tabulated_function(Vertex x, std::vector<double> table) {
  if (table.empty()) throw InvalidArgument("tabulated function needs at least one value");
  return {{x},
          [table](std::span<const int> n) {
            return table[std::min(static_cast<std::size_t>(n[0]), table.size() - 1)];
          },
          "f(N_" + std::to_string(x) + ")"};
}

std::string describe(const ObservableSpec& spec) {
  struct Visitor {
    std::string operator()(const IdentityObservable&) const { return "1"; }
    std::string operator()(const NumberFunction& f) const { return f.label; }
    std::string operator()(const NormalizedHopping& h) const {
      return "hop(" + std::to_string(h.x) + "," + std::to_string(h.y) + ")";
    }
    std::string operator()(const NumberProjector& p) const {
      return "1[N_" + std::to_string(p.x) + "=" + std::to_string(p.k) + "]";
    }
  };
  return std::visit(Visitor{}, spec);
}

SparseOperator local_observable(const FockBasis& basis, const ObservableSpec& spec) {
  if (std::holds_alternative<IdentityObservable>(spec)) return SparseOperator::identity(basis);

  if (const auto* f = std::get_if<NumberFunction>(&spec)) {
    if (f->sites.empty() || !f->f) throw InvalidArgument("number function needs sites and f");
    std::vector<std::size_t> slots;
    for (Vertex x : f->sites) {
      slots.push_back(static_cast<std::size_t>(require_slot(basis, x, "local_observable")));
    }
    std::vector<int> occ(slots.size());
    std::vector<double> d(basis.dimension());
    for (std::size_t k = 0; k < d.size(); ++k) {
      for (std::size_t i = 0; i < slots.size(); ++i) occ[i] = basis.occupation(k, slots[i]);
      d[k] = f->f(occ);
    }
    return SparseOperator::diagonal(basis, d).set_support(basis.region().subregion(f->sites));
  }

  if (const auto* h = std::get_if<NormalizedHopping>(&spec)) {
    const int sx = require_slot(basis, h->x, "local_observable");
    const int sy = require_slot(basis, h->y, "local_observable");
    if (sx == sy) throw InvalidArgument("normalized hopping needs two distinct sites");
    const double c = basis.max_occupation();
    if (c == 0.0) return SparseOperator::zero(basis);
    const double scale = 1.0 / (2.0 * std::sqrt((c + 1.0) * c));
    std::vector<Triplet> t;
    append_hop(basis, sx, sy, scale, t);
    append_hop(basis, sy, sx, scale, t);
    return SparseOperator::from_triplets(basis.id(), basis.dimension(), std::move(t))
        .set_support(basis.region().subregion({h->x, h->y}));
  }

  const auto& proj = std::get<NumberProjector>(spec);
  const auto slot = static_cast<std::size_t>(require_slot(basis, proj.x, "local_observable"));
  std::vector<double> d(basis.dimension());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = basis.occupation(k, slot) == proj.k ? 1.0 : 0.0;
  return SparseOperator::diagonal(basis, d).set_support(basis.region().subregion({proj.x}));
}

}  // namespace bosonlr
