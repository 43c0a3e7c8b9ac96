#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bosonlr/fock.hpp"
#include "bosonlr/lattice.hpp"
#include "bosonlr/sparse_operator.hpp"

namespace bosonlr {

/// Pair interaction v(x, y) over the vertices of one graph, zero at
/// distance >= range.
class InteractionTable {
 public:
  InteractionTable() = default;
  InteractionTable(std::size_t num_vertices, std::vector<double> values, int range);

  double operator()(Vertex x, Vertex y) const {
    return values_[static_cast<std::size_t>(x) * n_ + static_cast<std::size_t>(y)];
  }
  std::size_t size() const { return n_; }
  int range() const { return range_; }
  double sup_norm() const;

  /// Throws InvalidArgument if v is asymmetric, nonzero at distance >= range,
  /// or sized for a different graph.
  void validate(const LatticeGraph& g) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
  int range_ = 1;
};

/// Hamiltonian parameters (energy unit: the hopping amplitude).
///
/// Conventions:
///  * hopping sums each unordered edge once; hopping_multiplicity = 2
///    recovers the ordered-pair double count.
///  * interaction sums ordered pairs: off-diagonal v(x,y) enters as
///    v(x,y) n_x n_y for both (x,y) and (y,x); on-site as v(x,x) n_x (n_x - 1).
struct ModelParams {
  double J = 1.0;
  double hopping_multiplicity = 1.0;
  double U = 0.0;
  double mu = 0.0;
  InteractionTable v;

  int range() const { return v.range(); }
};

/// On-site only model: v(x,x) = U, range 1.
ModelParams bose_hubbard(const LatticeGraph& g, double J, double U, double mu);

/// v(x,x) = U and v(x,y) = profile[d(x,y) - 1] for 1 <= d(x,y) <= profile.size();
/// range = profile.size() + 1.
ModelParams with_interaction_profile(const LatticeGraph& g, double J, double U,
                                     std::span<const double> profile, double mu);

/// -J m sum_{edges {x,y} in region} (a_x^* a_y + a_y^* a_x), m the
/// multiplicity. Moves that leave the basis (cap exceeded) are dropped.
SparseOperator assemble_hopping(const LatticeGraph& g, const Region& region,
                                const FockBasis& basis, double J,
                                double multiplicity = 1.0);

/// Raw a_x^* a_y (not Hermitian), same hard-wall truncation.
SparseOperator hop_term(const FockBasis& basis, Vertex x, Vertex y);

SparseOperator assemble_interaction(const ModelParams& params, const Region& region,
                                    const FockBasis& basis);

/// H = T + V restricted to `region` (which may be smaller than the basis
/// region; sites outside it are frozen).
SparseOperator assemble_hamiltonian(const LatticeGraph& g, const Region& region,
                                    const FockBasis& basis, const ModelParams& params);

SparseOperator number_operator(const FockBasis& basis, Vertex x);
/// Diagonal (1 + N_x)^p.
SparseOperator number_moment(const FockBasis& basis, Vertex x, double p);
/// Diagonal f(N_X) with N_X the particle number inside X.
SparseOperator region_number_function(const FockBasis& basis, const Region& X,
                                      const std::function<double(int)>& f);
/// Total number operator on the basis region.
SparseOperator total_number(const FockBasis& basis);

/// prod_{x in Y} 1[N_x <= lambda].
SparseOperator cutoff_projection(const FockBasis& basis, const Region& Y, int lambda);

/// P H P for a diagonal 0/1 projection P.
SparseOperator sandwich(const SparseOperator& P, const SparseOperator& H);

SparseOperator commutator(const SparseOperator& A, const SparseOperator& B);

struct NormOptions {
  double tol = 1e-8;
  std::uint64_t seed = 0x5eed;
  std::size_t dense_limit = 1024;
  std::size_t max_iterations = 10'000;
};

/// Largest singular value. Dense SVD up to opts.dense_limit, otherwise power
/// iteration on A^dagger A (NumericalFailure after max_iterations).
double operator_norm(const SparseOperator& A, const NormOptions& opts = {});
/// Power-iteration path regardless of size.
double operator_norm_power(const SparseOperator& A, const NormOptions& opts = {});

// Gauge-invariant bounded observables.

struct IdentityObservable {};

/// Bounded f of the occupations of `sites` (argument order = sites order).
struct NumberFunction {
  std::vector<Vertex> sites;
  std::function<double(std::span<const int>)> f;
  std::string label;
};

/// (a_x^* a_y + a_y^* a_x) / (2 sqrt((c+1) c)), c = basis max occupation.
struct NormalizedHopping {
  Vertex x;
  Vertex y;
};

/// 1[N_x = k].
struct NumberProjector {
  Vertex x;
  int k;
};

using ObservableSpec =
    std::variant<IdentityObservable, NumberFunction, NormalizedHopping, NumberProjector>;

/// f(N_x) = 1 / (1 + N_x).
NumberFunction inverse_number(Vertex x);
/// f(N_x) = table[min(N_x, table.size() - 1)].
NumberFunction tabulated_function(Vertex x, std::vector<double> table);

std::string describe(const ObservableSpec& spec);

/// Throws InvalidArgument for sites outside the basis region.
SparseOperator local_observable(const FockBasis& basis, const ObservableSpec& spec);

}  // namespace bosonlr
