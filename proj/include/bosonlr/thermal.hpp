#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "bosonlr/block_matrix.hpp"
#include "bosonlr/dynamics.hpp"
#include "bosonlr/fock.hpp"
#include "bosonlr/sparse_operator.hpp"

namespace bosonlr {

struct GibbsOptions {
  /// A state whose tail estimate exceeds this is flagged uncertified.
  double tail_tolerance = 1e-10;
  /// The truncated basis is the system itself (e.g. a hard-wall capped
  /// model); no sectors are missing and the tail is 0.
  bool basis_is_system = false;
};

/// Grand-canonical (or, on a fixed-sector basis, canonical) Gibbs state
/// e^{-beta (H - mu N)} / Z over the sectors 0..N_max of a decomposition.
///
/// Weights live in log space: log_weights[b][j] = -beta (E_j - mu n_b) - log Z.
class GibbsState {
 public:
  std::shared_ptr<const SpectralDecomposition> decomposition() const { return decomp_; }
  const SpectralDecomposition& decomp() const { return *decomp_; }
  std::uint64_t basis_id() const { return decomp_->basis_id(); }
  double beta() const { return beta_; }
  double mu() const { return mu_; }
  int n_max() const { return n_max_; }
  double log_z() const { return log_z_; }
  /// log z_n per block, z_n = sum over sector n of e^{-beta (E_j - mu n)}.
  const std::vector<double>& log_sector_z() const { return log_sector_z_; }
  /// Certified bound on the neglected weight relative to Z (0 for complete bases).
  double tail_estimate() const { return tail_; }
  bool certified() const { return certified_; }

  const std::vector<Eigen::VectorXd>& log_weights() const { return log_weights_; }
  /// Normalized weights, sector-major (sums to 1).
  std::vector<double> weights() const;
  /// rho restricted to block b in the local Fock coordinates.
  const Eigen::MatrixXcd& density_block(std::size_t b) const { return density_[b]; }

 private:
  friend GibbsState gibbs_state(std::shared_ptr<const SpectralDecomposition>, double, double,
                                const FockBasis&, const GibbsOptions&);

  std::shared_ptr<const SpectralDecomposition> decomp_;
  double beta_ = 1.0;
  double mu_ = 0.0;
  int n_max_ = 0;
  double log_z_ = 0.0;
  std::vector<double> log_sector_z_;
  double tail_ = 0.0;
  bool certified_ = true;
  std::vector<Eigen::VectorXd> log_weights_;
  std::vector<Eigen::MatrixXcd> density_;
};

/// Builds the state over every sector present in the decomposition
/// (N_max = largest sector). The tail estimate z_N q / (1 - q) / Z with
/// q = z_N / z_{N-1} bounds the missing sectors on a basis truncated by
/// max_total; it is 0 when the basis is complete. Throws
/// DivergingPartitionFunction when q >= 1 on a truncated basis.
GibbsState gibbs_state(std::shared_ptr<const SpectralDecomposition> decomp, double beta,
                       double mu, const FockBasis& basis, const GibbsOptions& opts = {});

/// Tr(rho A).
cplx expectation(const GibbsState& g, const SparseOperator& A);
cplx expectation(const GibbsState& g, const BlockMatrix& A);

/// max over sites x of the basis region of gamma((1 + N_x)^p).
double moment_sup(const GibbsState& g, const FockBasis& basis, double p);

/// gamma(tau_t(A) B) by the eigenbasis phase sum.
cplx heisenberg_expectation(const GibbsState& g, const SparseOperator& A,
                            const SparseOperator& B, double t);

/// F(z) on the strip -beta <= Im z <= 0, from A and B rotated once into the
/// eigenbasis.
class GreenFunction {
 public:
  GreenFunction(const GibbsState& g, const SparseOperator& A, const SparseOperator& B);

  /// Throws InvalidArgument outside the strip.
  cplx operator()(cplx z) const;
  double beta() const { return beta_; }

 private:
  double beta_;
  std::vector<Eigen::VectorXd> energies_;
  std::vector<Eigen::VectorXd> log_weights_;
  std::vector<Eigen::MatrixXcd> a_, b_;
};

cplx green_function(const GibbsState& g, const SparseOperator& A, const SparseOperator& B,
                    cplx z);

/// Boundary values computed without the spectral phase sum: every eigenvector
/// is propagated by the Krylov engine.
struct KmsBoundary {
  cplx forward;   // gamma(tau_t(A) B)
  cplx backward;  // gamma(B tau_t(A))
};
KmsBoundary kms_boundary_direct(const GibbsState& g, const SparseOperator& H,
                                const SparseOperator& A, const SparseOperator& B, double t);

struct KmsResidual {
  double forward;   // |F(t) - gamma(tau_t(A) B)|
  double backward;  // |F(t - i beta) - gamma(B tau_t(A))|
};
KmsResidual kms_residual(const GibbsState& g, const SparseOperator& H, const SparseOperator& A,
                         const SparseOperator& B, double t);

/// |gamma(tau_t(A)) - gamma(A)|, with tau_t(A) evaluated on Krylov-propagated
/// eigenvectors.
double invariance_residual(const GibbsState& g, const SparseOperator& H,
                           const SparseOperator& A, double t);

}  // namespace bosonlr
