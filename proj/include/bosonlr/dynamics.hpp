#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "bosonlr/block_matrix.hpp"
#include "bosonlr/fock.hpp"
#include "bosonlr/sparse_operator.hpp"

namespace bosonlr {

struct StateVector {
  std::uint64_t basis_id = 0;
  std::vector<cplx> amplitudes;

  static StateVector basis_state(const FockBasis& basis, std::size_t k);
  static StateVector zero(const FockBasis& basis);
  double norm() const;
  std::size_t size() const { return amplitudes.size(); }
};

/// Eigenpairs of one sector block. Columns of `vectors` are orthonormal
/// eigenvectors in the sector's local coordinates (ordinals `indices`).
struct SectorSpectrum {
  int n = 0;
  std::vector<std::size_t> indices;
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXcd vectors;
};

/// Sector-wise eigensystem of a number-conserving Hermitian operator.
/// Within a sector, eigenpairs are sorted by energy and each vector is
/// phased so its first component above 1e-12 in modulus is real positive.
class SpectralDecomposition {
 public:
  static constexpr std::size_t kDenseCap = 4096;

  SpectralDecomposition(std::shared_ptr<const SectorPartition> part,
                        std::vector<SectorSpectrum> sectors, double h_norm);

  std::uint64_t basis_id() const { return part_->basis_id; }
  std::size_t dim() const { return part_->dim; }
  const SectorPartition& partition() const { return *part_; }
  const std::shared_ptr<const SectorPartition>& partition_ptr() const { return part_; }
  const std::vector<SectorSpectrum>& sectors() const { return sectors_; }
  /// Operator norm of the decomposed operator (max |E|).
  double h_norm() const { return h_norm_; }

  /// All eigenvalues, sector-major.
  std::vector<double> eigenvalues() const;
  /// Eigenvector j of block b embedded in the full basis.
  StateVector eigenvector(std::size_t b, std::size_t j) const;

  /// Largest ||H v - E v|| over all eigenpairs.
  double max_residual(const SparseOperator& H) const;

 private:
  std::shared_ptr<const SectorPartition> part_;
  std::vector<SectorSpectrum> sectors_;
  double h_norm_ = 0.0;
};

/// Dense per-sector diagonalization. Throws InvalidArgument for a
/// non-Hermitian or number-violating H and ResourceLimit when a sector is
/// larger than kDenseCap.
SpectralDecomposition eigendecompose(const SparseOperator& H, const FockBasis& basis);

struct KrylovOptions {
  int subspace = 30;
  double tol = 1e-10;  // bound on the accumulated local error estimate
  int max_halvings = 40;
};

struct KrylovStats {
  int steps = 0;
  int halvings = 0;
  double error_estimate = 0.0;
};

/// e^{-iHt} psi by Lanczos with full reorthogonalization. The step is halved
/// until the local error estimate beta_k |[e^{-i tau T}]_{k,0}| fits the
/// remaining budget tol * tau / |t|.
StateVector evolve_krylov(const SparseOperator& H, const StateVector& psi, double t,
                          const KrylovOptions& opts = {}, KrylovStats* stats = nullptr);

/// e^{-iHt} psi by spectral propagation.
StateVector evolve_dense(const SpectralDecomposition& decomp, const StateVector& psi, double t);

/// Dispatches to the dense engine when `decomp` is supplied, else Krylov.
StateVector evolve_state(const SparseOperator& H, const StateVector& psi, double t,
                         const SpectralDecomposition* decomp = nullptr,
                         const KrylovOptions& opts = {});

/// tau_t(A) = e^{iHt} A e^{-iHt} as a dense block matrix.
BlockMatrix heisenberg_operator(const SpectralDecomposition& decomp, const SparseOperator& A,
                                double t);
BlockMatrix heisenberg_operator(const SpectralDecomposition& decomp, const BlockMatrix& A,
                                double t);

/// <psi, tau_t(A) B psi> without forming tau_t(A). B defaults to identity.
cplx heisenberg_expectation(const SparseOperator& H, const SparseOperator& A,
                            const StateVector& psi, const SparseOperator* B, double t,
                            const SpectralDecomposition* decomp = nullptr);

}  // namespace bosonlr
