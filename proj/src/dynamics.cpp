#include "bosonlr/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "bosonlr/errors.hpp"
#include "bosonlr/kernels.hpp"

namespace bosonlr {

StateVector StateVector::basis_state(const FockBasis& basis, std::size_t k) {
  if (k >= basis.dimension()) throw InvalidArgument("basis ordinal out of range");
  StateVector s = zero(basis);
  s.amplitudes[k] = 1.0;
  return s;
}

StateVector StateVector::zero(const FockBasis& basis) {
  return {basis.id(), std::vector<cplx>(basis.dimension(), 0.0)};
}

double StateVector::norm() const { return kernels::norm(amplitudes); }

SpectralDecomposition::SpectralDecomposition(std::shared_ptr<const SectorPartition> part,
                                             std::vector<SectorSpectrum> sectors, double h_norm)
    : part_(std::move(part)), sectors_(std::move(sectors)), h_norm_(h_norm) {
  if (!part_ || sectors_.size() != part_->num_blocks()) {
    throw InvalidArgument("spectral decomposition does not match its sector partition");
  }
}

std::vector<double> SpectralDecomposition::eigenvalues() const {
  std::vector<double> out;
  out.reserve(dim());
  for (const auto& s : sectors_) out.insert(out.end(), s.energies.begin(), s.energies.end());
  return out;
}

StateVector SpectralDecomposition::eigenvector(std::size_t b, std::size_t j) const {
  const auto& s = sectors_.at(b);
  StateVector v{basis_id(), std::vector<cplx>(dim(), 0.0)};
  for (std::size_t i = 0; i < s.indices.size(); ++i) {
    v.amplitudes[s.indices[i]] =
        s.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return v;
}

double SpectralDecomposition::max_residual(const SparseOperator& H) const {
  if (H.basis_id() != basis_id()) throw InvalidArgument("operator from another basis");
  double worst = 0.0;
  std::vector<cplx> hv(dim());
  for (std::size_t b = 0; b < sectors_.size(); ++b) {
    for (Eigen::Index j = 0; j < sectors_[b].energies.size(); ++j) {
      const StateVector v = eigenvector(b, static_cast<std::size_t>(j));
      H.apply(v.amplitudes, hv);
      kernels::axpy(-sectors_[b].energies(j), v.amplitudes, hv);
      worst = std::max(worst, kernels::norm(hv));
    }
  }
  return worst;
}

namespace {

void fix_phases(Eigen::MatrixXcd& vecs) {
  for (Eigen::Index j = 0; j < vecs.cols(); ++j) {
    for (Eigen::Index i = 0; i < vecs.rows(); ++i) {
      const double a = std::abs(vecs(i, j));
      if (a > 1e-12) {
        vecs.col(j) *= std::conj(vecs(i, j)) / a;
        vecs(i, j) = a;
        break;
      }
    }
  }
}

void require_basis(const SparseOperator& H, const StateVector& psi) {
  if (H.basis_id() != psi.basis_id || H.dim() != psi.size()) {
    throw InvalidArgument("state and operator live on different bases");
  }
}

}  // namespace

SpectralDecomposition eigendecompose(const SparseOperator& H, const FockBasis& basis) {
  if (H.basis_id() != basis.id()) throw InvalidArgument("eigendecompose: basis mismatch");
  if (!H.is_hermitian()) throw InvalidArgument("eigendecompose: operator is not Hermitian");
  if (!H.conserves_number(basis)) {
    throw InvalidArgument("eigendecompose: operator does not conserve the particle number");
  }
  auto part = sector_partition(basis);
  if (part->largest_block() > SpectralDecomposition::kDenseCap) {
    std::ostringstream msg;
    msg << "sector of dimension " << part->largest_block() << " exceeds the dense cap of "
        << SpectralDecomposition::kDenseCap << "; use the Krylov engine";
    throw ResourceLimit(msg.str());
  }
  bool real = true;
  for (const cplx& v : H.values()) {
    if (v.imag() != 0.0) {
      real = false;
      break;
    }
  }

  std::vector<SectorSpectrum> sectors(part->num_blocks());
  double h_norm = 0.0;
  for (std::size_t b = 0; b < part->num_blocks(); ++b) {
    auto& s = sectors[b];
    s.n = part->sectors[b];
    s.indices = part->indices[b];
    const Eigen::MatrixXcd dense = H.block(s.indices);
    if (real) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense.real());
      if (es.info() != Eigen::Success) throw NumericalFailure("dense eigensolver failed");
      s.energies = es.eigenvalues();
      s.vectors = es.eigenvectors().cast<cplx>();
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
      if (es.info() != Eigen::Success) throw NumericalFailure("dense eigensolver failed");
      s.energies = es.eigenvalues();
      s.vectors = es.eigenvectors();
    }
    fix_phases(s.vectors);
    if (s.energies.size() > 0) h_norm = std::max(h_norm, s.energies.cwiseAbs().maxCoeff());
  }
  return SpectralDecomposition(std::move(part), std::move(sectors), h_norm);
}

StateVector evolve_krylov(const SparseOperator& H, const StateVector& psi, double t,
                          const KrylovOptions& opts, KrylovStats* stats) {
  require_basis(H, psi);
  if (opts.subspace < 2) throw InvalidArgument("Krylov subspace must be >= 2");
  KrylovStats local;
  StateVector cur = psi;
  const std::size_t n = psi.size();
  const double total = std::abs(t);
  const double sign = t < 0 ? -1.0 : 1.0;
  double remaining = total;
  double tau = total;

  std::vector<std::vector<cplx>> V;
  std::vector<cplx> w(n);
  while (remaining > 0.0) {
    const double nrm = cur.norm();
    if (nrm == 0.0) break;

    // Lanczos with two rounds of full reorthogonalization.
    V.assign(1, cur.amplitudes);
    for (auto& c : V[0]) c /= nrm;
    std::vector<double> alpha, beta;
    bool invariant = false;
    for (int j = 0; j < opts.subspace; ++j) {
      const auto& vj = V.back();
      H.apply(vj, w);
      alpha.push_back(kernels::dot(vj, w).real());
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& v : V) kernels::axpy(-kernels::dot(v, w), v, w);
      }
      const double b = kernels::norm(w);
      if (b <= 1e-13 * std::max(1.0, H.max_abs())) {
        invariant = true;
        break;
      }
      beta.push_back(b);
      if (j + 1 == opts.subspace) break;
      V.emplace_back(w);
      for (auto& c : V.back()) c /= b;
    }
    const auto k = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      T(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const Eigen::VectorXd& theta = es.eigenvalues();
    const Eigen::MatrixXd& S = es.eigenvectors();
    const double beta_k = invariant ? 0.0 : beta.back();

    tau = std::min(tau, remaining);
    Eigen::VectorXcd c(k);
    double err = 0.0;
    for (int h = 0;; ++h) {
      for (Eigen::Index i = 0; i < k; ++i) {
        cplx acc = 0.0;
        for (Eigen::Index q = 0; q < k; ++q) {
          acc += S(i, q) * std::exp(cplx(0.0, -sign * tau * theta(q))) * S(0, q);
        }
        c(i) = acc;
      }
      err = beta_k * std::abs(c(k - 1)) * nrm;
      if (err <= opts.tol * tau / total) break;
      if (h >= opts.max_halvings) {
        std::ostringstream msg;
        msg << "Krylov propagation failed to converge: local error " << err << " at step "
            << tau << " after " << h << " halvings (t = " << t << ", dimension " << n
            << ", subspace " << opts.subspace << ")";
        throw NumericalFailure(msg.str());
      }
      tau /= 2.0;
      ++local.halvings;
    }

    std::fill(cur.amplitudes.begin(), cur.amplitudes.end(), cplx(0.0));
    for (Eigen::Index i = 0; i < k; ++i) {
      kernels::axpy(nrm * c(i), V[static_cast<std::size_t>(i)], cur.amplitudes);
    }
    remaining -= tau;
    if (remaining < 1e-15 * total) remaining = 0.0;
    local.error_estimate += err;
    ++local.steps;
  }
  if (stats) *stats = local;
  return cur;
}

StateVector evolve_dense(const SpectralDecomposition& decomp, const StateVector& psi, double t) {
  if (psi.basis_id != decomp.basis_id() || psi.size() != decomp.dim()) {
    throw InvalidArgument("state and decomposition live on different bases");
  }
  StateVector out{psi.basis_id, std::vector<cplx>(psi.size(), 0.0)};
  for (const auto& s : decomp.sectors()) {
    const auto m = static_cast<Eigen::Index>(s.indices.size());
    Eigen::VectorXcd local(m);
    for (Eigen::Index i = 0; i < m; ++i) local(i) = psi.amplitudes[s.indices[static_cast<std::size_t>(i)]];
    Eigen::VectorXcd c = s.vectors.adjoint() * local;
    for (Eigen::Index j = 0; j < m; ++j) c(j) *= std::exp(cplx(0.0, -t * s.energies(j)));
    local = s.vectors * c;
    for (Eigen::Index i = 0; i < m; ++i) out.amplitudes[s.indices[static_cast<std::size_t>(i)]] = local(i);
  }
  return out;
}

StateVector evolve_state(const SparseOperator& H, const StateVector& psi, double t,
                         const SpectralDecomposition* decomp, const KrylovOptions& opts) {
  require_basis(H, psi);
  if (t == 0.0) return psi;
  if (decomp) {
    if (decomp->basis_id() != H.basis_id()) {
      throw InvalidArgument("decomposition belongs to another basis");
    }
    return evolve_dense(*decomp, psi, t);
  }
  return evolve_krylov(H, psi, t, opts);
}

BlockMatrix heisenberg_operator(const SpectralDecomposition& decomp, const BlockMatrix& A,
                                double t) {
  if (A.partition().basis_id != decomp.basis_id()) {
    throw InvalidArgument("observable and decomposition live on different bases");
  }
  std::vector<Eigen::MatrixXcd> blocks(decomp.sectors().size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& s = decomp.sectors()[b];
    Eigen::MatrixXcd rot = s.vectors.adjoint() * A.block(b) * s.vectors;
    for (Eigen::Index k = 0; k < rot.cols(); ++k) {
      for (Eigen::Index j = 0; j < rot.rows(); ++j) {
        rot(j, k) *= std::exp(cplx(0.0, (s.energies(j) - s.energies(k)) * t));
      }
    }
    blocks[b] = s.vectors * rot * s.vectors.adjoint();
  }
  return BlockMatrix(decomp.partition_ptr(), std::move(blocks));
}

BlockMatrix heisenberg_operator(const SpectralDecomposition& decomp, const SparseOperator& A,
                                double t) {
  return heisenberg_operator(decomp, BlockMatrix::from_sparse(A, decomp.partition_ptr()), t);
}

cplx heisenberg_expectation(const SparseOperator& H, const SparseOperator& A,
                            const StateVector& psi, const SparseOperator* B, double t,
                            const SpectralDecomposition* decomp) {
  require_basis(H, psi);
  require_same_basis(H, A, "heisenberg_expectation");
  StateVector bpsi = psi;
  if (B) {
    require_same_basis(H, *B, "heisenberg_expectation");
    B->apply(psi.amplitudes, bpsi.amplitudes);
  }
  // <psi, e^{iHt} A e^{-iHt} B psi> = <psi_t, A (B psi)_t>
  const StateVector left = evolve_state(H, psi, t, decomp);
  const StateVector right = evolve_state(H, bpsi, t, decomp);
  const std::vector<cplx> a_right = A.apply(right.amplitudes);
  return kernels::dot(left.amplitudes, a_right);
}

}  // namespace bosonlr
