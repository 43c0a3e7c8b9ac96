#include "bosonlr/thermal.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include "bosonlr/errors.hpp"
#include "bosonlr/kernels.hpp"
#include "bosonlr/operators.hpp"

namespace bosonlr {

namespace {

double log_sum_exp(const std::vector<double>& xs) {
  double top = -std::numeric_limits<double>::infinity();
  for (double x : xs) top = std::max(top, x);
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - top);
  return top + std::log(acc);
}

void require_state_basis(const GibbsState& g, const SparseOperator& A, const char* what) {
  if (A.basis_id() != g.basis_id()) {
    throw InvalidArgument(std::string(what) + ": operator and state live on different bases");
  }
}

}  // namespace

std::vector<double> GibbsState::weights() const {
  std::vector<double> out;
  for (const auto& lw : log_weights_) {
    for (Eigen::Index j = 0; j < lw.size(); ++j) out.push_back(std::exp(lw(j)));
  }
  return out;
}

GibbsState gibbs_state(std::shared_ptr<const SpectralDecomposition> decomp, double beta,
                       double mu, const FockBasis& basis, const GibbsOptions& opts) {
  if (!decomp) throw InvalidArgument("gibbs_state: missing decomposition");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be positive");
  if (decomp->basis_id() != basis.id()) throw InvalidArgument("gibbs_state: basis mismatch");

  GibbsState g;
  g.decomp_ = decomp;
  g.beta_ = beta;
  g.mu_ = mu;
  const auto& sectors = decomp->sectors();
  if (sectors.empty()) throw InvalidArgument("gibbs_state: empty basis");
  g.n_max_ = sectors.back().n;

  std::vector<Eigen::VectorXd> raw(sectors.size());
  g.log_sector_z_.resize(sectors.size());
  for (std::size_t b = 0; b < sectors.size(); ++b) {
    const auto& s = sectors[b];
    raw[b] = (-beta * (s.energies.array() - mu * s.n)).matrix();
    g.log_sector_z_[b] =
        log_sum_exp(std::vector<double>(raw[b].data(), raw[b].data() + raw[b].size()));
  }
  g.log_z_ = log_sum_exp(g.log_sector_z_);

  g.tail_ = 0.0;
  if (!basis.is_complete() && !opts.basis_is_system) {
    if (sectors.size() < 2) {
      throw InvalidArgument("gibbs_state: tail estimate needs at least two sectors");
    }
    const double log_q = g.log_sector_z_.back() - g.log_sector_z_[sectors.size() - 2];
    if (log_q >= 0.0) {
      std::ostringstream msg;
      msg << "sector partition functions do not decay: z_" << g.n_max_ << " / z_"
          << sectors[sectors.size() - 2].n << " = " << std::exp(log_q)
          << " >= 1 (beta = " << beta << ", mu = " << mu << ")";
      throw DivergingPartitionFunction(msg.str());
    }
    const double q = std::exp(log_q);
    g.tail_ = std::exp(g.log_sector_z_.back() - g.log_z_) * q / (1.0 - q);
  }
  g.certified_ = g.tail_ < opts.tail_tolerance;

  g.log_weights_.resize(sectors.size());
  g.density_.resize(sectors.size());
  for (std::size_t b = 0; b < sectors.size(); ++b) {
    g.log_weights_[b] = (raw[b].array() - g.log_z_).matrix();
    const Eigen::VectorXd w = g.log_weights_[b].array().exp().matrix();
    const auto& V = sectors[b].vectors;
    g.density_[b] = V * w.cast<cplx>().asDiagonal() * V.adjoint();
  }
  return g;
}

cplx expectation(const GibbsState& g, const SparseOperator& A) {
  require_state_basis(g, A, "expectation");
  const auto& part = g.decomp().partition();
  const auto rp = A.row_ptr();
  const auto cols = A.cols();
  const auto vals = A.values();
  cplx acc = 0.0;
  for (std::size_t i = 0; i < A.dim(); ++i) {
    const std::size_t bi = part.block_of[i];
    const auto li = static_cast<Eigen::Index>(part.local_of[i]);
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      const std::size_t j = cols[k];
      if (part.block_of[j] != bi) continue;
      acc += vals[k] * g.density_block(bi)(static_cast<Eigen::Index>(part.local_of[j]), li);
    }
  }
  return acc;
}

cplx expectation(const GibbsState& g, const BlockMatrix& A) {
  if (A.partition().basis_id != g.basis_id()) {
    throw InvalidArgument("expectation: operator and state live on different bases");
  }
  cplx acc = 0.0;
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    acc += (g.density_block(b).cwiseProduct(A.block(b).transpose())).sum();
  }
  return acc;
}

double moment_sup(const GibbsState& g, const FockBasis& basis, double p) {
  double best = 0.0;
  for (Vertex x : basis.region()) {
    best = std::max(best, expectation(g, number_moment(basis, x, p)).real());
  }
  return best;
}

GreenFunction::GreenFunction(const GibbsState& g, const SparseOperator& A,
                             const SparseOperator& B)
    : beta_(g.beta()) {
  require_state_basis(g, A, "green_function");
  require_state_basis(g, B, "green_function");
  const auto& part = g.decomp().partition_ptr();
  const BlockMatrix ab = BlockMatrix::from_sparse(A, part);
  const BlockMatrix bb = BlockMatrix::from_sparse(B, part);
  for (std::size_t b = 0; b < ab.num_blocks(); ++b) {
    const auto& s = g.decomp().sectors()[b];
    energies_.push_back(s.energies);
    log_weights_.push_back(g.log_weights()[b]);
    a_.push_back(s.vectors.adjoint() * ab.block(b) * s.vectors);
    b_.push_back(s.vectors.adjoint() * bb.block(b) * s.vectors);
  }
}

cplx GreenFunction::operator()(cplx z) const {
  const double t = z.real();
  const double s = -z.imag();
  const double slack = 1e-12 * std::max(1.0, beta_);
  if (s < -slack || s > beta_ + slack) {
    std::ostringstream msg;
    msg << "z = " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag())
        << "i is outside the strip -" << beta_ << " <= Im z <= 0";
    throw InvalidArgument(msg.str());
  }
  cplx acc = 0.0;
  for (std::size_t b = 0; b < a_.size(); ++b) {
    PairSumInput in;
    in.dim = static_cast<std::size_t>(energies_[b].size());
    in.energies = {energies_[b].data(), in.dim};
    in.log_weights = {log_weights_[b].data(), in.dim};
    in.a = a_[b].data();
    in.b = b_[b].data();
    acc += kernels::pair_sum(in, t, std::clamp(s, 0.0, beta_));
  }
  return acc;
}

cplx green_function(const GibbsState& g, const SparseOperator& A, const SparseOperator& B,
                    cplx z) {
  return GreenFunction(g, A, B)(z);
}

cplx heisenberg_expectation(const GibbsState& g, const SparseOperator& A,
                            const SparseOperator& B, double t) {
  return GreenFunction(g, A, B)(cplx(t, 0.0));
}

KmsBoundary kms_boundary_direct(const GibbsState& g, const SparseOperator& H,
                                const SparseOperator& A, const SparseOperator& B, double t) {
  require_state_basis(g, H, "kms");
  require_state_basis(g, A, "kms");
  require_state_basis(g, B, "kms");
  const auto& decomp = g.decomp();
  struct Item {
    std::size_t b, j;
    double w;
  };
  std::vector<Item> items;
  for (std::size_t b = 0; b < decomp.sectors().size(); ++b) {
    for (Eigen::Index j = 0; j < g.log_weights()[b].size(); ++j) {
      const double w = std::exp(g.log_weights()[b](j));
      if (w > 0.0) items.push_back({b, static_cast<std::size_t>(j), w});
    }
  }
  const SparseOperator Bdag = B.adjoint();
  std::vector<cplx> fwd(items.size()), bwd(items.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < items.size(); ++i) {
    try {
      const StateVector psi = decomp.eigenvector(items[i].b, items[i].j);
      StateVector bpsi = psi, bdpsi = psi;
      B.apply(psi.amplitudes, bpsi.amplitudes);
      Bdag.apply(psi.amplitudes, bdpsi.amplitudes);
      const StateVector phi = evolve_krylov(H, psi, t);
      const StateVector chi = evolve_krylov(H, bpsi, t);
      const StateVector xi = evolve_krylov(H, bdpsi, t);
      // <psi, e^{iHt} A e^{-iHt} B psi> and <psi, B e^{iHt} A e^{-iHt} psi>
      fwd[i] = items[i].w * kernels::reference::dot(phi.amplitudes, A.apply(chi.amplitudes));
      bwd[i] = items[i].w * kernels::reference::dot(xi.amplitudes, A.apply(phi.amplitudes));
    } catch (...) {
#pragma omp critical(bosonlr_kms)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  KmsBoundary out{0.0, 0.0};
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.forward += fwd[i];
    out.backward += bwd[i];
  }
  return out;
}

KmsResidual kms_residual(const GibbsState& g, const SparseOperator& H, const SparseOperator& A,
                         const SparseOperator& B, double t) {
  const GreenFunction F(g, A, B);
  const KmsBoundary direct = kms_boundary_direct(g, H, A, B, t);
  return {std::abs(F(cplx(t, 0.0)) - direct.forward),
          std::abs(F(cplx(t, -g.beta())) - direct.backward)};
}

double invariance_residual(const GibbsState& g, const SparseOperator& H, const SparseOperator& A,
                           double t) {
  const SparseOperator one = SparseOperator::from_triplets(
      A.basis_id(), A.dim(), [&] {
        std::vector<Triplet> id;
        for (std::size_t i = 0; i < A.dim(); ++i) id.push_back({i, i, 1.0});
        return id;
      }());
  const cplx evolved = kms_boundary_direct(g, H, A, one, t).forward;
  return std::abs(evolved - expectation(g, A));
}

}  // namespace bosonlr
