#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "bosonlr/errors.hpp"
#include "bosonlr/operators.hpp"
#include "bosonlr/thermal.hpp"

using namespace bosonlr;

namespace {

struct Model {
  LatticeGraph g;
  Region lambda;
  std::shared_ptr<const FockBasis> basis;
  SparseOperator H;
  std::shared_ptr<const SpectralDecomposition> decomp;
};

Model make(std::size_t n, BasisSpec spec, double J, double U) {
  LatticeGraph g = build_chain(n);
  Region r = Region::whole(g);
  auto b = std::make_shared<const FockBasis>(r, spec);
  SparseOperator H = assemble_hamiltonian(g, r, *b, bose_hubbard(g, J, U, 0.0));
  auto d = std::make_shared<const SpectralDecomposition>(eigendecompose(H, *b));
  return {std::move(g), std::move(r), std::move(b), std::move(H), std::move(d)};
}

// Full-matrix oracle: rho = exp(-beta (H - mu N)) / Z from one dense
// eigensolve of the whole (unblocked) matrix.
Eigen::MatrixXcd dense_rho(const Model& m, double beta, double mu) {
  const Eigen::MatrixXcd K = m.H.to_dense() - mu * total_number(*m.basis).to_dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(K);
  const double e0 = es.eigenvalues().minCoeff();
  const Eigen::VectorXd w = (-beta * (es.eigenvalues().array() - e0)).exp();
  Eigen::MatrixXcd rho = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  return rho / rho.trace();
}

Eigen::MatrixXcd propagator(const Model& m, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.H.to_dense());
  const Eigen::VectorXcd ph = es.eigenvalues().unaryExpr([&](double e) { return std::exp(cplx(0, -e * t)); });
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

std::vector<ObservableSpec> observables(Vertex a, Vertex b) {
  return {IdentityObservable{}, inverse_number(a), NormalizedHopping{a, b}, NumberProjector{a, 1},
          tabulated_function(b, {0.3, -0.7, 1.0})};
}

}  // namespace

TEST_CASE("weights are a probability distribution") {
  const Model m = make(3, {std::nullopt, 4, std::nullopt}, 1.0, 1.0);
  const GibbsState g = gibbs_state(m.decomp, 1.0, -1.0, *m.basis);
  double total = 0;
  for (double w : g.weights()) {
    CHECK(w >= 0.0);
    total += w;
  }
  CHECK(std::abs(total - 1.0) < 1e-12);
  CHECK(g.n_max() == 4);
}

TEST_CASE("single free site: geometric series") {
  const double beta = 1.0, mu = -1.0;
  const Model m = make(1, {std::nullopt, 12, std::nullopt}, 0.0, 0.0);
  const GibbsState g = gibbs_state(m.decomp, beta, mu, *m.basis);
  const double q = std::exp(beta * mu);
  double truncated = 0;
  for (int n = 0; n <= 12; ++n) truncated += std::exp(beta * mu * n);
  CHECK(g.log_z() == doctest::Approx(std::log(truncated)).epsilon(1e-14));
  // The ratio tail is exact for a geometric series.
  const double closed = 1.0 / (1.0 - q);
  CHECK(g.tail_estimate() == doctest::Approx((closed - truncated) / truncated).epsilon(1e-10));
  CHECK_FALSE(g.certified());

  // Mean occupation against the geometric distribution q / (1 - q).
  const Model wide = make(1, {std::nullopt, 40, std::nullopt}, 0.0, 0.0);
  const GibbsState gw = gibbs_state(wide.decomp, beta, mu, *wide.basis);
  CHECK(gw.certified());
  CHECK(expectation(gw, number_operator(*wide.basis, 0)).real() == doctest::Approx(q / (1 - q)).epsilon(1e-12));
  CHECK(moment_sup(gw, *wide.basis, 1.0) == doctest::Approx(1 + q / (1 - q)).epsilon(1e-12));
}

TEST_CASE("single interacting site: direct scalar sum") {
  const Model m = make(1, {std::nullopt, 10, std::nullopt}, 0.0, 1.0);
  const GibbsState g = gibbs_state(m.decomp, 1.0, 0.0, *m.basis);
  double z = 0;
  for (int n = 0; n <= 10; ++n) z += std::exp(-double(n) * (n - 1));
  CHECK(g.log_z() == doctest::Approx(std::log(z)).epsilon(1e-14));
  CHECK(g.tail_estimate() < 1e-30);
}

TEST_CASE("diverging partition function") {
  const Model m = make(1, {std::nullopt, 6, std::nullopt}, 0.0, 0.0);
  CHECK_THROWS_AS(gibbs_state(m.decomp, 1.0, 0.5, *m.basis), DivergingPartitionFunction);
  GibbsOptions system;
  system.basis_is_system = true;
  const GibbsState g = gibbs_state(m.decomp, 1.0, 0.5, *m.basis, system);
  CHECK(g.tail_estimate() == 0.0);
}

TEST_CASE("complete bases need no tail") {
  const Model capped = make(3, {std::nullopt, std::nullopt, 2}, 1.0, 1.0);
  CHECK(gibbs_state(capped.decomp, 1.0, 0.3, *capped.basis).tail_estimate() == 0.0);
  const Model sector = make(3, {2, std::nullopt, std::nullopt}, 1.0, 1.0);
  CHECK(gibbs_state(sector.decomp, 1.0, 0.3, *sector.basis).tail_estimate() == 0.0);
}

TEST_CASE("low temperature concentrates on the vacuum") {
  const Model m = make(3, {std::nullopt, 3, std::nullopt}, 1.0, 1.0);
  const GibbsState g = gibbs_state(m.decomp, 60.0, -3.0, *m.basis);
  CHECK(expectation(g, number_operator(*m.basis, 1)).real() < 1e-20);
  CHECK(moment_sup(g, *m.basis, 4.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("expectations against the full-matrix oracle") {
  const Model m = make(3, {std::nullopt, 5, std::nullopt}, 1.0, 0.8);
  const double beta = 0.7, mu = -0.9;
  const GibbsState g = gibbs_state(m.decomp, beta, mu, *m.basis);
  const Eigen::MatrixXcd rho = dense_rho(m, beta, mu);
  CHECK(std::abs(expectation(g, SparseOperator::identity(*m.basis)) - 1.0) < 1e-13);
  for (const auto& spec : observables(0, 1)) {
    const SparseOperator A = local_observable(*m.basis, spec);
    CHECK(std::abs(expectation(g, A) - (rho * A.to_dense()).trace()) < 1e-12);
  }
  // Sector weight from the projector onto N = 2.
  std::vector<double> diag(m.basis->dimension());
  for (std::size_t k = 0; k < diag.size(); ++k) diag[k] = m.basis->total(k) == 2 ? 1.0 : 0.0;
  const SparseOperator P2 = SparseOperator::diagonal(*m.basis, diag);
  const double w2 = std::exp(g.log_sector_z()[2] - g.log_z());
  CHECK(expectation(g, P2).real() == doctest::Approx(w2).epsilon(1e-12));
}

TEST_CASE("moment sup") {
  const Model m = make(7, {std::nullopt, 3, std::nullopt}, 1.0, 1.0);
  const GibbsState g = gibbs_state(m.decomp, 1.0, -3.0, *m.basis, {1.0});
  double prev = 0;
  for (double p : {1.0, 2.0, 4.0, 6.0}) {
    const double s = moment_sup(g, *m.basis, p);
    CHECK(s >= prev);
    prev = s;
  }
  double mean = 0;
  for (Vertex x = 0; x < 7; ++x) mean = std::max(mean, expectation(g, number_operator(*m.basis, x)).real());
  CHECK(moment_sup(g, *m.basis, 1.0) == doctest::Approx(1.0 + mean).epsilon(1e-12));
  // Mirror symmetry of the open chain: sites x and 6 - x agree.
  for (Vertex x = 0; x < 3; ++x)
    CHECK(std::abs(expectation(g, number_moment(*m.basis, x, 4)) - expectation(g, number_moment(*m.basis, 6 - x, 4))) < 1e-8);
}

TEST_CASE("green function boundary values") {
  const Model m = make(2, {std::nullopt, 6, std::nullopt}, 1.0, 1.0);
  const double beta = 1.0, mu = -1.0;
  const GibbsState g = gibbs_state(m.decomp, beta, mu, *m.basis, {1.0});
  const Eigen::MatrixXcd rho = dense_rho(m, beta, mu);
  const auto obs = observables(0, 1);
  for (const auto& a : obs) {
    for (const auto& b : obs) {
      const SparseOperator A = local_observable(*m.basis, a), B = local_observable(*m.basis, b);
      const GreenFunction F(g, A, B);
      for (double t : {0.0, 0.5, 1.0, -0.8}) {
        const Eigen::MatrixXcd U = propagator(m, t);
        const Eigen::MatrixXcd At = U.adjoint() * A.to_dense() * U;
        CHECK(std::abs(F(cplx(t, 0)) - (rho * At * B.to_dense()).trace()) < 1e-9);
        CHECK(std::abs(F(cplx(t, -beta)) - (rho * B.to_dense() * At).trace()) < 1e-9);
        CHECK(std::abs(F(cplx(t, 0)) - heisenberg_expectation(g, A, B, t)) < 1e-12);
        CHECK(std::abs(green_function(g, A, B, cplx(t, -0.3)) - F(cplx(t, -0.3))) == 0.0);
      }
    }
  }
  const SparseOperator I = SparseOperator::identity(*m.basis);
  const GreenFunction one(g, I, I);
  for (double re : {-1.0, 0.0, 2.0})
    for (double im : {0.0, -0.5, -1.0}) CHECK(std::abs(one(cplx(re, im)) - 1.0) < 1e-13);
  CHECK_THROWS_AS(one(cplx(0.0, 0.1)), InvalidArgument);
  CHECK_THROWS_AS(one(cplx(0.0, -1.2)), InvalidArgument);
}

TEST_CASE("maximum principle on the strip") {
  const Model m = make(2, {std::nullopt, 6, std::nullopt}, 1.0, 1.0);
  const GibbsState g = gibbs_state(m.decomp, 1.0, -1.0, *m.basis, {1.0});
  const auto obs = observables(0, 1);
  for (const auto& a : obs) {
    for (const auto& b : obs) {
      const SparseOperator A = local_observable(*m.basis, a), B = local_observable(*m.basis, b);
      const double scale = operator_norm(A) * operator_norm(B);
      const GreenFunction F(g, A, B);
      for (int u = 0; u < 11; ++u)
        for (int v = 0; v < 11; ++v) CHECK(std::abs(F(cplx(-2.0 + 0.4 * u, -0.1 * v))) <= scale * (1 + 1e-12));
    }
  }
}

TEST_CASE("kms residuals and invariance") {
  const Model m = make(2, {std::nullopt, 3, std::nullopt}, 1.0, 1.0);
  const GibbsState g = gibbs_state(m.decomp, 1.0, -1.0, *m.basis, {1.0});
  const SparseOperator I = SparseOperator::identity(*m.basis);
  const KmsResidual id = kms_residual(g, m.H, I, I, 0.7);
  CHECK(id.forward < 1e-14);
  CHECK(id.backward < 1e-14);
  CHECK(invariance_residual(g, m.H, I, 1.0) < 1e-14);

  const auto obs = observables(0, 1);
  for (const auto& a : obs) {
    const SparseOperator A = local_observable(*m.basis, a);
    for (const auto& b : obs) {
      const SparseOperator B = local_observable(*m.basis, b);
      for (double t : {0.0, 0.5, 1.0}) {
        const KmsResidual r = kms_residual(g, m.H, A, B, t);
        CHECK(r.forward < 1e-9);
        CHECK(r.backward < 1e-9);
      }
      // t = 0: F(-i beta) against gamma(B A).
      const GreenFunction F(g, A, B);
      CHECK(std::abs(F(cplx(0, -1.0)) - expectation(g, multiply(B, A))) < 1e-9);
    }
    for (double t : {0.3, 2.0}) CHECK(invariance_residual(g, m.H, A, t) < 1e-9);
  }
  CHECK(invariance_residual(g, m.H, local_observable(*m.basis, NumberProjector{0, 1}), 1.7) < 1e-9);
}

TEST_CASE("degenerate eigenspaces may be rotated freely") {
  // Free particles on a 4-cycle have degenerate one-particle levels.
  const std::vector<Edge> ring{{0, 1}, {1, 2}, {2, 3}, {0, 3}};
  const LatticeGraph g(4, ring, 1);
  const Region r = Region::whole(g);
  const FockBasis basis(r, {std::nullopt, 2, std::nullopt});
  const SparseOperator H = assemble_hamiltonian(g, r, basis, bose_hubbard(g, 1.0, 0.0, 0.0));
  auto d = std::make_shared<const SpectralDecomposition>(eigendecompose(H, basis));

  std::mt19937 rng(8);
  std::normal_distribution<double> gauss;
  std::vector<SectorSpectrum> rotated = d->sectors();
  for (SectorSpectrum& s : rotated) {
    Eigen::Index j = 0;
    while (j < s.energies.size()) {
      Eigen::Index k = j;
      while (k + 1 < s.energies.size() && std::abs(s.energies(k + 1) - s.energies(j)) < 1e-9) ++k;
      const Eigen::Index n = k - j + 1;
      if (n > 1) {
        Eigen::MatrixXcd X(n, n);
        for (Eigen::Index a = 0; a < n; ++a)
          for (Eigen::Index b = 0; b < n; ++b) X(a, b) = {gauss(rng), gauss(rng)};
        const Eigen::MatrixXcd Q = Eigen::HouseholderQR<Eigen::MatrixXcd>(X).householderQ();
        s.vectors.middleCols(j, n) = s.vectors.middleCols(j, n) * Q;
        const double e = s.energies.segment(j, n).mean();
        s.energies.segment(j, n).setConstant(e);
      }
      j = k + 1;
    }
  }
  auto d2 = std::make_shared<const SpectralDecomposition>(d->partition_ptr(), rotated, d->h_norm());
  const GibbsState a = gibbs_state(d, 1.0, -3.0, basis, {1.0});
  const GibbsState b = gibbs_state(d2, 1.0, -3.0, basis, {1.0});
  CHECK(a.log_z() == doctest::Approx(b.log_z()).epsilon(1e-12));
  const SparseOperator A = local_observable(basis, NormalizedHopping{0, 1});
  const SparseOperator B = local_observable(basis, inverse_number(2));
  CHECK(std::abs(expectation(a, A) - expectation(b, A)) < 1e-12);
  for (double t : {0.0, 0.9})
    CHECK(std::abs(GreenFunction(a, A, B)(cplx(t, -0.4)) - GreenFunction(b, A, B)(cplx(t, -0.4))) < 1e-12);
}
