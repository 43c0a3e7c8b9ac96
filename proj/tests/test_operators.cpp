#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "bosonlr/errors.hpp"
#include "bosonlr/operators.hpp"

using namespace bosonlr;

namespace {

struct Setup {
  LatticeGraph g;
  Region lambda;
  FockBasis basis;
};

Setup chain_setup(std::size_t n, BasisSpec spec) {
  LatticeGraph g = build_chain(n);
  Region r = Region::whole(g);
  FockBasis b(r, spec);
  return {std::move(g), std::move(r), std::move(b)};
}

std::size_t idx(const FockBasis& b, std::vector<Occupation> occ) { return b.index_of(occ); }

SparseOperator random_operator(const FockBasis& b, std::mt19937& rng) {
  std::normal_distribution<double> g;
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < b.dimension(); ++i)
    for (std::size_t j = 0; j < b.dimension(); ++j)
      if ((i * 7 + j * 3) % 4 == 0) t.push_back({i, j, {g(rng), g(rng)}});
  return SparseOperator::from_triplets(b.id(), b.dimension(), std::move(t));
}

}  // namespace

TEST_CASE("hopping examples") {
  const Setup s = chain_setup(2, {1, std::nullopt, std::nullopt});
  const SparseOperator T = assemble_hopping(s.g, s.lambda, s.basis, 1.0);
  Eigen::MatrixXcd expect(2, 2);
  expect << 0, -1, -1, 0;
  CHECK((T.to_dense() - expect).norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(T.to_dense());
  CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
  CHECK(es.eigenvalues()(1) == doctest::Approx(1.0));

  const Setup s2 = chain_setup(2, {2, std::nullopt, std::nullopt});
  const SparseOperator T2 = assemble_hopping(s2.g, s2.lambda, s2.basis, 1.0);
  CHECK(T2.entry(idx(s2.basis, {1, 1}), idx(s2.basis, {2, 0})) == cplx(-std::sqrt(2.0)));

  const Setup lone = chain_setup(3, {2, std::nullopt, std::nullopt});
  const Region no_edges(lone.g, {0, 2});
  CHECK(assemble_hopping(lone.g, no_edges, lone.basis, 1.0).nnz() == 0);

  const SparseOperator doubled = assemble_hopping(s.g, s.lambda, s.basis, 1.0, 2.0);
  CHECK(doubled.entry(0, 1) == cplx(-2.0));
}

TEST_CASE("hopping matrix elements follow the CCR") {
  const Setup s = chain_setup(3, {std::nullopt, 4, std::nullopt});
  for (Vertex x = 0; x < 3; ++x) {
    for (Vertex y = 0; y < 3; ++y) {
      if (x == y) continue;
      const SparseOperator xy = hop_term(s.basis, x, y);
      const SparseOperator yx = hop_term(s.basis, y, x);
      CHECK((xy.adjoint().to_dense() - yx.to_dense()).norm() == 0.0);
      for (std::size_t k = 0; k < s.basis.dimension(); ++k) {
        std::vector<Occupation> occ(s.basis.state(k).begin(), s.basis.state(k).end());
        const int nx = occ[static_cast<std::size_t>(x)], ny = occ[static_cast<std::size_t>(y)];
        if (ny == 0) continue;
        occ[static_cast<std::size_t>(x)]++;
        occ[static_cast<std::size_t>(y)]--;
        CHECK(xy.entry(s.basis.index_of(occ), k).real() == doctest::Approx(std::sqrt(double(ny) * (nx + 1))));
      }
    }
  }
}

TEST_CASE("hard-wall truncation drops moves above the cap") {
  const Setup s = chain_setup(2, {2, std::nullopt, 1});
  // Only (1,1) survives; hopping has nowhere to go.
  CHECK(s.basis.dimension() == 1);
  CHECK(assemble_hopping(s.g, s.lambda, s.basis, 1.0).nnz() == 0);
}

TEST_CASE("interaction examples") {
  {
    const Setup s = chain_setup(1, {2, std::nullopt, std::nullopt});
    const SparseOperator V = assemble_interaction(bose_hubbard(s.g, 1.0, 1.0, 0.0), s.lambda, s.basis);
    CHECK(V.entry(0, 0) == cplx(2.0));
  }
  {
    const Setup s = chain_setup(1, {3, std::nullopt, std::nullopt});
    const SparseOperator V = assemble_interaction(bose_hubbard(s.g, 1.0, 0.5, 0.0), s.lambda, s.basis);
    CHECK(V.entry(0, 0) == cplx(3.0));
  }
  {
    const Setup s = chain_setup(2, {2, std::nullopt, std::nullopt});
    const std::vector<double> profile{0.3};
    const ModelParams p = with_interaction_profile(s.g, 1.0, 0.0, profile, 0.0);
    CHECK(p.range() == 2);
    const SparseOperator V = assemble_interaction(p, s.lambda, s.basis);
    const std::size_t k = idx(s.basis, {1, 1});
    CHECK(V.entry(k, k).real() == doctest::Approx(0.6).epsilon(1e-15));
  }
}

TEST_CASE("interaction table validation") {
  const LatticeGraph g = build_chain(3);
  std::vector<double> asym(9, 0.0);
  asym[1] = 0.2;  // v(0,1) without v(1,0)
  CHECK_THROWS_AS(InteractionTable(3, asym, 2).validate(g), InvalidArgument);
  std::vector<double> far(9, 0.0);
  far[2] = far[6] = 0.1;  // distance 2 with range 2
  CHECK_THROWS_AS(InteractionTable(3, far, 2).validate(g), InvalidArgument);
  CHECK_THROWS_AS(InteractionTable(2, std::vector<double>(4, 0.0), 1).validate(g), InvalidArgument);
}

TEST_CASE("hamiltonian examples") {
  const Setup vac = chain_setup(3, {0, std::nullopt, std::nullopt});
  const SparseOperator H0 = assemble_hamiltonian(vac.g, vac.lambda, vac.basis, bose_hubbard(vac.g, 1, 1, 0));
  CHECK(H0.dim() == 1);
  CHECK(H0.nnz() == 0);

  const Setup one = chain_setup(4, {1, std::nullopt, std::nullopt});
  const double J = 0.7;
  const SparseOperator H1 = assemble_hamiltonian(one.g, one.lambda, one.basis, bose_hubbard(one.g, J, 3.0, 0));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      // basis state k has the particle at site k (descending order)
      const double adj = one.g.distance(static_cast<Vertex>(i), static_cast<Vertex>(j)) == 1 ? 1.0 : 0.0;
      CHECK(H1.entry(i, j) == cplx(-J * adj));
    }

  const Setup single = chain_setup(1, {2, std::nullopt, std::nullopt});
  const SparseOperator H2 =
      assemble_hamiltonian(single.g, single.lambda, single.basis, bose_hubbard(single.g, 5.0, 1.0, 0));
  CHECK(H2.entry(0, 0) == cplx(2.0));
}

TEST_CASE("hamiltonian structure") {
  const std::vector<std::size_t> dims{2, 3};
  const LatticeGraph g = build_grid(dims);
  const Region lambda = Region::whole(g);
  const FockBasis b(lambda, {std::nullopt, 4, 3});
  const std::vector<double> profile{0.25};
  const SparseOperator H = assemble_hamiltonian(g, lambda, b, with_interaction_profile(g, 1.0, 0.8, profile, 0));
  CHECK(H.is_hermitian());
  CHECK((H.to_dense() - H.to_dense().adjoint()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(H.conserves_number(b));
  CHECK(commutator(H, total_number(b)).nnz() == 0);
  CHECK(H.support().has_value());
  CHECK(*H.support() == lambda);
}

TEST_CASE("number operators and moments") {
  const Setup s = chain_setup(2, {std::nullopt, 3, std::nullopt});
  const std::size_t vac = idx(s.basis, {0, 0});
  CHECK(number_operator(s.basis, 0).entry(vac, vac) == cplx(0.0));
  CHECK(number_moment(s.basis, 0, 2.0).entry(vac, vac) == cplx(1.0));
  const std::size_t three = idx(s.basis, {3, 0});
  CHECK(number_operator(s.basis, 0).entry(three, three) == cplx(3.0));
  CHECK(number_moment(s.basis, 0, 2.0).entry(three, three) == cplx(16.0));
  const std::size_t two = idx(s.basis, {2, 1});
  CHECK(number_moment(s.basis, 0, 4.0).entry(two, two) == cplx(81.0));
  CHECK_THROWS_AS(number_operator(s.basis, 5), InvalidArgument);
  CHECK(commutator(number_operator(s.basis, 0), number_operator(s.basis, 1)).nnz() == 0);
}

TEST_CASE("cutoff projection") {
  const Setup s = chain_setup(3, {std::nullopt, std::nullopt, 2});
  CHECK((cutoff_projection(s.basis, s.lambda, 2).to_dense() -
         SparseOperator::identity(s.basis).to_dense()).norm() == 0.0);

  const Setup n2 = chain_setup(2, {2, std::nullopt, std::nullopt});
  const SparseOperator P0 = cutoff_projection(n2.basis, n2.lambda, 0);
  CHECK(P0.nnz() == 0);
  const SparseOperator P1 = cutoff_projection(n2.basis, n2.lambda, 1);
  CHECK(P1.nnz() == 1);
  CHECK(P1.entry(idx(n2.basis, {1, 1}), idx(n2.basis, {1, 1})) == cplx(1.0));

  const Setup big = chain_setup(3, {std::nullopt, 5, std::nullopt});
  for (int lam = 0; lam <= 3; ++lam) {
    const Region Y(big.g, {0, 2});
    const SparseOperator P = cutoff_projection(big.basis, Y, lam);
    CHECK((multiply(P, P).to_dense() - P.to_dense()).norm() == 0.0);
    for (Vertex y = 0; y < 3; ++y) CHECK(commutator(P, number_operator(big.basis, y)).nnz() == 0);
  }
}

TEST_CASE("sandwich") {
  const Setup s = chain_setup(2, {2, std::nullopt, std::nullopt});
  const SparseOperator H = assemble_hamiltonian(s.g, s.lambda, s.basis, bose_hubbard(s.g, 1, 1, 0));
  CHECK((sandwich(SparseOperator::identity(s.basis), H).to_dense() - H.to_dense()).norm() == 0.0);
  CHECK(sandwich(SparseOperator::zero(s.basis), H).nnz() == 0);
  const SparseOperator K = sandwich(cutoff_projection(s.basis, s.lambda, 1), H);
  const std::size_t k = idx(s.basis, {1, 1});
  CHECK(K.nnz() == 0);  // V vanishes on (1,1) and all hops leave the subspace
  CHECK(K.entry(k, k) == H.entry(k, k));

  // Explicit 3x3 product as the oracle.
  const Eigen::MatrixXcd P = cutoff_projection(s.basis, s.lambda, 1).to_dense();
  CHECK((P * H.to_dense() * P - K.to_dense()).norm() == 0.0);
  CHECK(K.is_hermitian());
  CHECK_THROWS_AS(sandwich(number_operator(s.basis, 0), H), InvalidArgument);
}

TEST_CASE("operator norm") {
  const Setup s = chain_setup(2, {1, std::nullopt, std::nullopt});
  CHECK(operator_norm(SparseOperator::identity(s.basis)) == doctest::Approx(1.0).epsilon(1e-12));
  const SparseOperator T = assemble_hopping(s.g, s.lambda, s.basis, 1.0);
  CHECK(operator_norm(T) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(operator_norm_power(T) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(operator_norm(SparseOperator::zero(s.basis)) == 0.0);

  std::mt19937 rng(5);
  const Setup m = chain_setup(3, {std::nullopt, 3, std::nullopt});
  for (int trial = 0; trial < 5; ++trial) {
    const SparseOperator A = random_operator(m.basis, rng);
    const SparseOperator B = random_operator(m.basis, rng);
    const double na = operator_norm(A), nb = operator_norm(B);
    CHECK(na <= A.frobenius_norm() * (1 + 1e-12));
    CHECK(operator_norm(multiply(A, B)) <= na * nb * (1 + 1e-12));
    NormOptions power;
    power.dense_limit = 0;
    CHECK(operator_norm(A, power) == doctest::Approx(na).epsilon(1e-7));
  }
}

TEST_CASE("local observables") {
  const Setup s = chain_setup(2, {std::nullopt, 3, std::nullopt});
  const std::size_t vac = idx(s.basis, {0, 0});
  const SparseOperator inv = local_observable(s.basis, inverse_number(0));
  CHECK(inv.entry(vac, vac) == cplx(1.0));
  const std::size_t three = idx(s.basis, {3, 0});
  CHECK(inv.entry(three, three) == cplx(0.25));
  const SparseOperator proj = local_observable(s.basis, NumberProjector{0, 1});
  const std::size_t one = idx(s.basis, {1, 0});
  CHECK(proj.entry(one, one) == cplx(1.0));
  CHECK(proj.entry(vac, vac) == cplx(0.0));

  CHECK_THROWS_AS(local_observable(s.basis, inverse_number(4)), InvalidArgument);
  CHECK(inv.support()->members() == std::vector<Vertex>{0});

  const SparseOperator hop = local_observable(s.basis, NormalizedHopping{0, 1});
  CHECK(hop.is_hermitian());
  CHECK(hop.conserves_number(s.basis));
  CHECK(operator_norm(hop) <= 1.0 + 1e-12);
  CHECK(hop.support()->members() == std::vector<Vertex>{0, 1});

  const SparseOperator tab = local_observable(s.basis, tabulated_function(1, {0.3, -0.7, 1.0}));
  CHECK(tab.entry(idx(s.basis, {0, 3}), idx(s.basis, {0, 3})) == cplx(1.0));
  CHECK(tab.entry(idx(s.basis, {0, 1}), idx(s.basis, {0, 1})) == cplx(-0.7));

  CHECK((local_observable(s.basis, IdentityObservable{}).to_dense() -
         SparseOperator::identity(s.basis).to_dense()).norm() == 0.0);
  CHECK_FALSE(describe(inverse_number(0)).empty());
}
