#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "bosonlr/kernels.hpp"
#include "bosonlr/sparse_operator.hpp"

using namespace bosonlr;

namespace {

std::vector<cplx> random_vector(std::size_t n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

SparseOperator random_sparse(std::size_t n, double density, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (u(rng) < density) t.push_back({i, j, {g(rng), g(rng)}});
  return SparseOperator::from_triplets(42, n, std::move(t));
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("parallel kernels agree with the serial reference") {
  std::mt19937 rng(3);
  for (std::size_t n : {1u, 7u, 130u, 1000u}) {
    const SparseOperator A = random_sparse(n, n > 100 ? 0.02 : 0.4, rng);
    const auto x = random_vector(n, rng);
    std::vector<cplx> y(n), yr(n);
    kernels::spmv(A.view(), x, y);
    kernels::reference::spmv(A.view(), x, yr);
    CHECK(max_diff(y, yr) < 1e-12);
    kernels::spmv_adjoint(A.view(), x, y);
    kernels::reference::spmv_adjoint(A.view(), x, yr);
    CHECK(max_diff(y, yr) < 1e-12);

    // Independent dense oracle.
    const Eigen::MatrixXcd D = A.to_dense();
    const Eigen::VectorXcd xd = Eigen::Map<const Eigen::VectorXcd>(x.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXcd yd = D.adjoint() * xd;
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(yd(static_cast<Eigen::Index>(i)) - y[i]) < 1e-10);

    const auto z = random_vector(n, rng);
    CHECK(std::abs(kernels::dot(x, z) - kernels::reference::dot(x, z)) < 1e-10 * (1.0 + n));
    CHECK(std::abs(kernels::dot(x, z) - xd.dot(Eigen::Map<const Eigen::VectorXcd>(z.data(), static_cast<Eigen::Index>(n)))) < 1e-10 * (1.0 + n));
    CHECK(kernels::norm(x) == doctest::Approx(xd.norm()).epsilon(1e-13));
    CHECK(kernels::norm(x) == doctest::Approx(kernels::reference::norm(x)).epsilon(1e-13));

    auto w1 = z, w2 = z;
    kernels::axpy({0.3, -1.1}, x, w1);
    kernels::reference::axpy({0.3, -1.1}, x, w2);
    CHECK(max_diff(w1, w2) == 0.0);
  }
}

TEST_CASE("pair sum against a direct double sum") {
  std::mt19937 rng(11);
  std::normal_distribution<double> g;
  for (std::size_t n : {1u, 5u, 80u}) {
    std::vector<double> E(n), lw(n);
    for (auto& e : E) e = g(rng);
    for (auto& w : lw) w = -std::abs(g(rng));
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Random(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Random(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const PairSumInput in{n, E, lw, A.data(), B.data()};
    for (double t : {0.0, 0.7, -2.0}) {
      for (double s : {0.0, -0.5}) {
        cplx direct = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k) {
            const double de = E[j] - E[k];
            direct += std::exp(cplx(lw[j] + de * s, de * t)) *
                      A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) *
                      B(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
          }
        CHECK(std::abs(kernels::pair_sum(in, t, s) - direct) < 1e-10 * (1.0 + std::abs(direct)));
        CHECK(std::abs(kernels::reference::pair_sum(in, t, s) - direct) < 1e-10 * (1.0 + std::abs(direct)));
      }
    }
  }
}

TEST_CASE("worker count") {
  const int before = worker_count();
  set_worker_count(1);
  CHECK(worker_count() == 1);
  set_worker_count(0);
  CHECK(worker_count() >= 1);
  set_worker_count(before);
}
