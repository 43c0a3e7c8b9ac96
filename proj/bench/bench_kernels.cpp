#include <benchmark/benchmark.h>

#include <map>
#include <random>
#include <vector>

#include "bosonlr/kernels.hpp"
#include "bosonlr/operators.hpp"

using namespace bosonlr;

namespace {

// Bose-Hubbard chain with `sites` sites in the half-filled sector.
struct Fixture {
  LatticeGraph g;
  Region all;
  FockBasis basis;
  SparseOperator H;
  std::vector<cplx> x;

  explicit Fixture(std::size_t sites)
      : g(build_chain(sites)),
        all(Region::whole(g)),
        basis(all, BasisSpec{static_cast<int>(sites / 2), std::nullopt, std::nullopt}),
        H(assemble_hamiltonian(g, all, basis, bose_hubbard(g, 1.0, 1.0, 0.0))),
        x(basis.dimension()) {
    std::mt19937 rng(1);
    std::normal_distribution<double> n;
    for (auto& v : x) v = {n(rng), n(rng)};
  }
};

const Fixture& fixture(std::size_t sites) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(sites);
  if (it == cache.end()) it = cache.emplace(sites, Fixture(sites)).first;
  return it->second;
}

template <bool Parallel>
void BM_spmv(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<cplx> y(f.x.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::spmv(f.H.view(), f.x, y);
    } else {
      kernels::reference::spmv(f.H.view(), f.x, y);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["dim"] = static_cast<double>(f.x.size());
  state.counters["nnz"] = static_cast<double>(f.H.nnz());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.H.nnz()));
}

template <bool Parallel>
void BM_dot(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    cplx d = Parallel ? kernels::dot(f.x, f.x) : kernels::reference::dot(f.x, f.x);
    benchmark::DoNotOptimize(d);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.x.size()));
}

template <bool Parallel>
void BM_pair_sum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937 rng(2);
  std::normal_distribution<double> g;
  std::vector<double> E(n), lw(n);
  std::vector<cplx> A(n * n), B(n * n);
  for (auto& e : E) e = g(rng);
  for (auto& w : lw) w = -std::abs(g(rng));
  for (auto& a : A) a = {g(rng), g(rng)};
  for (auto& b : B) b = {g(rng), g(rng)};
  const PairSumInput in{n, E, lw, A.data(), B.data()};
  for (auto _ : state) {
    cplx v = Parallel ? kernels::pair_sum(in, 0.7, -0.3) : kernels::reference::pair_sum(in, 0.7, -0.3);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}

}  // namespace

BENCHMARK_TEMPLATE(BM_spmv, true)->Arg(8)->Arg(10)->Arg(12);
BENCHMARK_TEMPLATE(BM_spmv, false)->Arg(8)->Arg(10)->Arg(12);
BENCHMARK_TEMPLATE(BM_dot, true)->Arg(10)->Arg(12);
BENCHMARK_TEMPLATE(BM_dot, false)->Arg(10)->Arg(12);
BENCHMARK_TEMPLATE(BM_pair_sum, true)->Arg(128)->Arg(512)->Arg(1024);
BENCHMARK_TEMPLATE(BM_pair_sum, false)->Arg(128)->Arg(512)->Arg(1024);

BENCHMARK_MAIN();
