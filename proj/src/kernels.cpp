#include "bosonlr/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace bosonlr {

namespace {

// Below this many rows the parallel region costs more than it saves.
constexpr std::size_t kParallelThreshold = 2048;

inline cplx pair_term(const PairSumInput& in, std::size_t j, std::size_t k, double t,
                      double s) {
  const double gap = in.energies[j] - in.energies[k];
  const double mag = std::exp(in.log_weights[j] + gap * s);
  return std::polar(mag, gap * t) * in.a[j + k * in.dim] * in.b[k + j * in.dim];
}

}  // namespace

void set_worker_count(int workers) {
  omp_set_num_threads(workers > 0 ? workers : omp_get_num_procs());
}

int worker_count() { return omp_get_max_threads(); }

namespace kernels {

void spmv(const CsrView& m, std::span<const cplx> x, std::span<cplx> y) {
  const auto n = static_cast<std::ptrdiff_t>(m.dim);
#pragma omp parallel for schedule(static) if (m.dim >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    cplx acc = 0.0;
    for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) acc += m.val[p] * x[m.col[p]];
    y[i] = acc;
  }
}

void spmv_adjoint(const CsrView& m, std::span<const cplx> x, std::span<cplx> y) {
  // Scatter form; threads own disjoint output copies that are merged after.
  const std::size_t n = m.dim;
  if (n < kParallelThreshold) {
    reference::spmv_adjoint(m, x, y);
    return;
  }
  std::fill(y.begin(), y.end(), cplx{0.0});
#pragma omp parallel
  {
    std::vector<cplx> local(n, cplx{0.0});
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
        local[m.col[p]] += std::conj(m.val[p]) * x[i];
      }
    }
#pragma omp critical
    for (std::size_t i = 0; i < n; ++i) y[i] += local[i];
  }
}

cplx dot(std::span<const cplx> x, std::span<const cplx> y) {
  double re = 0.0, im = 0.0;
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for reduction(+ : re, im) schedule(static) if (x.size() >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const cplx v = std::conj(x[i]) * y[i];
    re += v.real();
    im += v.imag();
  }
  return {re, im};
}

double norm(std::span<const cplx> x) {
  double acc = 0.0;
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for reduction(+ : acc) schedule(static) if (x.size() >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) acc += std::norm(x[i]);
  return std::sqrt(acc);
}

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

cplx pair_sum(const PairSumInput& in, double t, double s) {
  double re = 0.0, im = 0.0;
  const auto n = static_cast<std::ptrdiff_t>(in.dim);
#pragma omp parallel for reduction(+ : re, im) schedule(static) if (in.dim >= 64)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < in.dim; ++k) {
      const cplx v = pair_term(in, static_cast<std::size_t>(j), k, t, s);
      re += v.real();
      im += v.imag();
    }
  }
  return {re, im};
}

namespace reference {

void spmv(const CsrView& m, std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t i = 0; i < m.dim; ++i) {
    cplx acc = 0.0;
    for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) acc += m.val[p] * x[m.col[p]];
    y[i] = acc;
  }
}

void spmv_adjoint(const CsrView& m, std::span<const cplx> x, std::span<cplx> y) {
  std::fill(y.begin(), y.end(), cplx{0.0});
  for (std::size_t i = 0; i < m.dim; ++i) {
    for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
      y[m.col[p]] += std::conj(m.val[p]) * x[i];
    }
  }
}

cplx dot(std::span<const cplx> x, std::span<const cplx> y) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

double norm(std::span<const cplx> x) {
  double acc = 0.0;
  for (const cplx& v : x) acc += std::norm(v);
  return std::sqrt(acc);
}

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

cplx pair_sum(const PairSumInput& in, double t, double s) {
  cplx acc = 0.0;
  for (std::size_t j = 0; j < in.dim; ++j) {
    for (std::size_t k = 0; k < in.dim; ++k) acc += pair_term(in, j, k, t, s);
  }
  return acc;
}

}  // namespace reference
}  // namespace kernels
}  // namespace bosonlr
