#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>

namespace bosonlr {

using cplx = std::complex<double>;

/// Borrowed view of a square CSR matrix.
struct CsrView {
  std::size_t dim = 0;
  std::span<const std::size_t> row_ptr;
  std::span<const std::uint32_t> col;
  std::span<const cplx> val;
};

/// Inputs of the spectral double sum behind the thermal Green function.
///
///   sum_j sum_k exp(log_w[j] + (E[j] - E[k]) s + i (E[j] - E[k]) t) A[j,k] B[k,j]
///
/// A and B are column-major dim x dim blocks in the eigenbasis.
struct PairSumInput {
  std::size_t dim = 0;
  std::span<const double> energies;
  std::span<const double> log_weights;
  const cplx* a = nullptr;
  const cplx* b = nullptr;
};

// OpenMP kernels. Results agree with kernels::reference to rounding; the
// reduction order differs, so bitwise equality is not guaranteed.
namespace kernels {

void spmv(const CsrView& m, std::span<const cplx> x, std::span<cplx> y);
/// y = M^dagger x.
void spmv_adjoint(const CsrView& m, std::span<const cplx> x, std::span<cplx> y);
cplx dot(std::span<const cplx> x, std::span<const cplx> y);  // <x, y>, x conjugated
double norm(std::span<const cplx> x);
/// y += alpha x
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
cplx pair_sum(const PairSumInput& in, double t, double s);

/// Serial reference implementations, kept for tests and benchmarks.
namespace reference {
void spmv(const CsrView& m, std::span<const cplx> x, std::span<cplx> y);
void spmv_adjoint(const CsrView& m, std::span<const cplx> x, std::span<cplx> y);
cplx dot(std::span<const cplx> x, std::span<const cplx> y);
double norm(std::span<const cplx> x);
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
cplx pair_sum(const PairSumInput& in, double t, double s);
}  // namespace reference

}  // namespace kernels

/// Worker count for OpenMP regions; 0 restores the runtime default.
void set_worker_count(int workers);
int worker_count();

}  // namespace bosonlr
