#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bosonlr/kernels.hpp"
#include "bosonlr/lattice.hpp"

namespace bosonlr {

class FockBasis;

struct Triplet {
  std::size_t row;
  std::size_t col;
  cplx value;
};

/// Compressed-row complex operator on one FockBasis.
///
/// Immutable after construction. Entries with |value| <= kPruneThreshold are
/// dropped; duplicate (row, col) triplets are summed before pruning.
class SparseOperator {
 public:
  static constexpr double kPruneThreshold = 1e-15;

  SparseOperator() = default;
  static SparseOperator from_triplets(std::uint64_t basis_id, std::size_t dim,
                                      std::vector<Triplet> triplets);
  static SparseOperator identity(const FockBasis& basis);
  static SparseOperator zero(const FockBasis& basis);
  static SparseOperator diagonal(const FockBasis& basis, std::span<const double> values);

  std::uint64_t basis_id() const { return basis_id_; }
  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return val_.size(); }

  /// Exact test: stored (i,j) equals conj of stored (j,i) bit for bit.
  bool is_hermitian() const { return hermitian_; }
  bool is_diagonal() const { return diagonal_; }

  const std::optional<Region>& support() const { return support_; }
  SparseOperator& set_support(Region r) {
    support_ = std::move(r);
    return *this;
  }

  cplx entry(std::size_t i, std::size_t j) const;
  CsrView view() const { return {dim_, row_ptr_, col_, val_}; }
  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::uint32_t> cols() const { return col_; }
  std::span<const cplx> values() const { return val_; }

  void apply(std::span<const cplx> x, std::span<cplx> y) const;
  std::vector<cplx> apply(std::span<const cplx> x) const;
  void apply_adjoint(std::span<const cplx> x, std::span<cplx> y) const;

  SparseOperator adjoint() const;
  Eigen::MatrixXcd to_dense() const;
  /// Dense restriction to the given ordinals (rows and columns).
  Eigen::MatrixXcd block(std::span<const std::size_t> indices) const;

  /// Largest |A_ij| over entries (0 for the zero operator).
  double max_abs() const;
  double frobenius_norm() const;
  /// True when no stored entry couples states with different totals.
  bool conserves_number(const FockBasis& basis) const;

  /// Matrix-market coordinate dump (complex general).
  void write_matrix_market(const std::string& path) const;

 private:
  void finalize_flags();

  std::uint64_t basis_id_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_;
  std::vector<cplx> val_;
  bool hermitian_ = true;
  bool diagonal_ = true;
  std::optional<Region> support_;
};

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator*(cplx alpha, const SparseOperator& a);
/// Sparse product a * b.
SparseOperator multiply(const SparseOperator& a, const SparseOperator& b);

/// Throws InvalidArgument unless both operators live on the same basis.
void require_same_basis(const SparseOperator& a, const SparseOperator& b, const char* what);

}  // namespace bosonlr
