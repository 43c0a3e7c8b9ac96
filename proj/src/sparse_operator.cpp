#include "bosonlr/sparse_operator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "bosonlr/errors.hpp"
#include "bosonlr/fock.hpp"

namespace bosonlr {

SparseOperator SparseOperator::from_triplets(std::uint64_t basis_id, std::size_t dim,
                                             std::vector<Triplet> triplets) {
  if (dim > std::numeric_limits<std::uint32_t>::max()) {
    throw ResourceLimit("operator dimension exceeds 32-bit column indices");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseOperator op;
  op.basis_id_ = basis_id;
  op.dim_ = dim;
  op.row_ptr_.assign(dim + 1, 0);
  op.col_.reserve(triplets.size());
  op.val_.reserve(triplets.size());

  std::size_t p = 0;
  while (p < triplets.size()) {
    const std::size_t r = triplets[p].row, c = triplets[p].col;
    if (r >= dim || c >= dim) throw InvalidArgument("triplet outside operator dimension");
    cplx sum = 0.0;
    for (; p < triplets.size() && triplets[p].row == r && triplets[p].col == c; ++p) {
      sum += triplets[p].value;
    }
    if (std::abs(sum) > kPruneThreshold) {
      op.col_.push_back(static_cast<std::uint32_t>(c));
      op.val_.push_back(sum);
      ++op.row_ptr_[r + 1];
    }
  }
  for (std::size_t i = 0; i < dim; ++i) op.row_ptr_[i + 1] += op.row_ptr_[i];
  op.finalize_flags();
  return op;
}

SparseOperator SparseOperator::identity(const FockBasis& basis) {
  std::vector<double> ones(basis.dimension(), 1.0);
  return diagonal(basis, ones);
}

SparseOperator SparseOperator::zero(const FockBasis& basis) {
  return from_triplets(basis.id(), basis.dimension(), {});
}

SparseOperator SparseOperator::diagonal(const FockBasis& basis, std::span<const double> values) {
  if (values.size() != basis.dimension()) {
    throw InvalidArgument("diagonal length does not match basis dimension");
  }
  std::vector<Triplet> t;
  t.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) t.push_back({i, i, values[i]});
  return from_triplets(basis.id(), basis.dimension(), std::move(t));
}

void SparseOperator::finalize_flags() {
  diagonal_ = true;
  for (std::size_t i = 0; i < dim_ && diagonal_; ++i) {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (col_[p] != i) {
        diagonal_ = false;
        break;
      }
    }
  }
  hermitian_ = true;
  for (std::size_t i = 0; i < dim_ && hermitian_; ++i) {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (val_[p] != std::conj(entry(col_[p], i))) {
        hermitian_ = false;
        break;
      }
    }
  }
}

cplx SparseOperator::entry(std::size_t i, std::size_t j) const {
  const auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(j));
  if (it == last || *it != j) return 0.0;
  return val_[static_cast<std::size_t>(it - col_.begin())];
}

void SparseOperator::apply(std::span<const cplx> x, std::span<cplx> y) const {
  if (x.size() != dim_ || y.size() != dim_) throw InvalidArgument("apply: size mismatch");
  kernels::spmv(view(), x, y);
}

std::vector<cplx> SparseOperator::apply(std::span<const cplx> x) const {
  std::vector<cplx> y(dim_);
  apply(x, y);
  return y;
}

void SparseOperator::apply_adjoint(std::span<const cplx> x, std::span<cplx> y) const {
  if (x.size() != dim_ || y.size() != dim_) throw InvalidArgument("apply_adjoint: size mismatch");
  kernels::spmv_adjoint(view(), x, y);
}

SparseOperator SparseOperator::adjoint() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      t.push_back({col_[p], i, std::conj(val_[p])});
    }
  }
  auto out = from_triplets(basis_id_, dim_, std::move(t));
  out.support_ = support_;
  return out;
}

Eigen::MatrixXcd SparseOperator::to_dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim_),
                                              static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      m(static_cast<Eigen::Index>(i), col_[p]) = val_[p];
    }
  }
  return m;
}

Eigen::MatrixXcd SparseOperator::block(std::span<const std::size_t> indices) const {
  const auto n = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  // indices are ascending ordinals; position lookup by binary search.
  for (Eigen::Index a = 0; a < n; ++a) {
    const std::size_t i = indices[static_cast<std::size_t>(a)];
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      const auto it = std::lower_bound(indices.begin(), indices.end(), col_[p]);
      if (it != indices.end() && *it == col_[p]) m(a, it - indices.begin()) = val_[p];
    }
  }
  return m;
}

double SparseOperator::max_abs() const {
  double best = 0.0;
  for (const cplx& v : val_) best = std::max(best, std::abs(v));
  return best;
}

double SparseOperator::frobenius_norm() const {
  double acc = 0.0;
  for (const cplx& v : val_) acc += std::norm(v);
  return std::sqrt(acc);
}

bool SparseOperator::conserves_number(const FockBasis& basis) const {
  if (basis.id() != basis_id_) throw InvalidArgument("conserves_number: basis mismatch");
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (basis.total(i) != basis.total(col_[p])) return false;
    }
  }
  return true;
}

void SparseOperator::write_matrix_market(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "%%MatrixMarket matrix coordinate complex general\n";
  out << dim_ << ' ' << dim_ << ' ' << nnz() << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      out << i + 1 << ' ' << col_[p] + 1 << ' ' << val_[p].real() << ' ' << val_[p].imag()
          << '\n';
    }
  }
  if (!out) throw IoError("write failed for " + path);
}

void require_same_basis(const SparseOperator& a, const SparseOperator& b, const char* what) {
  if (a.basis_id() != b.basis_id() || a.dim() != b.dim()) {
    throw InvalidArgument(std::string(what) + ": operators live on different bases");
  }
}

namespace {

SparseOperator combine(const SparseOperator& a, const SparseOperator& b, double sign) {
  require_same_basis(a, b, "operator sum");
  std::vector<Triplet> t;
  t.reserve(a.nnz() + b.nnz());
  for (int which = 0; which < 2; ++which) {
    const SparseOperator& m = which == 0 ? a : b;
    const double s = which == 0 ? 1.0 : sign;
    for (std::size_t i = 0; i < m.dim(); ++i) {
      for (std::size_t p = m.row_ptr()[i]; p < m.row_ptr()[i + 1]; ++p) {
        t.push_back({i, m.cols()[p], s * m.values()[p]});
      }
    }
  }
  return SparseOperator::from_triplets(a.basis_id(), a.dim(), std::move(t));
}

}  // namespace

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
  return combine(a, b, 1.0);
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
  return combine(a, b, -1.0);
}

SparseOperator operator*(cplx alpha, const SparseOperator& a) {
  std::vector<Triplet> t;
  t.reserve(a.nnz());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) {
      t.push_back({i, a.cols()[p], alpha * a.values()[p]});
    }
  }
  auto out = SparseOperator::from_triplets(a.basis_id(), a.dim(), std::move(t));
  if (a.support()) out.set_support(*a.support());
  return out;
}

SparseOperator multiply(const SparseOperator& a, const SparseOperator& b) {
  require_same_basis(a, b, "operator product");
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) {
      const std::size_t k = a.cols()[p];
      for (std::size_t q = b.row_ptr()[k]; q < b.row_ptr()[k + 1]; ++q) {
        t.push_back({i, b.cols()[q], a.values()[p] * b.values()[q]});
      }
    }
  }
  return SparseOperator::from_triplets(a.basis_id(), a.dim(), std::move(t));
}

}  // namespace bosonlr
