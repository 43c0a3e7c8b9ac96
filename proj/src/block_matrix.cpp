#include "bosonlr/block_matrix.hpp"

#include <Eigen/SVD>
#include <algorithm>

#include "bosonlr/errors.hpp"

namespace bosonlr {

std::size_t SectorPartition::largest_block() const {
  std::size_t best = 0;
  for (const auto& idx : indices) best = std::max(best, idx.size());
  return best;
}

std::shared_ptr<const SectorPartition> sector_partition(const FockBasis& basis) {
  auto p = std::make_shared<SectorPartition>();
  p->basis_id = basis.id();
  p->dim = basis.dimension();
  p->sectors = basis.sectors();
  p->block_of.assign(p->dim, 0);
  p->local_of.assign(p->dim, 0);
  for (std::size_t b = 0; b < p->sectors.size(); ++b) {
    p->indices.push_back(basis.sector_indices(p->sectors[b]));
    for (std::size_t i = 0; i < p->indices[b].size(); ++i) {
      p->block_of[p->indices[b][i]] = b;
      p->local_of[p->indices[b][i]] = i;
    }
  }
  return p;
}

BlockMatrix::BlockMatrix(std::shared_ptr<const SectorPartition> part,
                         std::vector<Eigen::MatrixXcd> blocks)
    : part_(std::move(part)), blocks_(std::move(blocks)) {
  if (!part_ || blocks_.size() != part_->num_blocks()) {
    throw InvalidArgument("block count does not match the sector partition");
  }
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto n = static_cast<Eigen::Index>(part_->indices[b].size());
    if (blocks_[b].rows() != n || blocks_[b].cols() != n) {
      throw InvalidArgument("block shape does not match its sector");
    }
  }
}

BlockMatrix BlockMatrix::zero(std::shared_ptr<const SectorPartition> part) {
  std::vector<Eigen::MatrixXcd> blocks;
  for (const auto& idx : part->indices) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    blocks.push_back(Eigen::MatrixXcd::Zero(n, n));
  }
  return BlockMatrix(std::move(part), std::move(blocks));
}

BlockMatrix BlockMatrix::identity(std::shared_ptr<const SectorPartition> part) {
  BlockMatrix out = zero(std::move(part));
  for (auto& b : out.blocks_) b.setIdentity();
  return out;
}

BlockMatrix BlockMatrix::from_sparse(const SparseOperator& op,
                                     std::shared_ptr<const SectorPartition> part) {
  if (op.basis_id() != part->basis_id) {
    throw InvalidArgument("operator and sector partition belong to different bases");
  }
  BlockMatrix out = zero(std::move(part));
  const auto& p = *out.part_;
  const auto rp = op.row_ptr();
  const auto cols = op.cols();
  const auto vals = op.values();
  for (std::size_t i = 0; i < op.dim(); ++i) {
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      const std::size_t j = cols[k];
      if (p.block_of[i] != p.block_of[j]) {
        throw InvalidArgument("operator does not conserve the particle number");
      }
      out.blocks_[p.block_of[i]](static_cast<Eigen::Index>(p.local_of[i]),
                                 static_cast<Eigen::Index>(p.local_of[j])) = vals[k];
    }
  }
  return out;
}

BlockMatrix BlockMatrix::adjoint() const {
  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(blocks_.size());
  for (const auto& b : blocks_) blocks.push_back(b.adjoint());
  return BlockMatrix(part_, std::move(blocks));
}

double BlockMatrix::norm() const {
  double best = 0.0;
  for (const auto& b : blocks_) {
    if (b.size() == 0) continue;
    if (b.rows() == 1) {
      best = std::max(best, std::abs(b(0, 0)));
      continue;
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(b);
    best = std::max(best, svd.singularValues()(0));
  }
  return best;
}

double BlockMatrix::max_abs() const {
  double best = 0.0;
  for (const auto& b : blocks_) {
    if (b.size() > 0) best = std::max(best, b.cwiseAbs().maxCoeff());
  }
  return best;
}

Eigen::MatrixXcd BlockMatrix::to_dense() const {
  const auto n = static_cast<Eigen::Index>(part_->dim);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& idx = part_->indices[b];
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (std::size_t j = 0; j < idx.size(); ++j) {
        out(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(idx[j])) =
            blocks_[b](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return out;
}

namespace {

void require_same_partition(const BlockMatrix& a, const BlockMatrix& b) {
  if (a.partition_ptr() != b.partition_ptr() &&
      a.partition().basis_id != b.partition().basis_id) {
    throw InvalidArgument("block matrices live on different bases");
  }
}

template <class Op>
BlockMatrix combine(const BlockMatrix& a, const BlockMatrix& b, Op op) {
  require_same_partition(a, b);
  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(a.num_blocks());
  for (std::size_t i = 0; i < a.num_blocks(); ++i) blocks.push_back(op(a.block(i), b.block(i)));
  return BlockMatrix(a.partition_ptr(), std::move(blocks));
}

}  // namespace

BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b) {
  return combine(a, b, [](const auto& x, const auto& y) -> Eigen::MatrixXcd { return x * y; });
}
BlockMatrix operator-(const BlockMatrix& a, const BlockMatrix& b) {
  return combine(a, b, [](const auto& x, const auto& y) -> Eigen::MatrixXcd { return x - y; });
}
BlockMatrix operator+(const BlockMatrix& a, const BlockMatrix& b) {
  return combine(a, b, [](const auto& x, const auto& y) -> Eigen::MatrixXcd { return x + y; });
}

BlockMatrix commutator(const BlockMatrix& a, const BlockMatrix& b) { return a * b - b * a; }

}  // namespace bosonlr
