#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "bosonlr/fock.hpp"
#include "bosonlr/sparse_operator.hpp"

namespace bosonlr {

/// Split of a basis into total-number sectors.
struct SectorPartition {
  std::uint64_t basis_id = 0;
  std::size_t dim = 0;
  std::vector<int> sectors;                       // ascending
  std::vector<std::vector<std::size_t>> indices;  // per block, ascending ordinals
  std::vector<std::size_t> block_of;              // ordinal -> block
  std::vector<std::size_t> local_of;              // ordinal -> position in block

  std::size_t num_blocks() const { return sectors.size(); }
  std::size_t largest_block() const;
};

std::shared_ptr<const SectorPartition> sector_partition(const FockBasis& basis);

/// Dense block-diagonal operator aligned with a sector partition. This is the
/// representation of every number-conserving operator once it has been
/// rotated or time-evolved.
class BlockMatrix {
 public:
  BlockMatrix() = default;
  BlockMatrix(std::shared_ptr<const SectorPartition> part, std::vector<Eigen::MatrixXcd> blocks);

  static BlockMatrix zero(std::shared_ptr<const SectorPartition> part);
  static BlockMatrix identity(std::shared_ptr<const SectorPartition> part);
  /// Throws InvalidArgument if `op` couples different sectors.
  static BlockMatrix from_sparse(const SparseOperator& op,
                                 std::shared_ptr<const SectorPartition> part);

  const SectorPartition& partition() const { return *part_; }
  const std::shared_ptr<const SectorPartition>& partition_ptr() const { return part_; }
  std::size_t num_blocks() const { return blocks_.size(); }
  const Eigen::MatrixXcd& block(std::size_t b) const { return blocks_[b]; }
  Eigen::MatrixXcd& block(std::size_t b) { return blocks_[b]; }

  BlockMatrix adjoint() const;
  /// Largest singular value over all blocks.
  double norm() const;
  double max_abs() const;
  Eigen::MatrixXcd to_dense() const;

  friend BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b);
  friend BlockMatrix operator-(const BlockMatrix& a, const BlockMatrix& b);
  friend BlockMatrix operator+(const BlockMatrix& a, const BlockMatrix& b);

 private:
  std::shared_ptr<const SectorPartition> part_;
  std::vector<Eigen::MatrixXcd> blocks_;
};

BlockMatrix commutator(const BlockMatrix& a, const BlockMatrix& b);

}  // namespace bosonlr
