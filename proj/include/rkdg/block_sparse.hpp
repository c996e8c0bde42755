#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace rkdg {

/// Square-block sparse matrix in block-row compressed form. Blocks are
/// dense, column-major, all of one size; all-zero blocks are never stored.
class BlockSparseMatrix {
 public:
  class Builder {
   public:
    Builder(int block_rows, int block_cols, int block_size);

    /// Adds a block at (row, col); exact-zero blocks are dropped. A block
    /// position may be given at most once.
    template <typename Derived>
    void add(int row, int col, const Eigen::MatrixBase<Derived>& block) {
      if (block.isZero(0.0)) return;
      const std::size_t offset = pool_.size();
      pool_.resize(offset + static_cast<std::size_t>(bs_) * static_cast<std::size_t>(bs_));
      Eigen::Map<Eigen::MatrixXd>(pool_.data() + offset, bs_, bs_) = block;
      entries_.push_back({row, col, offset});
    }

    BlockSparseMatrix build() &&;

   private:
    struct Entry {
      int row;
      int col;
      std::size_t offset;
    };
    int rows_, cols_, bs_;
    std::vector<Entry> entries_;
    std::vector<double> pool_;
  };

  BlockSparseMatrix() = default;

  int block_rows() const { return rows_; }
  int block_cols() const { return cols_; }
  int block_size() const { return bs_; }
  Eigen::Index rows() const { return static_cast<Eigen::Index>(rows_) * bs_; }
  Eigen::Index cols() const { return static_cast<Eigen::Index>(cols_) * bs_; }
  std::size_t num_blocks() const { return col_index_.size(); }
  /// Stored scalar count (blocks times block area).
  std::size_t nnz() const { return pool_.size(); }
  std::size_t memory_bytes() const;

  /// Pointer to block (row, col) or nullptr when not stored.
  const double* find(int row, int col) const;

  /// y = A x. Rows are independent, so the result does not depend on the
  /// thread count.
  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;

  Eigen::SparseMatrix<double, Eigen::RowMajor> to_sparse() const;

 private:
  int rows_ = 0, cols_ = 0, bs_ = 0;
  std::vector<std::size_t> row_start_;  // rows_ + 1
  std::vector<int> col_index_;
  std::vector<std::size_t> block_offset_;
  std::vector<double> pool_;
};

}  // namespace rkdg
