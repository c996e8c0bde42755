#include "rkdg/block_sparse.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rkdg {

BlockSparseMatrix::Builder::Builder(int block_rows, int block_cols, int block_size)
    : rows_(block_rows), cols_(block_cols), bs_(block_size) {
  if (block_rows < 0 || block_cols < 0 || block_size < 1) {
    throw std::invalid_argument("BlockSparseMatrix: invalid dimensions");
  }
}

BlockSparseMatrix BlockSparseMatrix::Builder::build() && {
  std::vector<std::size_t> order(entries_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    const auto& ea = entries_[a];
    const auto& eb = entries_[b];
    return ea.row != eb.row ? ea.row < eb.row : ea.col < eb.col;
  });

  BlockSparseMatrix m;
  m.rows_ = rows_;
  m.cols_ = cols_;
  m.bs_ = bs_;
  m.row_start_.assign(static_cast<std::size_t>(rows_) + 1, 0);
  m.col_index_.reserve(entries_.size());
  m.block_offset_.reserve(entries_.size());
  // Repack the pool in row order so products stream through memory.
  const std::size_t area = static_cast<std::size_t>(bs_) * static_cast<std::size_t>(bs_);
  m.pool_.resize(pool_.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& e = entries_[order[k]];
    if (e.row < 0 || e.row >= rows_ || e.col < 0 || e.col >= cols_) {
      throw std::out_of_range("BlockSparseMatrix: block (" + std::to_string(e.row) + ", " +
                              std::to_string(e.col) + ") out of range");
    }
    if (k > 0) {
      const auto& prev = entries_[order[k - 1]];
      if (prev.row == e.row && prev.col == e.col) {
        throw std::logic_error("BlockSparseMatrix: duplicate block (" + std::to_string(e.row) + ", " +
                               std::to_string(e.col) + ")");
      }
    }
    std::copy_n(pool_.begin() + static_cast<std::ptrdiff_t>(e.offset), area,
                m.pool_.begin() + static_cast<std::ptrdiff_t>(k * area));
    m.col_index_.push_back(e.col);
    m.block_offset_.push_back(k * area);
    ++m.row_start_[static_cast<std::size_t>(e.row) + 1];
  }
  std::partial_sum(m.row_start_.begin(), m.row_start_.end(), m.row_start_.begin());
  entries_.clear();
  pool_.clear();
  pool_.shrink_to_fit();
  return m;
}

std::size_t BlockSparseMatrix::memory_bytes() const {
  return pool_.size() * sizeof(double) + col_index_.size() * sizeof(int) +
         block_offset_.size() * sizeof(std::size_t) + row_start_.size() * sizeof(std::size_t);
}

const double* BlockSparseMatrix::find(int row, int col) const {
  if (row < 0 || row >= rows_) return nullptr;
  const auto begin = col_index_.begin() + static_cast<std::ptrdiff_t>(row_start_[row]);
  const auto end = col_index_.begin() + static_cast<std::ptrdiff_t>(row_start_[row + 1]);
  const auto it = std::lower_bound(begin, end, col);
  if (it == end || *it != col) return nullptr;
  return pool_.data() + block_offset_[static_cast<std::size_t>(it - col_index_.begin())];
}

void BlockSparseMatrix::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  if (x.size() != cols()) throw std::invalid_argument("BlockSparseMatrix::multiply: size mismatch");
  y.resize(rows());
  const int bs = bs_;
#ifdef RKDG_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int r = 0; r < rows_; ++r) {
    auto yr = y.segment(static_cast<Eigen::Index>(r) * bs, bs);
    yr.setZero();
    for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k) {
      Eigen::Map<const Eigen::MatrixXd> block(pool_.data() + block_offset_[k], bs, bs);
      yr.noalias() += block * x.segment(static_cast<Eigen::Index>(col_index_[k]) * bs, bs);
    }
  }
}

Eigen::SparseMatrix<double, Eigen::RowMajor> BlockSparseMatrix::to_sparse() const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(pool_.size());
  for (int r = 0; r < rows_; ++r) {
    for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k) {
      const double* block = pool_.data() + block_offset_[k];
      for (int j = 0; j < bs_; ++j) {
        for (int i = 0; i < bs_; ++i) {
          const double v = block[static_cast<std::size_t>(j) * bs_ + i];
          if (v != 0.0) triplets.emplace_back(r * bs_ + i, col_index_[k] * bs_ + j, v);
        }
      }
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> s(rows(), cols());
  s.setFromTriplets(triplets.begin(), triplets.end());
  return s;
}

}  // namespace rkdg
