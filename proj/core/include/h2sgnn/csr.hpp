#pragma once

#include <span>
#include <vector>

#include "h2sgnn/dense.hpp"

namespace h2sgnn {

struct Triplet {
  idx_t row = 0;
  idx_t col = 0;
  double value = 0.0;
};

// Compressed sparse row matrix in canonical form: row_ptr non-decreasing
// with row_ptr[0] = 0 and row_ptr[n_rows] = nnz, column indices strictly
// increasing within each row, no explicit zeros. Every operation in this
// module returns canonical matrices.
struct CsrMatrix {
  idx_t n_rows = 0;
  idx_t n_cols = 0;
  std::vector<idx_t> row_ptr = {0};
  std::vector<idx_t> col_idx;
  std::vector<double> values;

  CsrMatrix() = default;
  CsrMatrix(idx_t rows, idx_t cols)
      : n_rows(rows), n_cols(cols), row_ptr(static_cast<std::size_t>(rows) + 1, 0) {}

  idx_t nnz() const { return static_cast<idx_t>(col_idx.size()); }

  static CsrMatrix identity(idx_t n);
  // Duplicate (row, col) entries are summed; exact zeros are dropped.
  static CsrMatrix from_triplets(idx_t rows, idx_t cols, std::vector<Triplet> entries);
  static CsrMatrix from_dense(const DenseMatrix& dense);

  DenseMatrix to_dense() const;
  // Throws ShapeError when the canonical-form invariants do not hold.
  void validate() const;

  bool operator==(const CsrMatrix&) const = default;
};

// Sparse * dense. Accumulation within a row follows stored column order;
// rows may be processed in parallel without changing any result bit.
DenseMatrix spmm(const CsrMatrix& a, const DenseMatrix& x);
// a^T * x without materializing the transpose.
DenseMatrix spmm_transposed(const CsrMatrix& a, const DenseMatrix& x);
// Sparse * sparse, canonical output, cancellation zeros dropped.
CsrMatrix spgemm(const CsrMatrix& a, const CsrMatrix& b);
// sum_i weights[i] * mats[i] over square same-shape matrices.
CsrMatrix add_scaled(std::span<const CsrMatrix* const> mats, std::span<const double> weights);
CsrMatrix add_scaled(std::span<const CsrMatrix> mats, std::span<const double> weights);
// D^{-1/2} A D^{-1/2} with d_i = sum_j a_ij; zero-degree rows/columns stay zero.
CsrMatrix sym_normalize(const CsrMatrix& a);

CsrMatrix transpose(const CsrMatrix& a);
// All stored values replaced by 1.
CsrMatrix binarize(const CsrMatrix& a);
CsrMatrix drop_diagonal(const CsrMatrix& a);

}  // namespace h2sgnn
