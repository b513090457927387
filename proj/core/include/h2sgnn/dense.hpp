#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace h2sgnn {

using idx_t = std::int64_t;

// Row-major dense matrix of doubles. Carries node-feature panels (n x d),
// filtered representations and MLP activations; never adjacency matrices.
struct DenseMatrix {
  idx_t n_rows = 0;
  idx_t n_cols = 0;
  std::vector<double> data;  // size n_rows * n_cols

  DenseMatrix() = default;
  DenseMatrix(idx_t rows, idx_t cols);
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  double& at(idx_t i, idx_t j) { return data[static_cast<std::size_t>(i * n_cols + j)]; }
  double at(idx_t i, idx_t j) const { return data[static_cast<std::size_t>(i * n_cols + j)]; }
  std::span<double> row(idx_t i) {
    return {data.data() + i * n_cols, static_cast<std::size_t>(n_cols)};
  }
  std::span<const double> row(idx_t i) const {
    return {data.data() + i * n_cols, static_cast<std::size_t>(n_cols)};
  }

  bool same_shape(const DenseMatrix& other) const {
    return n_rows == other.n_rows && n_cols == other.n_cols;
  }
  bool all_finite() const;

  bool operator==(const DenseMatrix&) const = default;
};

// a * b
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// a^T * b (used for weight gradients without materializing transposes)
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
// a * b^T (used when backpropagating through linear layers)
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
// y += c * x
void axpy(double c, const DenseMatrix& x, DenseMatrix& y);
void scale_inplace(DenseMatrix& x, double c);
DenseMatrix scaled(const DenseMatrix& x, double c);
// Frobenius inner product sum_ij a_ij * b_ij
double frob_dot(const DenseMatrix& a, const DenseMatrix& b);
double max_abs(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace h2sgnn
