#include "h2sgnn/dense.hpp"

#include <cmath>
#include <cstdlib>

#include "h2sgnn/errors.hpp"

namespace h2sgnn {

DenseMatrix::DenseMatrix(idx_t rows, idx_t cols)
    : n_rows(rows), n_cols(cols), data(static_cast<std::size_t>(rows * cols), 0.0) {
  if (rows < 0 || cols < 0) throw ShapeError("DenseMatrix: negative dimension");
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  DenseMatrix m;
  m.n_rows = static_cast<idx_t>(rows.size());
  m.n_cols = rows.size() ? static_cast<idx_t>(rows.begin()->size()) : 0;
  m.data.reserve(static_cast<std::size_t>(m.n_rows * m.n_cols));
  for (const auto& r : rows) {
    if (static_cast<idx_t>(r.size()) != m.n_cols)
      throw ShapeError("DenseMatrix::from_rows: ragged rows");
    m.data.insert(m.data.end(), r.begin(), r.end());
  }
  return m;
}

bool DenseMatrix::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.n_cols != b.n_rows) throw ShapeError("matmul: inner dimensions differ");
  DenseMatrix out(a.n_rows, b.n_cols);
  for (idx_t i = 0; i < a.n_rows; ++i) {
    const double* arow = a.data.data() + i * a.n_cols;
    double* orow = out.data.data() + i * out.n_cols;
    for (idx_t k = 0; k < a.n_cols; ++k) {
      const double av = arow[k];
      if (av == 0.0) continue;
      const double* brow = b.data.data() + k * b.n_cols;
      for (idx_t j = 0; j < b.n_cols; ++j) orow[j] += av * brow[j];
    }
  }
  return out;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.n_rows != b.n_rows) throw ShapeError("matmul_tn: row counts differ");
  DenseMatrix out(a.n_cols, b.n_cols);
  for (idx_t k = 0; k < a.n_rows; ++k) {
    const double* arow = a.data.data() + k * a.n_cols;
    const double* brow = b.data.data() + k * b.n_cols;
    for (idx_t i = 0; i < a.n_cols; ++i) {
      const double av = arow[i];
      if (av == 0.0) continue;
      double* orow = out.data.data() + i * out.n_cols;
      for (idx_t j = 0; j < b.n_cols; ++j) orow[j] += av * brow[j];
    }
  }
  return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.n_cols != b.n_cols) throw ShapeError("matmul_nt: column counts differ");
  DenseMatrix out(a.n_rows, b.n_rows);
  for (idx_t i = 0; i < a.n_rows; ++i) {
    const double* arow = a.data.data() + i * a.n_cols;
    for (idx_t j = 0; j < b.n_rows; ++j) {
      const double* brow = b.data.data() + j * b.n_cols;
      double acc = 0.0;
      for (idx_t k = 0; k < a.n_cols; ++k) acc += arow[k] * brow[k];
      out.at(i, j) = acc;
    }
  }
  return out;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw ShapeError("add: shape mismatch");
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  return out;
}

void axpy(double c, const DenseMatrix& x, DenseMatrix& y) {
  if (!x.same_shape(y)) throw ShapeError("axpy: shape mismatch");
  for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += c * x.data[i];
}

void scale_inplace(DenseMatrix& x, double c) {
  for (double& v : x.data) v *= c;
}

DenseMatrix scaled(const DenseMatrix& x, double c) {
  DenseMatrix out = x;
  scale_inplace(out, c);
  return out;
}

double frob_dot(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw ShapeError("frob_dot: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) acc += a.data[i] * b.data[i];
  return acc;
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.data) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw ShapeError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace h2sgnn
