#include "h2sgnn/csr.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "h2sgnn/errors.hpp"

namespace h2sgnn {

CsrMatrix CsrMatrix::identity(idx_t n) {
  CsrMatrix m(n, n);
  m.col_idx.resize(static_cast<std::size_t>(n));
  m.values.assign(static_cast<std::size_t>(n), 1.0);
  for (idx_t i = 0; i < n; ++i) {
    m.row_ptr[static_cast<std::size_t>(i) + 1] = i + 1;
    m.col_idx[static_cast<std::size_t>(i)] = i;
  }
  return m;
}

CsrMatrix CsrMatrix::from_triplets(idx_t rows, idx_t cols, std::vector<Triplet> entries) {
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw ShapeError("from_triplets: entry out of bounds");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m(rows, cols);
  std::size_t i = 0;
  for (idx_t r = 0; r < rows; ++r) {
    while (i < entries.size() && entries[i].row == r) {
      idx_t c = entries[i].col;
      double v = 0.0;
      while (i < entries.size() && entries[i].row == r && entries[i].col == c) {
        v += entries[i].value;
        ++i;
      }
      if (v != 0.0) {
        m.col_idx.push_back(c);
        m.values.push_back(v);
      }
    }
    m.row_ptr[static_cast<std::size_t>(r) + 1] = m.nnz();
  }
  return m;
}

CsrMatrix CsrMatrix::from_dense(const DenseMatrix& dense) {
  std::vector<Triplet> trips;
  for (idx_t i = 0; i < dense.n_rows; ++i)
    for (idx_t j = 0; j < dense.n_cols; ++j)
      if (dense.at(i, j) != 0.0) trips.push_back({i, j, dense.at(i, j)});
  return from_triplets(dense.n_rows, dense.n_cols, std::move(trips));
}

DenseMatrix CsrMatrix::to_dense() const {
  DenseMatrix out(n_rows, n_cols);
  for (idx_t i = 0; i < n_rows; ++i)
    for (idx_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      out.at(i, col_idx[static_cast<std::size_t>(k)]) = values[static_cast<std::size_t>(k)];
  return out;
}

void CsrMatrix::validate() const {
  if (n_rows < 0 || n_cols < 0) throw ShapeError("csr: negative dimension");
  if (row_ptr.size() != static_cast<std::size_t>(n_rows) + 1)
    throw ShapeError("csr: row_ptr length != n_rows + 1");
  if (row_ptr.front() != 0) throw ShapeError("csr: row_ptr[0] != 0");
  if (row_ptr.back() != static_cast<idx_t>(col_idx.size()))
    throw ShapeError("csr: row_ptr[n_rows] != nnz");
  if (col_idx.size() != values.size()) throw ShapeError("csr: col_idx/values length mismatch");
  for (idx_t i = 0; i < n_rows; ++i) {
    if (row_ptr[i] > row_ptr[i + 1]) throw ShapeError("csr: row_ptr decreasing");
    for (idx_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      idx_t c = col_idx[static_cast<std::size_t>(k)];
      if (c < 0 || c >= n_cols) throw ShapeError("csr: column index out of range");
      if (k > row_ptr[i] && col_idx[static_cast<std::size_t>(k) - 1] >= c)
        throw ShapeError("csr: columns not strictly increasing within row");
    }
  }
}

namespace {

void spmm_rows(const CsrMatrix& a, const DenseMatrix& x, DenseMatrix& out, idx_t row_begin,
               idx_t row_end) {
  const idx_t d = x.n_cols;
  for (idx_t i = row_begin; i < row_end; ++i) {
    double* orow = out.data.data() + i * d;
    for (idx_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const double v = a.values[static_cast<std::size_t>(k)];
      const double* xrow = x.data.data() + a.col_idx[static_cast<std::size_t>(k)] * d;
      for (idx_t j = 0; j < d; ++j) orow[j] += v * xrow[j];
    }
  }
}

}  // namespace

DenseMatrix spmm(const CsrMatrix& a, const DenseMatrix& x) {
  if (a.n_cols != x.n_rows) throw ShapeError("spmm: a.n_cols != x.n_rows");
  DenseMatrix out(a.n_rows, x.n_cols);
  // Rows are independent, so splitting them over threads keeps every
  // row's accumulation order identical to the sequential one.
  const idx_t work = a.nnz() * x.n_cols;
  static const unsigned hw = std::thread::hardware_concurrency();
  if (work >= (idx_t{1} << 21) && hw > 1 && a.n_rows >= 256) {
    unsigned n_threads = std::min(hw, 8u);
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    idx_t chunk = (a.n_rows + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
      idx_t lo = static_cast<idx_t>(t) * chunk;
      idx_t hi = std::min(a.n_rows, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(spmm_rows, std::cref(a), std::cref(x), std::ref(out), lo, hi);
    }
    for (auto& th : pool) th.join();
  } else {
    spmm_rows(a, x, out, 0, a.n_rows);
  }
  return out;
}

DenseMatrix spmm_transposed(const CsrMatrix& a, const DenseMatrix& x) {
  if (a.n_rows != x.n_rows) throw ShapeError("spmm_transposed: a.n_rows != x.n_rows");
  DenseMatrix out(a.n_cols, x.n_cols);
  const idx_t d = x.n_cols;
  for (idx_t i = 0; i < a.n_rows; ++i) {
    const double* xrow = x.data.data() + i * d;
    for (idx_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const double v = a.values[static_cast<std::size_t>(k)];
      double* orow = out.data.data() + a.col_idx[static_cast<std::size_t>(k)] * d;
      for (idx_t j = 0; j < d; ++j) orow[j] += v * xrow[j];
    }
  }
  return out;
}

CsrMatrix spgemm(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.n_cols != b.n_rows) throw ShapeError("spgemm: a.n_cols != b.n_rows");
  CsrMatrix out(a.n_rows, b.n_cols);
  // Gustavson with a dense accumulator per row; touched columns are sorted
  // so output rows come out canonical.
  std::vector<double> acc(static_cast<std::size_t>(b.n_cols), 0.0);
  std::vector<idx_t> touched;
  std::vector<char> seen(static_cast<std::size_t>(b.n_cols), 0);
  for (idx_t i = 0; i < a.n_rows; ++i) {
    touched.clear();
    for (idx_t ka = a.row_ptr[i]; ka < a.row_ptr[i + 1]; ++ka) {
      const idx_t mid = a.col_idx[static_cast<std::size_t>(ka)];
      const double av = a.values[static_cast<std::size_t>(ka)];
      for (idx_t kb = b.row_ptr[mid]; kb < b.row_ptr[mid + 1]; ++kb) {
        const idx_t j = b.col_idx[static_cast<std::size_t>(kb)];
        acc[static_cast<std::size_t>(j)] += av * b.values[static_cast<std::size_t>(kb)];
        if (!seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = 1;
          touched.push_back(j);
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    for (idx_t j : touched) {
      const double v = acc[static_cast<std::size_t>(j)];
      if (v != 0.0) {  // cancellation zeros are dropped
        out.col_idx.push_back(j);
        out.values.push_back(v);
      }
      acc[static_cast<std::size_t>(j)] = 0.0;
      seen[static_cast<std::size_t>(j)] = 0;
    }
    out.row_ptr[static_cast<std::size_t>(i) + 1] = out.nnz();
  }
  return out;
}

CsrMatrix add_scaled(std::span<const CsrMatrix* const> mats, std::span<const double> weights) {
  if (mats.empty()) throw ArgumentError("add_scaled: empty matrix list");
  if (mats.size() != weights.size())
    throw ArgumentError("add_scaled: weights length != matrix count");
  const idx_t n = mats[0]->n_rows;
  for (const CsrMatrix* m : mats) {
    if (m->n_rows != m->n_cols) throw ShapeError("add_scaled: matrix not square");
    if (m->n_rows != n || m->n_cols != n) throw ShapeError("add_scaled: shape mismatch");
  }
  CsrMatrix out(n, n);
  std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
  std::vector<idx_t> touched;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (idx_t i = 0; i < n; ++i) {
    touched.clear();
    for (std::size_t m = 0; m < mats.size(); ++m) {
      const CsrMatrix& mat = *mats[m];
      const double w = weights[m];
      for (idx_t k = mat.row_ptr[i]; k < mat.row_ptr[i + 1]; ++k) {
        const idx_t j = mat.col_idx[static_cast<std::size_t>(k)];
        acc[static_cast<std::size_t>(j)] += w * mat.values[static_cast<std::size_t>(k)];
        if (!seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = 1;
          touched.push_back(j);
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    for (idx_t j : touched) {
      const double v = acc[static_cast<std::size_t>(j)];
      if (v != 0.0) {
        out.col_idx.push_back(j);
        out.values.push_back(v);
      }
      acc[static_cast<std::size_t>(j)] = 0.0;
      seen[static_cast<std::size_t>(j)] = 0;
    }
    out.row_ptr[static_cast<std::size_t>(i) + 1] = out.nnz();
  }
  return out;
}

CsrMatrix add_scaled(std::span<const CsrMatrix> mats, std::span<const double> weights) {
  std::vector<const CsrMatrix*> ptrs;
  ptrs.reserve(mats.size());
  for (const CsrMatrix& m : mats) ptrs.push_back(&m);
  return add_scaled(std::span<const CsrMatrix* const>(ptrs), weights);
}

CsrMatrix sym_normalize(const CsrMatrix& a) {
  if (a.n_rows != a.n_cols) throw ShapeError("sym_normalize: matrix not square");
  std::vector<double> degree(static_cast<std::size_t>(a.n_rows), 0.0);
  for (idx_t i = 0; i < a.n_rows; ++i) {
    double d = 0.0;
    for (idx_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const double v = a.values[static_cast<std::size_t>(k)];
      if (v < 0.0) throw DomainError("sym_normalize: negative entry");
      d += v;
    }
    degree[static_cast<std::size_t>(i)] = d;
  }
  // a_ij / sqrt(d_i d_j), rounding once per entry. Zero degrees act as
  // 0^{-1/2} = 0; entries killed that way are dropped to stay canonical.
  CsrMatrix out(a.n_rows, a.n_cols);
  for (idx_t i = 0; i < a.n_rows; ++i) {
    const double di = degree[static_cast<std::size_t>(i)];
    for (idx_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const idx_t j = a.col_idx[static_cast<std::size_t>(k)];
      const double dj = degree[static_cast<std::size_t>(j)];
      const double v = a.values[static_cast<std::size_t>(k)];
      if (v == 0.0 || di <= 0.0 || dj <= 0.0) continue;
      out.col_idx.push_back(j);
      out.values.push_back(v / std::sqrt(di * dj));
    }
    out.row_ptr[static_cast<std::size_t>(i) + 1] = out.nnz();
  }
  return out;
}

CsrMatrix transpose(const CsrMatrix& a) {
  CsrMatrix out(a.n_cols, a.n_rows);
  std::vector<idx_t> count(static_cast<std::size_t>(a.n_cols), 0);
  for (idx_t c : a.col_idx) ++count[static_cast<std::size_t>(c)];
  for (idx_t j = 0; j < a.n_cols; ++j)
    out.row_ptr[static_cast<std::size_t>(j) + 1] =
        out.row_ptr[static_cast<std::size_t>(j)] + count[static_cast<std::size_t>(j)];
  out.col_idx.resize(a.col_idx.size());
  out.values.resize(a.values.size());
  std::vector<idx_t> cursor(out.row_ptr.begin(), out.row_ptr.end() - 1);
  for (idx_t i = 0; i < a.n_rows; ++i) {
    for (idx_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const idx_t j = a.col_idx[static_cast<std::size_t>(k)];
      const idx_t pos = cursor[static_cast<std::size_t>(j)]++;
      out.col_idx[static_cast<std::size_t>(pos)] = i;
      out.values[static_cast<std::size_t>(pos)] = a.values[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

CsrMatrix binarize(const CsrMatrix& a) {
  CsrMatrix out = a;
  for (double& v : out.values) v = 1.0;
  return out;
}

CsrMatrix drop_diagonal(const CsrMatrix& a) {
  CsrMatrix out(a.n_rows, a.n_cols);
  for (idx_t i = 0; i < a.n_rows; ++i) {
    for (idx_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const idx_t j = a.col_idx[static_cast<std::size_t>(k)];
      if (j == i) continue;
      out.col_idx.push_back(j);
      out.values.push_back(a.values[static_cast<std::size_t>(k)]);
    }
    out.row_ptr[static_cast<std::size_t>(i) + 1] = out.nnz();
  }
  return out;
}

}  // namespace h2sgnn
