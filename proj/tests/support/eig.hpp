#pragma once

// Symmetric eigendecomposition by cyclic Jacobi rotations, used as the
// spectral oracle for filter checks. Test-only; deliberately separate from
// the library, which never eigendecomposes anything.

#include <cmath>
#include <vector>

#include "h2sgnn/dense.hpp"

namespace testref {

using h2sgnn::DenseMatrix;
using h2sgnn::idx_t;

struct EigResult {
  std::vector<double> values;  // eigenvalues, one per column of vectors
  DenseMatrix vectors;         // orthonormal eigenvectors as columns
};

inline EigResult symmetric_eig(DenseMatrix a) {
  const idx_t n = a.n_rows;
  DenseMatrix v(n, n);
  for (idx_t i = 0; i < n; ++i) v.at(i, i) = 1.0;

  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (idx_t p = 0; p < n; ++p)
      for (idx_t q = p + 1; q < n; ++q) off += a.at(p, q) * a.at(p, q);
    if (off < 1e-26) break;
    for (idx_t p = 0; p < n; ++p) {
      for (idx_t q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (idx_t k = 0; k < n; ++k) {
          const double akp = a.at(k, p), akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (idx_t k = 0; k < n; ++k) {
          const double apk = a.at(p, k), aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
        for (idx_t k = 0; k < n; ++k) {
          const double vkp = v.at(k, p), vkq = v.at(k, q);
          v.at(k, p) = c * vkp - s * vkq;
          v.at(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  EigResult out;
  out.vectors = v;
  out.values.resize(static_cast<std::size_t>(n));
  for (idx_t i = 0; i < n; ++i) out.values[static_cast<std::size_t>(i)] = a.at(i, i);
  return out;
}

// Q diag(f(lambda)) Q^T x: spectral application of a scalar function.
inline DenseMatrix spectral_apply(const EigResult& eig, const std::vector<double>& f_of_lambda,
                                  const DenseMatrix& x) {
  const idx_t n = eig.vectors.n_rows;
  DenseMatrix qtx(n, x.n_cols);
  for (idx_t i = 0; i < n; ++i)
    for (idx_t j = 0; j < x.n_cols; ++j) {
      double acc = 0.0;
      for (idx_t k = 0; k < n; ++k) acc += eig.vectors.at(k, i) * x.at(k, j);
      qtx.at(i, j) = acc;
    }
  for (idx_t i = 0; i < n; ++i)
    for (idx_t j = 0; j < x.n_cols; ++j) qtx.at(i, j) *= f_of_lambda[static_cast<std::size_t>(i)];
  DenseMatrix out(n, x.n_cols);
  for (idx_t i = 0; i < n; ++i)
    for (idx_t j = 0; j < x.n_cols; ++j) {
      double acc = 0.0;
      for (idx_t k = 0; k < n; ++k) acc += eig.vectors.at(i, k) * qtx.at(k, j);
      out.at(i, j) = acc;
    }
  return out;
}

// Independent scalar basis evaluations (explicit formulas, not the library
// recurrences).
inline double monomial_scalar(int k, double x) { return std::pow(x, k); }

inline double legendre_scalar(int k, double x) { return std::legendre(unsigned(k), x); }

// Explicit Jacobi sum P_n^{(a,b)}(x) =
//   sum_s C(n+a, n-s) C(n+b, s) ((x-1)/2)^s ((x+1)/2)^(n-s)
// with generalized binomials over real upper arguments.
inline double jacobi_scalar(int n, double a, double b, double x) {
  auto gen_binom = [](double z, int k) {
    double out = 1.0;
    for (int i = 0; i < k; ++i) out *= (z - i) / (k - i);
    return out;
  };
  double total = 0.0;
  for (int s = 0; s <= n; ++s)
    total += gen_binom(n + a, n - s) * gen_binom(n + b, s) *
             std::pow((x - 1.0) / 2.0, s) * std::pow((x + 1.0) / 2.0, n - s);
  return total;
}

}  // namespace testref
