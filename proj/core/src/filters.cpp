#include "h2sgnn/filters.hpp"

#include <algorithm>
#include <cctype>

#include "h2sgnn/errors.hpp"

namespace h2sgnn {

BasisKind parse_basis_kind(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  // "gprgnn" is accepted as the common name of the monomial basis.
  if (s == "monomial" || s == "gprgnn") return BasisKind::Monomial;
  if (s == "jacobi") return BasisKind::Jacobi;
  if (s == "legendre") return BasisKind::Legendre;
  throw ArgumentError("unknown basis kind: " + name);
}

std::string basis_kind_name(BasisKind kind) {
  switch (kind) {
    case BasisKind::Monomial: return "monomial";
    case BasisKind::Jacobi: return "jacobi";
    case BasisKind::Legendre: return "legendre";
  }
  throw ArgumentError("invalid basis kind");
}

void FilterBasis::validate() const {
  if (kind == BasisKind::Jacobi && (a <= -1.0 || b <= -1.0))
    throw ArgumentError("Jacobi basis requires a > -1 and b > -1");
}

void seed_coeffs(const FilterBasis& basis, double& seed_one, double& seed_x) {
  switch (basis.kind) {
    case BasisKind::Monomial:
    case BasisKind::Legendre:
      seed_one = 0.0;
      seed_x = 1.0;
      return;
    case BasisKind::Jacobi:
      seed_one = 0.5 * basis.a - 0.5 * basis.b;
      seed_x = 0.5 * basis.a + 0.5 * basis.b + 1.0;
      return;
  }
  throw ArgumentError("invalid basis kind");
}

RecurrenceStep recurrence_step(const FilterBasis& basis, int k) {
  RecurrenceStep s;
  switch (basis.kind) {
    case BasisKind::Monomial:
      s.c_x = 1.0;
      return s;
    case BasisKind::Legendre: {
      // k P_k = (2k - 1) x P_{k-1} - (k - 1) P_{k-2}
      const double kk = static_cast<double>(k);
      s.c_x = (2.0 * kk - 1.0) / kk;
      s.c_prev = (kk - 1.0) / kk;
      return s;
    }
    case BasisKind::Jacobi: {
      const double a = basis.a, b = basis.b;
      const double kk = static_cast<double>(k);
      const double t = 2.0 * kk + a + b;  // 2k + a + b
      const double denom = 2.0 * kk * (kk + a + b) * (t - 2.0);
      s.c_x = (t - 1.0) * t * (t - 2.0) / denom;
      s.c_one = (t - 1.0) * (a * a - b * b) / denom;
      s.c_prev = (kk + a - 1.0) * (kk + b - 1.0) * t / (kk * (kk + a + b) * (t - 2.0));
      return s;
    }
  }
  throw ArgumentError("invalid basis kind");
}

BasisStack propagate_basis(const FilterBasis& basis, const LinearOp& apply, const DenseMatrix& x,
                           int order) {
  basis.validate();
  if (order < 0) throw ArgumentError("propagate_basis: order must be >= 0");
  BasisStack stack;
  stack.order = order;
  stack.terms.reserve(static_cast<std::size_t>(order) + 1);
  stack.terms.push_back(x);  // P_0 = 1 for every supported basis
  auto checked_apply = [&](const DenseMatrix& v) {
    DenseMatrix out = apply(v);
    if (out.n_rows != v.n_rows)
      throw ShapeError("propagate_basis: operator changed the row count");
    return out;
  };
  if (order >= 1) {
    double seed_one = 0.0, seed_x = 0.0;
    seed_coeffs(basis, seed_one, seed_x);
    DenseMatrix p1 = checked_apply(x);
    scale_inplace(p1, seed_x);
    if (seed_one != 0.0) axpy(seed_one, x, p1);
    stack.terms.push_back(std::move(p1));
  }
  for (int k = 2; k <= order; ++k) {
    const RecurrenceStep s = recurrence_step(basis, k);
    DenseMatrix pk = checked_apply(stack.terms[static_cast<std::size_t>(k) - 1]);
    scale_inplace(pk, s.c_x);
    if (s.c_one != 0.0) axpy(s.c_one, stack.terms[static_cast<std::size_t>(k) - 1], pk);
    if (s.c_prev != 0.0) axpy(-s.c_prev, stack.terms[static_cast<std::size_t>(k) - 2], pk);
    stack.terms.push_back(std::move(pk));
  }
  return stack;
}

std::vector<double> basis_values(const FilterBasis& basis, double x, int order) {
  basis.validate();
  if (order < 0) throw ArgumentError("basis_values: order must be >= 0");
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(order) + 1);
  vals.push_back(1.0);
  if (order >= 1) {
    double seed_one = 0.0, seed_x = 0.0;
    seed_coeffs(basis, seed_one, seed_x);
    vals.push_back(seed_one + seed_x * x);
  }
  for (int k = 2; k <= order; ++k) {
    const RecurrenceStep s = recurrence_step(basis, k);
    vals.push_back((s.c_x * x + s.c_one) * vals[static_cast<std::size_t>(k) - 1] -
                   s.c_prev * vals[static_cast<std::size_t>(k) - 2]);
  }
  return vals;
}

std::vector<std::pair<double, double>> frequency_response(
    const FilterBasis& basis, std::span<const double> coeffs,
    std::span<const double> laplacian_eigenvalue_samples) {
  basis.validate();
  if (coeffs.empty()) throw ArgumentError("frequency_response: empty coefficient list");
  const int order = static_cast<int>(coeffs.size()) - 1;
  std::vector<std::pair<double, double>> out;
  out.reserve(laplacian_eigenvalue_samples.size());
  for (double lambda : laplacian_eigenvalue_samples) {
    if (lambda < 0.0 || lambda > 2.0)
      throw DomainError("frequency_response: eigenvalue sample outside [0, 2]");
    // L = I - A, so the adjacency eigenvalue paired with lambda is 1 - lambda.
    const std::vector<double> vals = basis_values(basis, 1.0 - lambda, order);
    double h = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) h += coeffs[k] * vals[k];
    out.emplace_back(lambda, h);
  }
  return out;
}

DenseMatrix contract_stack(const BasisStack& stack, std::span<const double> coeffs) {
  if (stack.empty()) throw ArgumentError("contract_stack: empty stack");
  if (coeffs.size() != stack.terms.size())
    throw ShapeError("contract_stack: coefficient count != stack terms");
  DenseMatrix out(stack.terms[0].n_rows, stack.terms[0].n_cols);
  for (std::size_t k = 0; k < coeffs.size(); ++k) axpy(coeffs[k], stack.terms[k], out);
  return out;
}

}  // namespace h2sgnn
