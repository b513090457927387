#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "h2sgnn/dense.hpp"

namespace h2sgnn {

enum class BasisKind { Monomial, Jacobi, Legendre };

BasisKind parse_basis_kind(const std::string& name);
std::string basis_kind_name(BasisKind kind);

// Polynomial basis used for filtering. a/b are Jacobi shape parameters and
// are ignored by the other two kinds.
struct FilterBasis {
  BasisKind kind = BasisKind::Monomial;
  double a = 1.0;
  double b = 1.0;

  void validate() const;  // Jacobi needs a > -1 and b > -1
  bool operator==(const FilterBasis&) const = default;
};

// terms[k] = basis_k(M) * X for a linear operator M, all of X's shape.
struct BasisStack {
  int order = -1;  // -1: empty
  std::vector<DenseMatrix> terms;

  bool empty() const { return terms.empty(); }
};

// Contract v -> M * v. Implementations must preserve the row count and be
// safe for concurrent invocation (or the caller serializes).
using LinearOp = std::function<DenseMatrix(const DenseMatrix&)>;

// Propagates the three-term recurrence of the basis through `apply`,
// touching only n x d panels; no n x n matrix is ever formed here.
BasisStack propagate_basis(const FilterBasis& basis, const LinearOp& apply, const DenseMatrix& x,
                           int order);

// Scalar basis values (basis_0(x), ..., basis_order(x)) via the same
// recurrences with a scalar argument.
std::vector<double> basis_values(const FilterBasis& basis, double x, int order);

// sum_k coeffs[k] * basis_k evaluated at the adjacency eigenvalue 1 - lambda
// for each Laplacian eigenvalue sample lambda in [0, 2].
std::vector<std::pair<double, double>> frequency_response(
    const FilterBasis& basis, std::span<const double> coeffs,
    std::span<const double> laplacian_eigenvalue_samples);

// sum_k coeffs[k] * stack.terms[k]
DenseMatrix contract_stack(const BasisStack& stack, std::span<const double> coeffs);

// Recurrence coefficients for step k >= 2:
//   P_k = c_x * (M P_{k-1}) + c_one * P_{k-1} - c_prev * P_{k-2}
// and for the seed step P_1 = seed_one * P_0 + seed_x * (M P_0).
// Shared by forward propagation, scalar evaluation and reverse-mode code.
struct RecurrenceStep {
  double c_x = 0.0;
  double c_one = 0.0;
  double c_prev = 0.0;
};
RecurrenceStep recurrence_step(const FilterBasis& basis, int k);
void seed_coeffs(const FilterBasis& basis, double& seed_one, double& seed_x);

}  // namespace h2sgnn
