#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "h2sgnn/csr.hpp"

namespace h2sgnn {

// One word over the relation alphabet with a scalar coefficient. Relation
// indices are 0-based positions into the matrix list; the empty word is the
// identity term.
struct NcPolyTerm {
  std::vector<int> word;
  double coeff = 0.0;
};

// Multivariate non-commutative polynomial: sum of coefficient-weighted
// ordered matrix products. Words are kept in lexicographic order per length
// so reports are deterministic.
struct NcPolynomial {
  std::vector<NcPolyTerm> terms;
  int num_relations = 0;  // R
  int order = 0;          // K, maximum word length
};

// Number of words of length <= K over an alphabet of R symbols:
// (R^{K+1} - 1) / (R - 1), with the K + 1 limit at R = 1.
std::int64_t count_terms_mnc(int num_relations, int order);

enum class ParamVariant { Pshgcn, Local, Global, Full };
ParamVariant parse_variant(const std::string& name);  // ArgumentError on unknown
std::string variant_name(ParamVariant variant);

// Learnable-parameter count of the filter part for each model variant.
std::int64_t count_params(ParamVariant variant, int num_relations, int order);
// Number of distinct propagation terms the filter part evaluates.
std::int64_t count_items(ParamVariant variant, int num_relations, int order);

// All R^k words of length k; the coefficient of a word is the product of the
// beta entries it spells.
NcPolynomial expand_global_power(std::span<const double> beta, int k);

// sum over terms of coeff * A_{w_1} (A_{w_2} (... (A_{w_k} x))). Words are
// folded onto x as repeated sparse-dense products; no sparse-sparse product
// is ever formed.
DenseMatrix eval_ncpoly(const NcPolynomial& poly, std::span<const CsrMatrix> mats,
                        const DenseMatrix& x);

// Numeric check that monomial propagation over the beta-weighted operator
// sum reproduces, order by order, the expanded non-commutative polynomial.
struct Prop1Report {
  int num_relations = 0;
  int order = 0;
  double tol = 0.0;
  std::vector<double> max_rel_discrepancy;  // indexed by k in 0..K
  bool pass = false;
};

Prop1Report verify_proposition1(std::span<const CsrMatrix> mats, std::span<const double> beta,
                                int order, int trials, double tol, std::uint64_t seed = 0);

// Convenience wrapper for the CLI: random normalized instances per seed,
// aggregated worst-case discrepancies. base_seed offsets the instance
// stream.
Prop1Report run_oracle_check(int num_relations, int order, int num_seeds, double tol,
                             std::uint64_t base_seed = 0);

}  // namespace h2sgnn
