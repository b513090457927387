#include "h2sgnn/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "h2sgnn/errors.hpp"
#include "h2sgnn/filters.hpp"
#include "h2sgnn/rng.hpp"

namespace h2sgnn {

std::int64_t count_terms_mnc(int num_relations, int order) {
  if (num_relations < 1) throw ArgumentError("count_terms_mnc: R must be >= 1");
  if (order < 0) throw ArgumentError("count_terms_mnc: K must be >= 0");
  if (num_relations == 1) return static_cast<std::int64_t>(order) + 1;
  std::int64_t total = 0;
  std::int64_t power = 1;  // R^k
  for (int k = 0; k <= order; ++k) {
    total += power;
    power *= num_relations;
  }
  return total;
}

ParamVariant parse_variant(const std::string& name) {
  if (name == "pshgcn") return ParamVariant::Pshgcn;
  if (name == "local") return ParamVariant::Local;
  if (name == "global") return ParamVariant::Global;
  if (name == "full") return ParamVariant::Full;
  throw ArgumentError("unknown variant: " + name + " (expected pshgcn|local|global|full)");
}

std::string variant_name(ParamVariant variant) {
  switch (variant) {
    case ParamVariant::Pshgcn: return "pshgcn";
    case ParamVariant::Local: return "local";
    case ParamVariant::Global: return "global";
    case ParamVariant::Full: return "full";
  }
  throw ArgumentError("invalid variant");
}

std::int64_t count_params(ParamVariant variant, int num_relations, int order) {
  if (num_relations < 1) throw ArgumentError("count_params: R must be >= 1");
  if (order < 0) throw ArgumentError("count_params: K must be >= 0");
  const std::int64_t R = num_relations;
  const std::int64_t K1 = static_cast<std::int64_t>(order) + 1;
  switch (variant) {
    case ParamVariant::Pshgcn: return count_terms_mnc(num_relations, order);
    case ParamVariant::Local: return R * K1;
    case ParamVariant::Global: return R + K1;
    case ParamVariant::Full: return (R + 1) * K1 + R;
  }
  throw ArgumentError("invalid variant");
}

std::int64_t count_items(ParamVariant variant, int num_relations, int order) {
  if (num_relations < 1) throw ArgumentError("count_items: R must be >= 1");
  if (order < 0) throw ArgumentError("count_items: K must be >= 0");
  const std::int64_t R = num_relations;
  const std::int64_t K1 = static_cast<std::int64_t>(order) + 1;
  switch (variant) {
    case ParamVariant::Pshgcn: return count_terms_mnc(num_relations, order);
    case ParamVariant::Local: return R * K1;
    case ParamVariant::Global: return K1;
    case ParamVariant::Full: return (R + 1) * K1;
  }
  throw ArgumentError("invalid variant");
}

NcPolynomial expand_global_power(std::span<const double> beta, int k) {
  if (beta.empty()) throw ArgumentError("expand_global_power: empty beta");
  if (k < 0) throw ArgumentError("expand_global_power: k must be >= 0");
  const int R = static_cast<int>(beta.size());
  NcPolynomial poly;
  poly.num_relations = R;
  poly.order = k;
  // Counting in base R enumerates the words in lexicographic order.
  std::vector<int> word(static_cast<std::size_t>(k), 0);
  while (true) {
    double coeff = 1.0;
    for (int idx : word) coeff *= beta[static_cast<std::size_t>(idx)];
    poly.terms.push_back({word, coeff});
    int pos = k - 1;
    while (pos >= 0 && word[static_cast<std::size_t>(pos)] == R - 1) {
      word[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++word[static_cast<std::size_t>(pos)];
  }
  return poly;
}

DenseMatrix eval_ncpoly(const NcPolynomial& poly, std::span<const CsrMatrix> mats,
                        const DenseMatrix& x) {
  for (const CsrMatrix& m : mats) {
    if (m.n_rows != m.n_cols) throw ShapeError("eval_ncpoly: matrix not square");
    if (m.n_rows != x.n_rows) throw ShapeError("eval_ncpoly: matrix side != x rows");
    if (m.n_rows != mats[0].n_rows) throw ShapeError("eval_ncpoly: matrices differ in shape");
  }
  DenseMatrix out(x.n_rows, x.n_cols);
  for (const NcPolyTerm& term : poly.terms) {
    if (term.coeff == 0.0) continue;
    DenseMatrix panel = x;
    for (auto it = term.word.rbegin(); it != term.word.rend(); ++it) {
      const int idx = *it;
      if (idx < 0 || idx >= static_cast<int>(mats.size()))
        throw ArgumentError("eval_ncpoly: word index outside matrix list");
      panel = spmm(mats[static_cast<std::size_t>(idx)], panel);
    }
    axpy(term.coeff, panel, out);
  }
  return out;
}

Prop1Report verify_proposition1(std::span<const CsrMatrix> mats, std::span<const double> beta,
                                int order, int trials, double tol, std::uint64_t seed) {
  if (mats.empty()) throw ArgumentError("verify_proposition1: no matrices");
  if (mats.size() != beta.size())
    throw ArgumentError("verify_proposition1: beta length != matrix count");
  if (tol <= 0.0) throw ArgumentError("verify_proposition1: tol must be positive");
  if (trials < 1) throw ArgumentError("verify_proposition1: trials must be >= 1");

  Prop1Report report;
  report.num_relations = static_cast<int>(mats.size());
  report.order = order;
  report.tol = tol;
  report.max_rel_discrepancy.assign(static_cast<std::size_t>(order) + 1, 0.0);

  const idx_t n = mats[0].n_rows;
  std::vector<const CsrMatrix*> mat_ptrs;
  for (const CsrMatrix& m : mats) mat_ptrs.push_back(&m);
  LinearOp global = [&](const DenseMatrix& v) {
    DenseMatrix out(v.n_rows, v.n_cols);
    for (std::size_t i = 0; i < mat_ptrs.size(); ++i)
      axpy(beta[i], spmm(*mat_ptrs[i], v), out);
    return out;
  };
  FilterBasis monomial{BasisKind::Monomial, 0.0, 0.0};

  // The expansions depend on beta only, not on the trial draw.
  std::vector<NcPolynomial> expansions;
  expansions.reserve(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= order; ++k) expansions.push_back(expand_global_power(beta, k));

  std::mt19937_64 gen(seed);
  for (int trial = 0; trial < trials; ++trial) {
    DenseMatrix x(n, 3);
    for (double& v : x.data) v = uniform(gen, -1.0, 1.0);
    const BasisStack stack = propagate_basis(monomial, global, x, order);
    for (int k = 0; k <= order; ++k) {
      const DenseMatrix expected =
          eval_ncpoly(expansions[static_cast<std::size_t>(k)], mats, x);
      const double denom = std::max(max_abs(expected), 1e-12);
      const double rel =
          max_abs_diff(stack.terms[static_cast<std::size_t>(k)], expected) / denom;
      report.max_rel_discrepancy[static_cast<std::size_t>(k)] =
          std::max(report.max_rel_discrepancy[static_cast<std::size_t>(k)], rel);
    }
  }
  report.pass = std::all_of(report.max_rel_discrepancy.begin(), report.max_rel_discrepancy.end(),
                            [&](double d) { return d <= tol; });
  return report;
}

Prop1Report run_oracle_check(int num_relations, int order, int num_seeds, double tol,
                             std::uint64_t base_seed) {
  if (num_relations < 1) throw ArgumentError("oracle check: R must be >= 1");
  if (order < 0) throw ArgumentError("oracle check: K must be >= 0");
  if (num_seeds < 1) throw ArgumentError("oracle check: need at least one seed");

  Prop1Report aggregate;
  aggregate.num_relations = num_relations;
  aggregate.order = order;
  aggregate.tol = tol;
  aggregate.max_rel_discrepancy.assign(static_cast<std::size_t>(order) + 1, 0.0);
  aggregate.pass = true;

  const idx_t n = 6;
  for (int s = 0; s < num_seeds; ++s) {
    std::mt19937_64 gen(0x9e3779b97f4a7c15ull ^ (base_seed * 0x100000001b3ull) ^
                        static_cast<std::uint64_t>(s));
    std::vector<CsrMatrix> mats;
    std::vector<double> beta;
    for (int r = 0; r < num_relations; ++r) {
      // Random symmetric non-negative matrix, normalized so powers stay tame.
      std::vector<Triplet> trips;
      for (idx_t i = 0; i < n; ++i)
        for (idx_t j = i + 1; j < n; ++j)
          if (uniform_unit(gen) < 0.5) {
            const double w = uniform(gen, 0.2, 1.0);
            trips.push_back({i, j, w});
            trips.push_back({j, i, w});
          }
      trips.push_back({0, 1, 1.0});  // never fully empty
      trips.push_back({1, 0, 1.0});
      mats.push_back(sym_normalize(CsrMatrix::from_triplets(n, n, trips)));
      beta.push_back(uniform(gen, 0.25, 1.0));
    }
    const Prop1Report one =
        verify_proposition1(mats, beta, order, /*trials=*/3, tol, gen());
    for (std::size_t k = 0; k < one.max_rel_discrepancy.size(); ++k)
      aggregate.max_rel_discrepancy[k] =
          std::max(aggregate.max_rel_discrepancy[k], one.max_rel_discrepancy[k]);
    aggregate.pass = aggregate.pass && one.pass;
  }
  return aggregate;
}

}  // namespace h2sgnn
