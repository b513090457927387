// Acceptance suite: every release-gating behavior checked end to end, one
// line per criterion. Exits nonzero if any criterion fails. Criteria that
// need converted public datasets are checked when $H2SGNN_DATA_DIR provides
// them and otherwise fall back to the synthetic suite (6) or are skipped (7).

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "h2sgnn/config.hpp"
#include "h2sgnn/dataio.hpp"
#include "h2sgnn/errors.hpp"
#include "h2sgnn/filters.hpp"
#include "h2sgnn/oracle.hpp"
#include "h2sgnn/synthetic.hpp"
#include "h2sgnn/train.hpp"
#include "support/eig.hpp"
#include "support/finite_diff.hpp"
#include "support/fixtures.hpp"

using namespace h2sgnn;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---- 1: numeric Proposition 1 equivalence ---------------------------------
Outcome criterion1() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (int R = 1; R <= 4; ++R) {
    const Prop1Report report = run_oracle_check(R, 5, 5, 1e-8);
    for (double d : report.max_rel_discrepancy) worst = std::max(worst, d);
    if (!report.pass) return {false, "R=" + std::to_string(R) + " exceeded 1e-8"};
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 10.0) return {false, "took " + std::to_string(elapsed) + " s (limit 10)"};
  std::ostringstream ss;
  ss << "max discrepancy " << worst << ", " << elapsed << " s";
  return {true, ss.str()};
}

// ---- 2: filter-part counting formulas --------------------------------------
Outcome criterion2() {
  for (int R : {2, 3, 5}) {
    for (int K = 0; K <= 10; ++K) {
      std::int64_t geom = 0, pw = 1;
      for (int k = 0; k <= K; ++k) {
        geom += pw;
        pw *= R;
      }
      const std::int64_t K1 = K + 1;
      if (count_params(ParamVariant::Pshgcn, R, K) != geom) return {false, "pshgcn formula"};
      if (count_params(ParamVariant::Local, R, K) != R * K1) return {false, "local formula"};
      if (count_params(ParamVariant::Global, R, K) != R + K1) return {false, "global formula"};
      if (count_params(ParamVariant::Full, R, K) != (R + 1) * K1 + R)
        return {false, "full formula"};
      if (K <= 5) {
        // Brute-force enumeration of every word of length <= K.
        std::int64_t words = 0;
        std::function<void(int)> walk = [&](int remaining) {
          ++words;
          if (remaining == 0) return;
          for (int a = 0; a < R; ++a) walk(remaining - 1);
        };
        walk(K);
        if (count_terms_mnc(R, K) != words)
          return {false, "enumeration mismatch at R=" + std::to_string(R) +
                             " K=" + std::to_string(K)};
      }
    }
  }
  return {true, "exact for R in {2,3,5}, K in 0..10; enumeration cross-check K<=5"};
}

// ---- 3: gradients vs central finite differences -----------------------------
Outcome criterion3() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::string worst_at;
  for (BasisKind kind : {BasisKind::Monomial, BasisKind::Jacobi, BasisKind::Legendre}) {
    for (Variant variant : {Variant::Full, Variant::LocalOnly, Variant::GlobalOnly}) {
      for (std::uint64_t seed : {11ull, 22ull, 33ull}) {
        std::mt19937_64 rng(seed);
        const idx_t n = 12;
        auto subgraphs = testref::random_subgraphs(rng, 2, n, 0.35);
        DenseMatrix x = testref::random_dense(rng, n, 5);
        std::vector<int> labels;
        for (idx_t i = 0; i < n; ++i)
          labels.push_back(static_cast<int>(uniform_index(rng, 3)));
        std::vector<idx_t> mask = {0, 1, 2, 4, 6, 7, 9, 11};
        ModelConfig config = testref::small_config(2, 3, kind, variant, 4, 2);
        ModelParams params = testref::random_params(config, 5, 3, rng);

        ForwardTrace trace = forward(subgraphs, x, params, config, true);
        Gradients grads = backward(trace, labels, mask, params, config);
        auto loss = [&]() {
          const ForwardTrace t =
              forward(subgraphs, x, params, config, true, nullptr, false);
          return cross_entropy_loss(t.logits, labels, mask);
        };
        const testref::FdResult fd = testref::check_gradients(params, grads, loss, 1e-4);
        if (fd.max_rel_err > worst) {
          worst = fd.max_rel_err;
          worst_at = basis_kind_name(kind) + "/" + model_variant_name(variant) + "/" +
                     fd.worst_tensor;
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  if (worst > 1e-4) return {false, "max rel err " + std::to_string(worst) + " at " + worst_at};
  if (elapsed >= 30.0) return {false, "took " + std::to_string(elapsed) + " s (limit 30)"};
  std::ostringstream ss;
  ss << "max rel err " << worst << " (" << worst_at << "), " << elapsed << " s";
  return {true, ss.str()};
}

// ---- 4: basis identities ----------------------------------------------------
Outcome criterion4() {
  std::mt19937_64 rng(7);
  CsrMatrix a = sym_normalize(testref::random_symmetric_nonneg_csr(rng, 7, 0.5));
  DenseMatrix x = testref::random_dense(rng, 7, 3);
  LinearOp op = [&a](const DenseMatrix& v) { return spmm(a, v); };
  const BasisStack jac = propagate_basis(FilterBasis{BasisKind::Jacobi, 0.0, 0.0}, op, x, 8);
  const BasisStack leg = propagate_basis(FilterBasis{BasisKind::Legendre}, op, x, 8);
  double worst = 0.0;
  for (std::size_t k = 0; k < jac.terms.size(); ++k) {
    const double denom = std::max(1.0, max_abs(leg.terms[k]));
    worst = std::max(worst, max_abs_diff(jac.terms[k], leg.terms[k]) / denom);
  }
  if (worst > 1e-10) return {false, "Jacobi(0,0) vs Legendre drift " + std::to_string(worst)};

  for (double c : {-1.0, -0.4, 0.0, 0.3, 0.5, 1.0}) {
    DenseMatrix one = DenseMatrix::from_rows({{1.0}});
    LinearOp sop = [c](const DenseMatrix& v) { return scaled(v, c); };
    const BasisStack stack = propagate_basis(FilterBasis{BasisKind::Legendre}, sop, one, 3);
    const double p2 = (3.0 * c * c - 1.0) / 2.0;
    const double p3 = (5.0 * c * c * c - 3.0 * c) / 2.0;
    if (std::abs(stack.terms[2].at(0, 0) - p2) > 1e-12) return {false, "P2 closed form"};
    if (std::abs(stack.terms[3].at(0, 0) - p3) > 1e-12) return {false, "P3 closed form"};
  }
  std::ostringstream ss;
  ss << "Jacobi(0,0)=Legendre to " << worst << "; P2/P3 closed forms to 1e-12";
  return {true, ss.str()};
}

// ---- 5: spectral consistency ------------------------------------------------
Outcome criterion5() {
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (BasisKind kind : {BasisKind::Monomial, BasisKind::Jacobi, BasisKind::Legendre}) {
    const FilterBasis basis{kind, 1.0, 1.0};
    for (int trial = 0; trial < 10; ++trial) {
      const idx_t n = 3 + static_cast<idx_t>(uniform_index(rng, 6));
      DenseMatrix sym(n, n);
      for (idx_t i = 0; i < n; ++i)
        for (idx_t j = i; j < n; ++j) {
          const double v = uniform(rng, -1.0, 1.0);
          sym.at(i, j) = v;
          sym.at(j, i) = v;
        }
      testref::EigResult eig = testref::symmetric_eig(sym);
      double radius = 0.0;
      for (double lambda : eig.values) radius = std::max(radius, std::abs(lambda));
      const double s = radius > 0 ? 0.9 / radius : 1.0;
      for (double& v : sym.data) v *= s;
      eig = testref::symmetric_eig(sym);

      DenseMatrix x = testref::random_dense(rng, n, 2);
      std::vector<double> coeffs;
      for (int k = 0; k <= 5; ++k) coeffs.push_back(uniform(rng, -1.0, 1.0));
      LinearOp op = [&sym](const DenseMatrix& v) { return testref::dense_matmul(sym, v); };
      const DenseMatrix got = contract_stack(propagate_basis(basis, op, x, 5), coeffs);

      std::vector<double> h;
      for (double lambda : eig.values) {
        double acc = 0.0;
        for (int k = 0; k <= 5; ++k) {
          double b = 0.0;
          switch (kind) {
            case BasisKind::Monomial: b = testref::monomial_scalar(k, lambda); break;
            case BasisKind::Jacobi: b = testref::jacobi_scalar(k, 1.0, 1.0, lambda); break;
            case BasisKind::Legendre: b = testref::legendre_scalar(k, lambda); break;
          }
          acc += coeffs[static_cast<std::size_t>(k)] * b;
        }
        h.push_back(acc);
      }
      const DenseMatrix want = testref::spectral_apply(eig, h, x);
      const double denom = std::max(1.0, max_abs(want));
      worst = std::max(worst, max_abs_diff(got, want) / denom);
    }
  }
  if (worst > 1e-8) return {false, "spectral mismatch " + std::to_string(worst)};
  std::ostringstream ss;
  ss << "recurrence vs eigendecomposition within " << worst;
  return {true, ss.str()};
}

// ---- 6 & 7 helpers: CLI invocation and converted datasets -------------------
std::pair<int, std::string> run_cli(const std::string& args) {
  const std::string cmd = std::string(H2SGNN_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string text;
  std::array<char, 4096> buf;
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) text.append(buf.data(), got);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, text};
}

bool dataset_available(const std::string& name) {
  const char* root = std::getenv("H2SGNN_DATA_DIR");
  if (!root) return false;
  return fs::is_directory(fs::path(root) / name);
}

struct HomophilyExpect {
  std::string dataset;
  std::string metapath_arg;
  std::string name;
  double percent;
};

// Meta-path relation names follow the converter recipe documented in the
// README.
const std::vector<HomophilyExpect> kPublishedHomophily = {
    {"acm", "PAP=pa,pa_rev", "PAP", 81.45},
    {"acm", "PCP=pc,pc_rev", "PCP", 64.03},
    {"acm", "PKP=pk,pk_rev", "PKP", 33.38},
    {"dblp", "APA=ap,ap_rev", "APA", 87.22},
    {"dblp", "APTPA=ap,pt,pt_rev,ap_rev", "APTPA", 32.49},
    {"dblp", "APVPA=ap,pv,pv_rev,ap_rev", "APVPA", 67.00},
    {"imdb", "MDM=md,md_rev", "MDM", 40.44},
    {"imdb", "MAM=ma,ma_rev", "MAM", 17.26},
    {"imdb", "MKM=mk,mk_rev", "MKM", 13.39},
    {"aminer", "PAP=pa,pa_rev", "PAP", 97.16},
    {"aminer", "PRP=pr,pr_rev", "PRP", 86.80},
};

Outcome criterion6(const fs::path& scratch) {
  const bool any_real = dataset_available("acm") || dataset_available("dblp") ||
                        dataset_available("imdb") || dataset_available("aminer");
  if (any_real) {
    std::ostringstream detail;
    for (const HomophilyExpect& expect : kPublishedHomophily) {
      if (!dataset_available(expect.dataset)) continue;
      const auto [code, csv] =
          run_cli("homophily --data " + expect.dataset + " --metapath " + expect.metapath_arg);
      if (code != 0) return {false, expect.dataset + " homophily command failed"};
      std::istringstream lines(csv);
      std::string line;
      std::getline(lines, line);  // header
      double got = -1.0;
      while (std::getline(lines, line)) {
        const auto comma = line.find(',');
        if (line.substr(0, comma) == expect.name) got = std::stod(line.substr(comma + 1));
      }
      if (std::abs(got - expect.percent) > 0.5)
        return {false, expect.dataset + " " + expect.name + ": got " + std::to_string(got) +
                           ", published " + std::to_string(expect.percent)};
      detail << expect.dataset << "/" << expect.name << "=" << got << " ";
    }
    return {true, "published values reproduced within 0.5pp: " + detail.str()};
  }

  // Fallback: the synthetic suite must pass exactly.
  const std::string chain = (scratch / "chain4").string();
  auto [c1, _1] = run_cli("make-fixture --kind chain4 --out-dir " + chain);
  if (c1 != 0) return {false, "chain4 fixture failed"};
  auto [c2, csv2] = run_cli("homophily --data " + chain + " --metapath E=e");
  if (c2 != 0 || csv2 != "metapath,homophily_pct\nE,66.67\n")
    return {false, "chain4 expected E,66.67"};

  const std::string uni = (scratch / "uniform").string();
  auto [c3, _3] = run_cli("make-fixture --kind uniform-label --nodes 40 --out-dir " + uni);
  if (c3 != 0) return {false, "uniform fixture failed"};
  auto [c4, csv4] = run_cli("homophily --data " + uni +
                            " --metapath IGI=ig,ig_rev --metapath IMI=im,im_rev");
  if (c4 != 0 || csv4 != "metapath,homophily_pct\nIGI,100.00\nIMI,100.00\n")
    return {false, "uniform-label expected 100.00"};

  const std::string sep = (scratch / "separable").string();
  auto [c5, _5] = run_cli("make-fixture --kind separable --out-dir " + sep + " --seed 1");
  if (c5 != 0) return {false, "separable fixture failed"};
  auto [c6, csv6] = run_cli("homophily --data " + sep +
                            " --metapath IGI=ig,ig_rev --metapath IMI=im,im_rev");
  if (c6 != 0 || csv6 != "metapath,homophily_pct\nIGI,100.00\nIMI,0.00\n")
    return {false, "separable expected IGI=100.00 IMI=0.00"};

  return {true, "converted datasets absent; synthetic suite exact "
                "(chain4 66.67, uniform 100.00, separable 100.00/0.00)"};
}

Outcome criterion7() {
  struct Expect {
    const char* name;
    idx_t nodes;
    idx_t edges;
  };
  const std::vector<Expect> expects = {{"acm", 10942, 547872}, {"dblp", 26128, 239566}};
  bool any = false;
  std::ostringstream detail;
  for (const Expect& e : expects) {
    if (!dataset_available(e.name)) continue;
    any = true;
    const DatasetBundle bundle = load_dataset(resolve_dataset_dir(e.name));
    // total_edges() counts materialized reverses too; statistics refer to
    // the declared relation files.
    idx_t declared = 0;
    for (const Relation& r : bundle.graph.relations)
      if (!r.name.ends_with("_rev")) declared += r.adj.nnz();
    if (bundle.graph.total_nodes() != e.nodes)
      return {false, std::string(e.name) + " nodes " +
                         std::to_string(bundle.graph.total_nodes()) + " != " +
                         std::to_string(e.nodes)};
    if (declared != e.edges)
      return {false, std::string(e.name) + " edges " + std::to_string(declared) +
                         " != " + std::to_string(e.edges)};
    detail << e.name << " ok ";
  }
  if (!any) return {true, "SKIP: converted acm/dblp not present under $H2SGNN_DATA_DIR"};
  return {true, detail.str()};
}

// ---- 8: end-to-end learning sanity ------------------------------------------
Outcome criterion8() {
  const auto start = Clock::now();
  SyntheticSpec spec;
  spec.seed = 1;  // 200 nodes, homophilic IGI + heterophilic IMI
  const DatasetBundle data = make_fixture(spec);

  ModelConfig cfg;
  cfg.order = 3;
  cfg.metapaths = fixture_metapaths(FixtureKind::Separable);
  cfg.local_basis = {FilterBasis{BasisKind::Monomial}};
  cfg.global_basis = FilterBasis{BasisKind::Monomial};
  cfg.hidden_dim = 16;
  cfg.num_mlp_layers = 2;
  cfg.dropout = 0.1;

  TrainHyper hyper;
  hyper.adam.lr = 0.01;
  hyper.adam.lr_coeffs = 0.05;
  hyper.epochs = 500;
  hyper.patience = 100;
  hyper.seed = 0;

  const TrainReport report = train(data, cfg, SubgraphOptions{}, hyper);
  const double elapsed = seconds_since(start);
  if (report.test_micro_f1 < 0.95)
    return {false, "test micro-F1 " + std::to_string(report.test_micro_f1) + " < 0.95"};
  if (elapsed >= 60.0) return {false, "took " + std::to_string(elapsed) + " s (limit 60)"};

  // Learned filter shapes: low-pass on the homophilic path only.
  const std::vector<double> ends = {0.0, 2.0};
  auto response_gap = [&](int path) {
    std::vector<double> alpha_row;
    for (int k = 0; k <= cfg.order; ++k) alpha_row.push_back(report.alpha.at(path, k));
    const auto resp = frequency_response(cfg.basis_for(path), alpha_row, ends);
    return resp[0].second - resp[1].second;  // h(0) - h(2)
  };
  const double homo_gap = response_gap(0);  // IGI
  const double het_gap = response_gap(1);   // IMI
  if (!(homo_gap > 0.0))
    return {false, "homophilic filter not low-pass (h(0)-h(2)=" + std::to_string(homo_gap) + ")"};
  if (het_gap > 0.0)
    return {false, "heterophilic filter came out low-pass (h(0)-h(2)=" +
                       std::to_string(het_gap) + ")"};
  std::ostringstream ss;
  ss << "micro-F1 " << report.test_micro_f1 << " at epoch " << report.best_epoch << ", "
     << elapsed << " s; filter gaps " << homo_gap << " / " << het_gap;
  return {true, ss.str()};
}

// ---- 9: benchmark-table reproduction is a documented stretch goal -----------
Outcome criterion9() {
  return {true, "full benchmark tables are a documented stretch goal (see README), "
                "not asserted here"};
}

// ---- 10: term blowup ratio --------------------------------------------------
Outcome criterion10() {
  const std::int64_t words = count_terms_mnc(3, 7);
  const std::int64_t items = count_items(ParamVariant::Full, 3, 7);
  if (words != 3280) return {false, "expected 3280 words"};
  if (items != 32) return {false, "expected 32 items"};
  if (!(words > 100 * items)) return {false, "ratio not above 100x"};
  std::ostringstream ss;
  ss << words << " words vs " << items << " items (" << static_cast<double>(words) / items
     << "x)";
  return {true, ss.str()};
}

}  // namespace

int main() {
  fs::path scratch =
      fs::temp_directory_path() / ("h2sgnn_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  struct Entry {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> entries = {
      {1, "global-filter/word-expansion equivalence", [] { return criterion1(); }},
      {2, "parameter and term counting formulas", [] { return criterion2(); }},
      {3, "gradients vs central finite differences", [] { return criterion3(); }},
      {4, "Jacobi(0,0)=Legendre and closed forms", [] { return criterion4(); }},
      {5, "recurrence matches eigendecomposition", [] { return criterion5(); }},
      {6, "meta-path homophily values", [&] { return criterion6(scratch); }},
      {7, "converted dataset statistics", [] { return criterion7(); }},
      {8, "end-to-end learning sanity and filter shapes", [] { return criterion8(); }},
      {9, "benchmark-table reproduction policy", [] { return criterion9(); }},
      {10, "term blowup ratio at R=3, K=7", [] { return criterion10(); }},
  };

  int failures = 0;
  for (const Entry& entry : entries) {
    Outcome outcome;
    try {
      outcome = entry.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] criterion %2d: %s: %s\n", outcome.pass ? "PASS" : "FAIL", entry.id,
                entry.title, outcome.detail.c_str());
  }
  fs::remove_all(scratch);
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
