#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "h2sgnn/checkpoint.hpp"
#include "h2sgnn/synthetic.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string stdout_text;
};

CmdResult run_cli(const std::string& args) {
  const std::string cmd = std::string(H2SGNN_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult result;
  std::array<char, 4096> buf;
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
    result.stdout_text.append(buf.data(), got);
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("h2sgnn_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("count-params emits the table row") {
  CmdResult full = run_cli("count-params --variant full -R 3 -K 7");
  REQUIRE(full.exit_code == 0);
  json j = json::parse(full.stdout_text);
  CHECK(j["params"] == 35);
  CHECK(j["items"] == 32);
  CHECK(j["mnc_terms"] == 3280);

  CmdResult pshgcn = run_cli("count-params --variant pshgcn -R 3 -K 7");
  REQUIRE(pshgcn.exit_code == 0);
  CHECK(json::parse(pshgcn.stdout_text)["params"] == 3280);

  CHECK(run_cli("count-params --variant bogus -R 2 -K 2").exit_code == 2);
  CHECK(run_cli("count-params -R 2").exit_code == 2);  // missing required -K
}

TEST_CASE("oracle-check passes and reports per-order discrepancies") {
  CmdResult r = run_cli("oracle-check -R 3 -K 4");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.stdout_text);
  CHECK(j["pass"] == true);
  CHECK(j["max_rel_discrepancy"].size() == 5);
  for (auto& [k, v] : j["max_rel_discrepancy"].items()) CHECK(v.get<double>() <= 1e-8);
}

TEST_CASE("make-fixture plus homophily") {
  TempDir tmp("fixture");
  SUBCASE("chain4 reproduces the hand-counted 66.67") {
    const std::string dir = (tmp.path / "chain").string();
    REQUIRE(run_cli("make-fixture --kind chain4 --out-dir " + dir).exit_code == 0);
    CmdResult r = run_cli("homophily --data " + dir + " --metapath E=e");
    REQUIRE(r.exit_code == 0);
    CHECK(r.stdout_text == "metapath,homophily_pct\nE,66.67\n");
  }
  SUBCASE("uniform labels give 100.00") {
    const std::string dir = (tmp.path / "uni").string();
    REQUIRE(run_cli("make-fixture --kind uniform-label --nodes 40 --out-dir " + dir)
                .exit_code == 0);
    CmdResult r = run_cli("homophily --data " + dir + " --metapath IGI=ig,ig_rev");
    REQUIRE(r.exit_code == 0);
    CHECK(r.stdout_text.find("IGI,100.00") != std::string::npos);
  }
  SUBCASE("invalid meta-path exits nonzero") {
    const std::string dir = (tmp.path / "bad").string();
    REQUIRE(run_cli("make-fixture --kind chain4 --out-dir " + dir).exit_code == 0);
    CHECK(run_cli("homophily --data " + dir + " --metapath X=unknown").exit_code != 0);
  }
  SUBCASE("adjacency convention flags cannot move the value") {
    const std::string dir = (tmp.path / "conv").string();
    REQUIRE(run_cli("make-fixture --kind separable --nodes 40 --out-dir " + dir + " --seed 5")
                .exit_code == 0);
    const std::string paths = " --metapath IGI=ig,ig_rev --metapath IMI=im,im_rev";
    CmdResult plain = run_cli("homophily --data " + dir + paths);
    CmdResult flags = run_cli("homophily --data " + dir + paths + " --binarize --keep-selfloops");
    REQUIRE(plain.exit_code == 0);
    REQUIRE(flags.exit_code == 0);
    CHECK(plain.stdout_text == flags.stdout_text);
  }
  SUBCASE("meta-paths can come from a config file") {
    const std::string dir = (tmp.path / "cfgsrc").string();
    REQUIRE(run_cli("make-fixture --kind separable --nodes 40 --out-dir " + dir).exit_code == 0);
    const std::string cfg = (tmp.path / "hom.json").string();
    std::ofstream out(cfg);
    out << R"({"metapaths": [{"name": "IGI", "relations": ["ig", "ig_rev"]}]})";
    out.close();
    CmdResult r = run_cli("homophily --data " + dir + " --config " + cfg);
    REQUIRE(r.exit_code == 0);
    CHECK(r.stdout_text == "metapath,homophily_pct\nIGI,100.00\n");
  }
}

TEST_CASE("train is reproducible and eval agrees with its report") {
  TempDir tmp("train");
  const std::string fix = (tmp.path / "fix").string();
  REQUIRE(run_cli("make-fixture --kind separable --nodes 60 --group-size 5 --out-dir " + fix +
                  " --seed 3")
              .exit_code == 0);
  const std::string cfg_path = (tmp.path / "cfg.json").string();
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({
      "dataset": ")" << fix << R"(",
      "metapaths": [
        {"name": "IGI", "relations": ["ig", "ig_rev"]},
        {"name": "IMI", "relations": ["im", "im_rev"]}
      ],
      "order": 2, "hidden_dim": 8, "dropout": 0.1,
      "lr": 0.02, "lr_coeffs": 0.05, "epochs": 60, "patience": -1,
      "seeds": [7],
      "output_dir": ")" << (tmp.path / "runs").string() << R"("
    })";
  }
  CmdResult first = run_cli("train --config " + cfg_path);
  REQUIRE(first.exit_code == 0);
  const std::string aggregate_first = first.stdout_text;
  json j = json::parse(aggregate_first);
  CHECK(j["runs"].size() == 1);
  CHECK(j["test_micro_f1"]["mean"].get<double>() >= 0.0);

  CmdResult second = run_cli("train --config " + cfg_path);
  REQUIRE(second.exit_code == 0);
  CHECK(second.stdout_text == aggregate_first);  // bit-for-bit reproducible

  const std::string ckpt = (tmp.path / "runs" / "checkpoint_seed7.json").string();
  REQUIRE(fs::exists(ckpt));
  CmdResult ev = run_cli("eval --checkpoint " + ckpt + " --data " + fix);
  REQUIRE(ev.exit_code == 0);
  json ej = json::parse(ev.stdout_text);
  CHECK(ej["test"]["micro_f1"].get<double>() ==
        doctest::Approx(j["runs"][0]["test_micro_f1"].get<double>()).epsilon(1e-12));

  SUBCASE("filter-response shape and debug flag") {
    CmdResult fr = run_cli("filter-response --checkpoint " + ckpt + " --samples 11");
    REQUIRE(fr.exit_code == 0);
    // header + (R + 1 global) * samples rows
    CHECK(count_lines(fr.stdout_text) == 1 + 3 * 11);

    CmdResult unit =
        run_cli("filter-response --checkpoint " + ckpt + " --samples 5 --force-unit-coeffs");
    REQUIRE(unit.exit_code == 0);
    std::istringstream lines(unit.stdout_text);
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
      const auto last_comma = line.rfind(',');
      CHECK(std::stod(line.substr(last_comma + 1)) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("corrupt checkpoint is a format error") {
    const std::string broken = (tmp.path / "broken.json").string();
    std::ofstream out(broken);
    out << "{\"format\": \"something-else\"}";
    out.close();
    CHECK(run_cli("eval --checkpoint " + broken + " --data " + fix).exit_code == 1);
  }
}

TEST_CASE("untrained checkpoint responses decay from lambda=0 to lambda=2") {
  // The decaying coefficient initialization is a low-pass prior, so the
  // curves of a freshly initialized model must slope downward.
  TempDir tmp("init");
  h2sgnn::ModelConfig cfg;
  cfg.order = 4;
  cfg.metapaths = h2sgnn::fixture_metapaths(h2sgnn::FixtureKind::Separable);
  cfg.local_basis = {h2sgnn::FilterBasis{h2sgnn::BasisKind::Monomial}};
  cfg.global_basis = h2sgnn::FilterBasis{h2sgnn::BasisKind::Monomial};
  cfg.hidden_dim = 8;
  std::mt19937_64 rng(1);
  h2sgnn::ModelParams params = h2sgnn::init_params(cfg, 8, 2, rng);
  const std::string ckpt = (tmp.path / "init.json").string();
  h2sgnn::save_checkpoint(ckpt, {cfg, h2sgnn::SubgraphOptions{}, params});

  CmdResult r = run_cli("filter-response --checkpoint " + ckpt + " --samples 3");
  REQUIRE(r.exit_code == 0);
  std::map<std::string, std::map<double, double>> curves;
  std::istringstream lines(r.stdout_text);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    const auto c1 = line.find(','), c2 = line.rfind(',');
    curves[line.substr(0, c1)][std::stod(line.substr(c1 + 1, c2 - c1 - 1))] =
        std::stod(line.substr(c2 + 1));
  }
  REQUIRE(curves.size() == 3);  // IGI, IMI, global
  for (auto& [name, curve] : curves) {
    CHECK(curve.at(0.0) == doctest::Approx(1.0).epsilon(1e-12));  // coefficients sum to 1
    CHECK(curve.at(0.0) > curve.at(2.0));
  }
}

TEST_CASE("--out writes the payload to a file") {
  TempDir tmp("out");
  const std::string out_path = (tmp.path / "row.json").string();
  CmdResult r = run_cli("count-params --variant global -R 2 -K 2 --out " + out_path);
  REQUIRE(r.exit_code == 0);
  CHECK(r.stdout_text.empty());
  std::ifstream in(out_path);
  json j = json::parse(in);
  CHECK(j["params"] == 5);
}

TEST_CASE("help and usage errors") {
  CHECK(run_cli("--help").exit_code == 0);
  for (const char* sub : {"homophily", "train", "eval", "filter-response", "count-params",
                          "oracle-check", "make-fixture"}) {
    CmdResult r = run_cli(std::string(sub) + " --help");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("--out") != std::string::npos);
  }
  CHECK(run_cli("count-params -R 2 -K 2 --no-such-flag").exit_code == 2);
  CHECK(run_cli("no-such-command").exit_code == 2);
}
