#include <doctest.h>

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "rsc/experiment.hpp"
#include "rsc/matrix_io.hpp"

using namespace rsc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("rsc_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kTinyConfig = R"({
  "name": "tiny",
  "model": {
    "ambient_dim": 30,
    "noise_sigma": 0.2,
    "seed": 5,
    "subspaces": [{"dim": 3, "density": 4.0}, {"dim": 3, "density": 4.0}]
  },
  "method": "lasso",
  "lambda_multipliers": [0.5, 1.0],
  "samples_per_dim_class": 6,
  "seed": 11
})";

}  // namespace

TEST_CASE("csv matrices round-trip at full precision") {
  TempDir tmp;
  Eigen::MatrixXd m(3, 4);
  m.setRandom();
  m(0, 0) = 1.0 / 3.0;
  m(2, 3) = -7.25e-13;
  fs::path p = tmp.path / "m.csv";
  save_matrix_csv(p, m);
  Eigen::MatrixXd back = load_matrix_csv(p);
  CHECK(back == m);  // 17 significant digits restore doubles bitwise
}

TEST_CASE("csv loader rejects broken input with the line number") {
  TempDir tmp;
  fs::path p = tmp.path / "bad.csv";
  {
    std::ofstream out(p);
    out << "1,2,3\n4,nan,6\n";
  }
  try {
    load_matrix_csv(p);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  {
    std::ofstream out(p);
    out << "1,2,3\n4,5\n";
  }
  try {
    load_matrix_csv(p);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("binary matrices round-trip bitwise and validate the magic") {
  TempDir tmp;
  Eigen::MatrixXd m(5, 2);
  m.setRandom();
  fs::path p = tmp.path / "m.bin";
  save_matrix_binary(p, m);
  CHECK(slurp(p).substr(0, 4) == "SSCM");
  CHECK(load_matrix_binary(p) == m);

  {
    std::ofstream out(tmp.path / "junk.bin", std::ios::binary);
    out << "NOPE";
  }
  CHECK_THROWS_AS(load_matrix_binary(tmp.path / "junk.bin"), ParseError);
  CHECK_THROWS_AS(load_matrix_binary(tmp.path / "missing.bin"), IoError);
}

TEST_CASE("extension dispatch picks the format") {
  TempDir tmp;
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 3, 4;
  save_matrix(tmp.path / "a.csv", m);
  save_matrix(tmp.path / "a.bin", m);
  CHECK(slurp(tmp.path / "a.bin").substr(0, 4) == "SSCM");
  CHECK(load_matrix(tmp.path / "a.csv") == m);
  CHECK(load_matrix(tmp.path / "a.bin") == m);
}

TEST_CASE("label files round-trip") {
  TempDir tmp;
  std::vector<int> labels = {0, 2, 1, 1, 0};
  save_labels(tmp.path / "l.txt", labels);
  CHECK(load_labels(tmp.path / "l.txt") == labels);
}

TEST_CASE("experiment config parsing and validation") {
  ExperimentConfig c = parse_experiment_config(kTinyConfig);
  CHECK(c.name == "tiny");
  CHECK(c.model.ambient_dim == 30);
  CHECK(c.model.subspaces.size() == 2);
  CHECK(c.lambda_multipliers == std::vector<double>{0.5, 1.0});
  CHECK(c.seed == 11);

  CHECK_THROWS_AS(parse_experiment_config("not json"), ParseError);
  CHECK_THROWS_AS(parse_experiment_config("{}"), ParseError);

  // Multipliers and fixed lambdas are mutually exclusive.
  std::string both = kTinyConfig;
  both.insert(both.rfind('}'), ", \"lambdas\": [0.1]");
  CHECK_THROWS_AS(parse_experiment_config(both), InvalidConfigError);
}

TEST_CASE("config hash is stable and sensitive") {
  ExperimentConfig a = parse_experiment_config(kTinyConfig);
  ExperimentConfig b = a;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.model.noise_sigma = 0.21;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("results table round-trips through its csv form") {
  TempDir tmp;
  ResultTable t;
  t.hash = "00aabbccddeeff11";
  t.seed = 99;
  ResultRow r;
  r.experiment = "x";
  r.lambda_multiplier = 0.75;
  r.fpr = 0.001;
  r.tpr = 0.5;
  r.clustering_error = 2.5;
  r.l_hat = 3;
  t.rows.push_back(r);
  write_results_csv(tmp.path / "results.csv", t);
  ResultTable back = read_results_csv(tmp.path / "results.csv");
  CHECK(back.hash == t.hash);
  CHECK(back.seed == t.seed);
  REQUIRE(back.rows.size() == 1);
  CHECK(back.rows[0].lambda_multiplier == 0.75);
  CHECK(back.rows[0].l_hat == 3);
}

TEST_CASE("experiment runs are deterministic across worker counts") {
  ExperimentConfig cfg = parse_experiment_config(kTinyConfig);
  TempDir d1, d2, d3;
  cfg.workers = 1;
  run_experiment(cfg, d1.path);
  run_experiment(cfg, d2.path);
  cfg.workers = 8;
  run_experiment(cfg, d3.path);
  std::string one = slurp(d1.path / "results.csv");
  CHECK(one == slurp(d2.path / "results.csv"));
  CHECK(one == slurp(d3.path / "results.csv"));
  CHECK(one.rfind("# config_hash=", 0) == 0);
}

TEST_CASE("stale results are protected unless forced") {
  ExperimentConfig cfg = parse_experiment_config(kTinyConfig);
  TempDir tmp;
  run_experiment(cfg, tmp.path);
  ExperimentConfig changed = cfg;
  changed.model.noise_sigma = 0.25;
  CHECK_THROWS_AS(run_experiment(changed, tmp.path), IoError);
  CHECK_NOTHROW(run_experiment(changed, tmp.path, /*force=*/true));
  // Same config overwrites freely.
  CHECK_NOTHROW(run_experiment(changed, tmp.path));
}

TEST_CASE("svg charts are rendered from the stored results") {
  ExperimentConfig cfg = parse_experiment_config(kTinyConfig);
  TempDir tmp;
  run_experiment(cfg, tmp.path, false, /*svg=*/true);
  for (const char* name : {"rates.svg", "roc.svg"}) {
    std::string svg = slurp(tmp.path / name);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
  }
}

TEST_CASE("clustering mode records the estimated cluster count") {
  ExperimentConfig cfg = parse_experiment_config(kTinyConfig);
  cfg.cluster = true;
  cfg.lambda_multipliers = {1.0};
  TempDir tmp;
  ResultTable t = run_experiment(cfg, tmp.path);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].l_hat >= 1);
  CHECK(t.rows[0].clustering_error >= 0.0);
  CHECK(t.rows[0].clustering_error <= 100.0);
}
