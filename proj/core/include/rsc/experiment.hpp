#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rsc/graph.hpp"
#include "rsc/metrics.hpp"
#include "rsc/model.hpp"
#include "rsc/regress.hpp"

namespace rsc {

/// One experiment: a model draw, a solver, a grid of penalty multipliers
/// (or fixed penalties), and the metrics to record. Loaded from JSON.
struct ExperimentConfig {
  std::string name = "experiment";
  ModelConfig model;
  std::string method = "lasso";  // lasso | two_step | dantzig | knn_baseline
  std::vector<double> lambda_multipliers;  // scale the per-column heuristic
  std::vector<double> lambdas;             // fixed-penalty grid (alternative)
  double alpha0 = 0.0;       // two_step rule; <= 0 selects the default
  double threshold = 1e-3;   // discovery threshold on |B_ij|
  int samples_per_dim_class = 100;
  bool cluster = false;      // run spectral clustering per grid point
  int clusters_override = 0; // 0 = eigengap estimate
  DimRule dim_rule = EnergyFraction{0.9};
  int knn_k = 5;
  double knn_temperature = 1.0;
  int workers = 1;
  std::uint64_t seed = 0;    // orchestration seed (sampling, k-means)
  bool timings = false;      // record wall clock in results.csv
  SolverOptions solver;

  void validate() const;
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);

/// Stable FNV-1a hash of the canonical JSON serialization.
std::string config_hash(const ExperimentConfig& config);

struct ResultRow {
  std::string experiment;
  double lambda_multiplier = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
  double clustering_error = std::numeric_limits<double>::quiet_NaN();
  int l_hat = 0;
  long wall_ms = 0;
  bool failed = false;
};

struct ResultTable {
  std::string hash;
  std::uint64_t seed = 0;
  std::vector<ResultRow> rows;
};

/// Runs the full sweep and writes results.csv and roc.csv under `out_dir`
/// (plus SVG charts when requested). Re-running into a directory whose
/// results carry a different config hash is refused unless `force`.
/// Output bytes are a pure function of (config, seed) for any worker count
/// when timings are off.
ResultTable run_experiment(const ExperimentConfig& config,
                           const std::filesystem::path& out_dir,
                           bool force = false, bool svg = false);

void write_results_csv(const std::filesystem::path& path,
                       const ResultTable& table);
ResultTable read_results_csv(const std::filesystem::path& path);

/// Line charts (penalty vs FPR/TPR, and the ROC curve) rendered from an
/// existing results.csv; no computation besides parsing the file.
void write_svg_charts(const std::filesystem::path& results_csv,
                      const std::filesystem::path& out_dir);

}  // namespace rsc
