// Command-line front end: data generation, sparse regression, spectral
// clustering, metrics, penalty sweeps, and the scalar asymptotics.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>

#include "rsc/asymptotics.hpp"
#include "rsc/experiment.hpp"
#include "rsc/graph.hpp"
#include "rsc/matrix_io.hpp"
#include "rsc/metrics.hpp"
#include "rsc/model.hpp"
#include "rsc/regress.hpp"
#include "rsc/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GenerateArgs {
  std::string config, out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool normalize = false;
};

struct RegressArgs {
  std::string data, out;
  std::string method = "lasso";
  double lambda = 0.0;
  double multiplier = 0.0;
  double sigma = -1.0;
  double alpha0 = 0.0;
  int workers = 1;
};

struct ClusterArgs {
  std::string coeffs, data, out;
  int clusters = 0;
  int knn_k = 0;
  double temperature = 1.0;
  std::uint64_t seed = 0;
};

struct EvaluateArgs {
  std::string pred, truth;
  std::string coeffs, labels;
  double threshold = 1e-3;
  int ambient = 0;
  std::string dims;  // comma-separated dimension per label
};

struct SweepArgs {
  std::string config, out;
  bool force = false;
  bool svg = false;
};

struct PipelineArgs {
  std::string config, out;
  double multiplier = 1.0;
  bool force = false;
  bool svg = false;
};

rsc::ExperimentConfig load_config(const std::string& path) {
  return rsc::load_experiment_config(path);
}

std::vector<int> dims_per_label(const rsc::ExperimentConfig& cfg) {
  std::vector<int> dims;
  for (const auto& s : cfg.model.subspaces) dims.push_back(s.dim);
  return dims;
}

int cmd_generate(const GenerateArgs& a) {
  rsc::ExperimentConfig cfg = load_config(a.config);
  if (a.seed_set) cfg.model.seed = a.seed;
  rsc::Dataset ds = rsc::generate(cfg.model);
  if (a.normalize) ds.data = rsc::normalize_columns(ds.data);

  fs::create_directories(a.out);
  rsc::save_matrix_binary(fs::path(a.out) / "Y.bin", ds.data.Y);
  rsc::save_matrix_binary(fs::path(a.out) / "clean.bin", *ds.data.clean);
  rsc::save_labels(fs::path(a.out) / "labels.txt", *ds.data.labels);

  json meta;
  meta["config_hash"] = rsc::config_hash(cfg);
  meta["ambient_dim"] = cfg.model.ambient_dim;
  meta["noise_sigma"] = cfg.model.noise_sigma;
  meta["seed"] = cfg.model.seed;
  json dims = json::array();
  for (const auto& s : cfg.model.subspaces) dims.push_back(s.dim);
  meta["subspace_dims"] = dims;
  std::ofstream out(fs::path(a.out) / "meta.json");
  out << meta.dump(2) << "\n";
  std::cout << "wrote " << ds.data.num_points() << " points of dimension "
            << ds.data.ambient_dim() << " to " << a.out << "\n";
  return 0;
}

int cmd_regress(const RegressArgs& a) {
  Eigen::MatrixXd Y = rsc::load_matrix(fs::path(a.data) / "Y.bin");
  rsc::RegressSpec spec;
  spec.solver = rsc::SolverOptions{};
  std::vector<double> per_column;

  std::ifstream meta_in(fs::path(a.data) / "meta.json");
  json meta;
  if (meta_in) meta_in >> meta;
  double sigma = a.sigma >= 0.0 ? a.sigma : meta.value("noise_sigma", 0.0);

  if (a.method == "lasso") {
    spec.method = rsc::RegressionMethod::Lasso;
    if (a.multiplier > 0.0) {
      std::vector<int> labels =
          rsc::load_labels(fs::path(a.data) / "labels.txt");
      std::vector<int> dims = meta.at("subspace_dims").get<std::vector<int>>();
      for (int l : labels)
        per_column.push_back(a.multiplier / std::sqrt(double(dims[l])));
    } else {
      spec.lambda = a.lambda;
    }
  } else if (a.method == "two_step") {
    spec.method = rsc::RegressionMethod::TwoStep;
    spec.sigma = sigma;
    spec.alpha0 = a.alpha0;
  } else if (a.method == "dantzig") {
    spec.method = rsc::RegressionMethod::Dantzig;
    spec.sigma = sigma;
    spec.lambda =
        a.lambda > 0.0
            ? a.lambda
            : (a.multiplier > 0.0 ? a.multiplier : 4.0) *
                  rsc::dantzig_lambda_heuristic(static_cast<int>(Y.rows()),
                                                sigma);
  } else {
    throw rsc::InvalidConfigError("unknown method '" + a.method + "'");
  }

  rsc::CoefficientMatrix B =
      rsc::regress_all(Y, spec, {}, a.workers, per_column);
  int failures = B.num_failures();
  if (failures > 0)
    std::cerr << "warning: " << failures << " columns failed\n";
  rsc::save_matrix_binary(a.out, Eigen::MatrixXd(B.B));
  std::cout << "wrote coefficient matrix (" << B.B.nonZeros()
            << " nonzeros) to " << a.out << "\n";
  return 0;
}

int cmd_cluster(const ClusterArgs& a) {
  rsc::SimilarityGraph graph;
  if (!a.coeffs.empty()) {
    graph = rsc::ssc_graph(rsc::load_matrix(a.coeffs));
  } else if (!a.data.empty() && a.knn_k > 0) {
    rsc::DataMatrix data;
    data.Y = rsc::load_matrix(fs::path(a.data) / "Y.bin");
    graph = rsc::knn_graph(data, a.knn_k, a.temperature);
  } else {
    throw rsc::InvalidConfigError(
        "need --coeffs, or --data with --knn-k for the baseline graph");
  }

  rsc::SpectralDecomposition spec = rsc::normalized_laplacian(graph);
  int l_hat =
      a.clusters > 0 ? a.clusters : rsc::estimate_num_clusters(spec);
  rsc::KMeansOptions km;
  km.seed = a.seed;
  std::vector<int> labels = rsc::spectral_cluster(graph, l_hat, km);
  rsc::save_labels(a.out, labels);
  std::cout << "estimated_clusters=" << l_hat << "\n";
  return 0;
}

int cmd_evaluate(const EvaluateArgs& a) {
  if (!a.pred.empty()) {
    auto pred = rsc::load_labels(a.pred);
    auto truth = rsc::load_labels(a.truth);
    auto report = rsc::clustering_error(pred, truth);
    std::printf("clustering_error_percent=%.6f\n", report.error_percent);
    return 0;
  }
  if (a.coeffs.empty() || a.labels.empty() || a.dims.empty() || a.ambient <= 0)
    throw rsc::InvalidConfigError(
        "discovery report needs --coeffs, --labels, --dims, --ambient");
  Eigen::MatrixXd B = rsc::load_matrix(a.coeffs);
  auto labels = rsc::load_labels(a.labels);
  std::vector<int> dims;
  {
    std::stringstream ss(a.dims);
    std::string cell;
    while (std::getline(ss, cell, ',')) dims.push_back(std::stoi(cell));
  }
  Eigen::SparseMatrix<double> sparse = B.sparseView();
  auto report =
      rsc::discoveries(sparse, labels, dims, a.ambient, a.threshold);
  bool sdp = rsc::subspace_detection_property(sparse, labels, a.threshold);
  std::printf("mean_fpr=%.9g\nmean_tpr=%.9g\nsubspace_detection=%s\n",
              report.mean_fpr, report.mean_tpr, sdp ? "true" : "false");
  return 0;
}

int cmd_sweep(const SweepArgs& a) {
  rsc::ExperimentConfig cfg = load_config(a.config);
  rsc::ResultTable table = rsc::run_experiment(cfg, a.out, a.force, a.svg);
  std::cout << "wrote " << table.rows.size() << " rows to " << a.out
            << "/results.csv (config " << table.hash << ")\n";
  return 0;
}

int cmd_asymptotics(const std::string& what, double delta, double sigma,
                    double lambda, double alpha) {
  if (what == "rho-star") {
    rsc::CrossingConstants c = rsc::rho_star();
    std::printf("alpha_star=%.4f\ndelta_star=%.5f\nrho_star=%.4f\n",
                c.alpha_star, c.delta_star, c.rho_star);
  } else if (what == "fixed-point") {
    rsc::AsymptoticState s = rsc::fixed_point(delta, sigma, lambda);
    std::printf("alpha=%.12g\ntau_star=%.12g\nrisk=%.12g\nnorm_limit_sq=%.12g\n",
                s.alpha, s.tau_star, s.risk, s.norm_limit_sq);
  } else if (what == "eta-moment") {
    std::printf("eta_moment=%.12g\n", rsc::eta_moment(alpha));
  } else {
    throw rsc::InvalidConfigError("unknown asymptotics query '" + what + "'");
  }
  return 0;
}

int cmd_pipeline(const PipelineArgs& a) {
  rsc::ExperimentConfig cfg = load_config(a.config);
  rsc::Dataset ds = rsc::generate(cfg.model);
  const auto& truth = *ds.data.labels;

  rsc::SimilarityGraph graph;
  if (cfg.method == "knn_baseline") {
    graph = rsc::knn_graph(ds.data, cfg.knn_k,
                           a.multiplier * cfg.knn_temperature);
  } else {
    rsc::RegressSpec spec;
    spec.sigma = cfg.model.noise_sigma;
    spec.solver = cfg.solver;
    std::vector<double> per_column;
    if (cfg.method == "lasso") {
      spec.method = rsc::RegressionMethod::Lasso;
      for (int l : truth)
        per_column.push_back(
            a.multiplier / std::sqrt(double(cfg.model.subspaces[l].dim)));
    } else if (cfg.method == "dantzig") {
      spec.method = rsc::RegressionMethod::Dantzig;
      spec.lambda = a.multiplier * rsc::dantzig_lambda_heuristic(
                                       cfg.model.ambient_dim,
                                       cfg.model.noise_sigma);
    } else {
      spec.method = rsc::RegressionMethod::TwoStep;
      spec.alpha0 = a.multiplier * (cfg.alpha0 > 0.0
                                        ? cfg.alpha0
                                        : rsc::default_alpha0(
                                              cfg.model.noise_sigma));
    }
    rsc::CoefficientMatrix B =
        rsc::regress_all(ds.data.Y, spec, {}, cfg.workers, per_column);
    graph = rsc::ssc_graph(B);
  }

  rsc::SpectralDecomposition spec_dec = rsc::normalized_laplacian(graph);
  int l_hat = cfg.clusters_override > 0 ? cfg.clusters_override
                                        : rsc::estimate_num_clusters(spec_dec);
  rsc::KMeansOptions km;
  km.seed = rsc::derive_seed(cfg.seed, 7000);
  std::vector<int> pred = rsc::spectral_cluster(graph, l_hat, km);
  rsc::ClusteringResult result = rsc::denoise(ds.data, pred, cfg.dim_rule);
  double error = rsc::clustering_error(pred, truth).error_percent;

  fs::create_directories(a.out);
  rsc::save_labels(fs::path(a.out) / "labels.txt", pred);
  rsc::save_matrix_binary(fs::path(a.out) / "denoised.bin", result.denoised);
  std::printf("estimated_clusters=%d\nclustering_error_percent=%.6f\n", l_hat,
              error);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust sparse subspace clustering toolkit"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* sc_gen = app.add_subcommand("generate", "draw a synthetic dataset");
  sc_gen->add_option("--config", gen.config)->required();
  sc_gen->add_option("--out", gen.out)->required();
  sc_gen->add_option("--seed", gen.seed)->each([&](const std::string&) {
    gen.seed_set = true;
  });
  sc_gen->add_flag("--normalize", gen.normalize);

  RegressArgs reg;
  auto* sc_reg = app.add_subcommand("regress", "build the coefficient matrix");
  sc_reg->add_option("--data", reg.data)->required();
  sc_reg->add_option("--out", reg.out)->required();
  sc_reg->add_option("--method", reg.method);
  sc_reg->add_option("--lambda", reg.lambda);
  sc_reg->add_option("--multiplier", reg.multiplier);
  sc_reg->add_option("--sigma", reg.sigma);
  sc_reg->add_option("--alpha0", reg.alpha0);
  sc_reg->add_option("--workers", reg.workers);

  ClusterArgs clu;
  auto* sc_clu = app.add_subcommand("cluster", "spectral clustering");
  sc_clu->add_option("--coeffs", clu.coeffs);
  sc_clu->add_option("--data", clu.data);
  sc_clu->add_option("--out", clu.out)->required();
  sc_clu->add_option("--clusters", clu.clusters);
  sc_clu->add_option("--knn-k", clu.knn_k);
  sc_clu->add_option("--temperature", clu.temperature);
  sc_clu->add_option("--seed", clu.seed);

  EvaluateArgs ev;
  auto* sc_ev = app.add_subcommand("evaluate", "clustering / discovery metrics");
  sc_ev->add_option("--pred", ev.pred);
  sc_ev->add_option("--truth", ev.truth);
  sc_ev->add_option("--coeffs", ev.coeffs);
  sc_ev->add_option("--labels", ev.labels);
  sc_ev->add_option("--threshold", ev.threshold);
  sc_ev->add_option("--ambient", ev.ambient);
  sc_ev->add_option("--dims", ev.dims);

  SweepArgs roc;
  auto* sc_roc = app.add_subcommand("roc", "penalty sweep with FPR/TPR");
  sc_roc->add_option("--config", roc.config)->required();
  sc_roc->add_option("--out", roc.out)->required();
  sc_roc->add_flag("--force", roc.force);
  sc_roc->add_flag("--svg", roc.svg);

  std::string asym_what;
  double asym_delta = 0.2, asym_sigma = 1.0, asym_lambda = 0.0,
         asym_alpha = 1.0;
  auto* sc_asym = app.add_subcommand("asymptotics", "scalar fixed-point math");
  sc_asym->add_option("query", asym_what,
                      "rho-star | fixed-point | eta-moment")->required();
  sc_asym->add_option("--delta", asym_delta);
  sc_asym->add_option("--sigma", asym_sigma);
  sc_asym->add_option("--lambda", asym_lambda);
  sc_asym->add_option("--alpha", asym_alpha);

  PipelineArgs pipe;
  auto* sc_pipe = app.add_subcommand("pipeline", "end-to-end clustering run");
  sc_pipe->add_option("--config", pipe.config)->required();
  sc_pipe->add_option("--out", pipe.out)->required();
  sc_pipe->add_option("--multiplier", pipe.multiplier);
  sc_pipe->add_flag("--force", pipe.force);
  sc_pipe->add_flag("--svg", pipe.svg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help() << "\n";
    return 2;
  }

  try {
    if (*sc_gen) return cmd_generate(gen);
    if (*sc_reg) return cmd_regress(reg);
    if (*sc_clu) return cmd_cluster(clu);
    if (*sc_ev) return cmd_evaluate(ev);
    if (*sc_roc) return cmd_sweep(roc);
    if (*sc_asym)
      return cmd_asymptotics(asym_what, asym_delta, asym_sigma, asym_lambda,
                             asym_alpha);
    if (*sc_pipe) return cmd_pipeline(pipe);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
