#include <benchmark/benchmark.h>

#include <random>

#include "rsc/graph.hpp"
#include "rsc/model.hpp"
#include "rsc/regress.hpp"

namespace {

rsc::Dataset make_dataset(int n, int d, double rho, double sigma) {
  rsc::ModelConfig cfg;
  cfg.ambient_dim = n;
  cfg.subspaces = {{d, rho}, {d, rho}};
  cfg.noise_sigma = sigma;
  cfg.seed = 1;
  return rsc::generate(cfg);
}

void BM_LassoColumn(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  rsc::Dataset ds = make_dataset(200, d, 5.0, 0.25);
  const double lambda = 1.0 / std::sqrt(double(d));
  for (auto _ : state) {
    auto sc = rsc::solve_lasso(ds.data.Y.col(0), ds.data.Y, 0, lambda);
    benchmark::DoNotOptimize(sc.values);
  }
}
BENCHMARK(BM_LassoColumn)->Arg(10)->Arg(25);

void BM_TwoStepColumn(benchmark::State& state) {
  rsc::Dataset ds = make_dataset(200, 10, 5.0, 0.25);
  for (auto _ : state) {
    auto sc = rsc::two_step(ds.data.Y.col(0), ds.data.Y, 0, 0.25,
                            rsc::default_alpha0(0.25));
    benchmark::DoNotOptimize(sc.values);
  }
}
BENCHMARK(BM_TwoStepColumn);

void BM_SpectralCluster(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  rsc::SimilarityGraph g;
  g.W = Eigen::MatrixXd::Zero(N, N);
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      if ((i < N / 2) == (j < N / 2) && u(eng) < 0.4)
        g.W(i, j) = g.W(j, i) = u(eng);
  rsc::KMeansOptions opts;
  opts.seed = 5;
  for (auto _ : state) {
    auto labels = rsc::spectral_cluster(g, 2, opts);
    benchmark::DoNotOptimize(labels);
  }
}
BENCHMARK(BM_SpectralCluster)->Arg(100)->Arg(300);

}  // namespace

BENCHMARK_MAIN();
