#include "rsc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "rsc/rng.hpp"

namespace rsc {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const ExperimentConfig& c) {
  json subspaces = json::array();
  for (const auto& s : c.model.subspaces)
    subspaces.push_back({{"dim", s.dim}, {"density", s.density}});
  json rule;
  if (const auto* fixed = std::get_if<FixedDim>(&c.dim_rule))
    rule = {{"fixed", fixed->dim}};
  else
    rule = {{"energy", std::get<EnergyFraction>(c.dim_rule).fraction}};
  return json{
      {"name", c.name},
      {"model",
       {{"ambient_dim", c.model.ambient_dim},
        {"noise_sigma", c.model.noise_sigma},
        {"seed", c.model.seed},
        {"subspaces", subspaces}}},
      {"method", c.method},
      {"lambda_multipliers", c.lambda_multipliers},
      {"lambdas", c.lambdas},
      {"alpha0", c.alpha0},
      {"threshold", c.threshold},
      {"samples_per_dim_class", c.samples_per_dim_class},
      {"cluster", c.cluster},
      {"clusters", c.clusters_override},
      {"dim_rule", rule},
      {"knn", {{"k", c.knn_k}, {"temperature", c.knn_temperature}}},
      // the worker count is an execution detail: it never changes results,
      // so it must not change the config identity either
      {"seed", c.seed},
      {"timings", c.timings}};
}

}  // namespace

void ExperimentConfig::validate() const {
  model.validate();
  if (method != "lasso" && method != "two_step" && method != "dantzig" &&
      method != "knn_baseline")
    throw InvalidConfigError("unknown method '" + method + "'");
  if (method != "knn_baseline" && lambda_multipliers.empty() && lambdas.empty())
    throw InvalidConfigError("need a lambda or multiplier grid");
  if (!lambda_multipliers.empty() && !lambdas.empty())
    throw InvalidConfigError("give either multipliers or fixed lambdas");
  if (samples_per_dim_class < 1)
    throw InvalidConfigError("samples_per_dim_class must be >= 1");
  if (workers < 1) throw InvalidConfigError("workers must be >= 1");
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    c.name = j.value("name", c.name);
    const auto& jm = j.at("model");
    c.model.ambient_dim = jm.at("ambient_dim").get<int>();
    c.model.noise_sigma = jm.value("noise_sigma", 0.0);
    c.model.seed = jm.value("seed", std::uint64_t{0});
    for (const auto& js : jm.at("subspaces"))
      c.model.subspaces.push_back(
          {js.at("dim").get<int>(), js.at("density").get<double>()});
    c.method = j.value("method", c.method);
    c.lambda_multipliers =
        j.value("lambda_multipliers", std::vector<double>{});
    c.lambdas = j.value("lambdas", std::vector<double>{});
    c.alpha0 = j.value("alpha0", 0.0);
    c.threshold = j.value("threshold", 1e-3);
    c.samples_per_dim_class = j.value("samples_per_dim_class", 100);
    c.cluster = j.value("cluster", false);
    c.clusters_override = j.value("clusters", 0);
    if (j.contains("dim_rule")) {
      const auto& r = j.at("dim_rule");
      if (r.contains("fixed"))
        c.dim_rule = FixedDim{r.at("fixed").get<int>()};
      else
        c.dim_rule = EnergyFraction{r.at("energy").get<double>()};
    }
    if (j.contains("knn")) {
      c.knn_k = j.at("knn").value("k", 5);
      c.knn_temperature = j.at("knn").value("temperature", 1.0);
    }
    c.workers = j.value("workers", 1);
    c.seed = j.value("seed", std::uint64_t{0});
    c.timings = j.value("timings", false);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad config field: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

std::string config_hash(const ExperimentConfig& config) {
  std::string canon = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::vector<int> sample_columns_per_dim_class(const Dataset& ds,
                                              const ModelConfig& model,
                                              int per_class,
                                              std::uint64_t seed) {
  // group columns by subspace dimension, then draw up to per_class from each
  std::map<int, std::vector<int>> by_dim;
  const auto& labels = *ds.data.labels;
  for (int i = 0; i < ds.data.num_points(); ++i)
    by_dim[model.subspaces[labels[i]].dim].push_back(i);

  std::vector<int> picked;
  int group = 0;
  for (auto& [dim, cols] : by_dim) {
    auto rng = make_engine(derive_seed(seed, 1000 + group++));
    std::shuffle(cols.begin(), cols.end(), rng);
    int take = std::min<int>(per_class, static_cast<int>(cols.size()));
    picked.insert(picked.end(), cols.begin(), cols.begin() + take);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& config,
                           const std::filesystem::path& out_dir,
                           bool force, bool svg) {
  config.validate();
  std::filesystem::create_directories(out_dir);

  ResultTable table;
  table.hash = config_hash(config);
  table.seed = config.seed;

  const auto results_path = out_dir / "results.csv";
  if (std::filesystem::exists(results_path) && !force) {
    ResultTable old = read_results_csv(results_path);
    if (old.hash != table.hash)
      throw IoError("existing results in " + out_dir.string() +
                    " came from a different config; pass force to overwrite");
  }

  Dataset ds = generate(config.model);
  const auto& labels = *ds.data.labels;
  std::vector<int> subspace_dims;
  for (const auto& s : config.model.subspaces) subspace_dims.push_back(s.dim);

  std::vector<int> sampled = sample_columns_per_dim_class(
      ds, config.model, config.samples_per_dim_class, config.seed);

  const bool multiplier_mode = !config.lambda_multipliers.empty();
  std::vector<double> grid = multiplier_mode || config.method == "knn_baseline"
                                 ? config.lambda_multipliers
                                 : config.lambdas;
  if (config.method == "knn_baseline" && grid.empty()) grid = {1.0};

  const double base_alpha0 = config.alpha0 > 0.0
                                 ? config.alpha0
                                 : default_alpha0(config.model.noise_sigma);

  for (std::size_t g = 0; g < grid.size(); ++g) {
    auto started = std::chrono::steady_clock::now();
    ResultRow row;
    row.experiment = config.name;
    row.lambda_multiplier = grid[g];
    row.fpr = std::numeric_limits<double>::quiet_NaN();
    row.tpr = std::numeric_limits<double>::quiet_NaN();

    try {
      SimilarityGraph graph;
      if (config.method == "knn_baseline") {
        graph = knn_graph(ds.data, config.knn_k,
                          grid[g] * config.knn_temperature);
      } else {
        RegressSpec spec;
        spec.sigma = config.model.noise_sigma;
        spec.solver = config.solver;
        std::vector<int> effective;
        if (config.cluster) {  // clustering needs every column of B
          effective.resize(ds.data.num_points());
          for (int i = 0; i < ds.data.num_points(); ++i) effective[i] = i;
        } else {
          effective = sampled;
        }

        std::vector<double> per_column;
        if (config.method == "lasso") {
          spec.method = RegressionMethod::Lasso;
          for (int i : effective) {
            double lo = 1.0 / std::sqrt(double(subspace_dims[labels[i]]));
            per_column.push_back(multiplier_mode ? grid[g] * lo : grid[g]);
          }
        } else if (config.method == "dantzig") {
          spec.method = RegressionMethod::Dantzig;
          double lo = dantzig_lambda_heuristic(config.model.ambient_dim,
                                               config.model.noise_sigma);
          per_column.assign(effective.size(),
                            multiplier_mode ? grid[g] * lo : grid[g]);
        } else {
          spec.method = RegressionMethod::TwoStep;
          spec.alpha0 = multiplier_mode ? grid[g] * base_alpha0 : base_alpha0;
          if (!multiplier_mode)
            spec.alpha0 = base_alpha0;  // fixed-lambda grid not meaningful here
        }

        CoefficientMatrix coeffs =
            regress_all(ds.data.Y, spec, effective, config.workers,
                        per_column);
        DiscoveryReport rep = discoveries(
            coeffs.B, labels, subspace_dims, config.model.ambient_dim,
            config.threshold, FprNormalization::AmbientMinusDim, sampled);
        row.fpr = rep.mean_fpr;
        row.tpr = rep.mean_tpr;
        if (config.cluster) graph = ssc_graph(coeffs);
      }

      if (config.cluster || config.method == "knn_baseline") {
        SpectralDecomposition spec_dec = normalized_laplacian(graph);
        int l_hat = config.clusters_override > 0
                        ? config.clusters_override
                        : estimate_num_clusters(spec_dec);
        row.l_hat = l_hat;
        KMeansOptions km;
        km.seed = derive_seed(config.seed, 7000 + g);
        std::vector<int> pred = spectral_cluster(graph, l_hat, km);
        row.clustering_error = clustering_error(pred, labels).error_percent;
      }
    } catch (const Error&) {
      row.failed = true;
    }

    if (config.timings)
      row.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - started)
                        .count();
    table.rows.push_back(row);
  }

  write_results_csv(results_path, table);

  {  // roc.csv: the penalty sweep as (grid value, fpr, tpr)
    std::ofstream roc(out_dir / "roc.csv");
    if (!roc) throw IoError("cannot write roc.csv");
    roc << "# config_hash=" << table.hash << " seed=" << table.seed << "\n";
    roc << "lambda_multiplier,fpr,tpr\n";
    for (const auto& r : table.rows)
      roc << format_double(r.lambda_multiplier) << ',' << format_double(r.fpr)
          << ',' << format_double(r.tpr) << "\n";
  }

  if (svg) write_svg_charts(results_path, out_dir);
  return table;
}

void write_results_csv(const std::filesystem::path& path,
                       const ResultTable& table) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# config_hash=" << table.hash << " seed=" << table.seed << "\n";
  out << "experiment,lambda_multiplier,fpr,tpr,clustering_error,l_hat,wall_ms\n";
  for (const auto& r : table.rows) {
    out << r.experiment << ',' << format_double(r.lambda_multiplier) << ','
        << format_double(r.fpr) << ',' << format_double(r.tpr) << ','
        << format_double(r.clustering_error) << ',' << r.l_hat << ','
        << r.wall_ms << "\n";
  }
}

ResultTable read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  ResultTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto hpos = line.find("config_hash=");
      if (hpos != std::string::npos)
        table.hash = line.substr(hpos + 12, 16);
      auto spos = line.find("seed=");
      if (spos != std::string::npos)
        table.seed = std::stoull(line.substr(spos + 5));
      continue;
    }
    if (line.rfind("experiment,", 0) == 0) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7)
      throw ParseError("bad results row at line " + std::to_string(lineno),
                       lineno);
    ResultRow r;
    r.experiment = cells[0];
    r.lambda_multiplier = std::stod(cells[1]);
    r.fpr = std::stod(cells[2]);
    r.tpr = std::stod(cells[3]);
    r.clustering_error = std::stod(cells[4]);
    r.l_hat = std::stoi(cells[5]);
    r.wall_ms = std::stol(cells[6]);
    table.rows.push_back(r);
  }
  return table;
}

namespace {

struct Series {
  std::string label;
  std::vector<double> x, y;
  std::string color;
};

void svg_chart(const std::filesystem::path& path, const std::string& title,
               const std::vector<Series>& series) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isnan(s.x[i]) || std::isnan(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double w = 640, h = 420, ml = 60, mr = 20, mt = 40, mb = 40;
  auto sx = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
  };
  auto sy = [&](double y) {
    return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb);
  };

  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w
      << "' height='" << h << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << w / 2 << "' y='20' text-anchor='middle' "
      << "font-family='sans-serif' font-size='14'>" << title << "</text>\n";
  out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr
      << "' y2='" << h - mb << "' stroke='black'/>\n";
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
      << h - mb << "' stroke='black'/>\n";
  char buf[64];
  for (int k = 0; k <= 4; ++k) {
    double xv = xmin + k * (xmax - xmin) / 4;
    double yv = ymin + k * (ymax - ymin) / 4;
    std::snprintf(buf, sizeof buf, "%.3g", xv);
    out << "<text x='" << sx(xv) << "' y='" << h - mb + 16
        << "' text-anchor='middle' font-family='sans-serif' font-size='10'>"
        << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", yv);
    out << "<text x='" << ml - 6 << "' y='" << sy(yv) + 3
        << "' text-anchor='end' font-family='sans-serif' font-size='10'>"
        << buf << "</text>\n";
  }
  int legend_y = mt;
  for (const auto& s : series) {
    out << "<polyline fill='none' stroke='" << s.color << "' points='";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isnan(s.x[i]) || std::isnan(s.y[i])) continue;
      out << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
    }
    out << "'/>\n";
    out << "<text x='" << w - mr - 120 << "' y='" << legend_y
        << "' font-family='sans-serif' font-size='11' fill='" << s.color
        << "'>" << s.label << "</text>\n";
    legend_y += 14;
  }
  out << "</svg>\n";
}

}  // namespace

void write_svg_charts(const std::filesystem::path& results_csv,
                      const std::filesystem::path& out_dir) {
  ResultTable table = read_results_csv(results_csv);
  Series fpr{"FPR", {}, {}, "#c0392b"};
  Series tpr{"TPR", {}, {}, "#2980b9"};
  Series roc{"ROC", {}, {}, "#27ae60"};
  for (const auto& r : table.rows) {
    fpr.x.push_back(r.lambda_multiplier);
    fpr.y.push_back(r.fpr);
    tpr.x.push_back(r.lambda_multiplier);
    tpr.y.push_back(r.tpr);
    roc.x.push_back(r.fpr);
    roc.y.push_back(r.tpr);
  }
  svg_chart(out_dir / "rates.svg", "discovery rates vs penalty multiplier",
            {fpr, tpr});
  svg_chart(out_dir / "roc.svg", "TPR vs FPR", {roc});
}

}  // namespace rsc
