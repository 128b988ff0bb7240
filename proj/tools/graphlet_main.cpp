// graphlet CLI: graph building, SGWT feature extraction and the synthetic
// regression benchmark. All randomness flows from the `seed` config key;
// repeated runs of the same config produce byte-identical outputs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "graphlet/graphlet.hpp"

namespace {

bool log_enabled() {
  const char* level = std::getenv("GRAPHLET_LOG");
  if (level == nullptr) return false;
  const std::string v(level);
  return v == "debug" || v == "info" || v == "1";
}

void log_line(const std::string& msg) {
  if (log_enabled()) std::cerr << "[graphlet] " << msg << "\n";
}

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

graphlet::ordered_json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw graphlet::FileError("cannot open config file: " + path);
  graphlet::ordered_json j;
  try {
    j = graphlet::ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw graphlet::ConfigError(path + ": " + e.what());
  }
  return j;
}

std::vector<double> parse_coefficients(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string cell =
        csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw graphlet::ConfigError("bad coefficient '" + cell + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

struct SynthBenchArgs {
  std::string config_path;
  std::string out_dir;  // flag wins over the config's out_dir
  int trials = -1;
  long nodes = -1;
  long samples = -1;
  long k_best = -1;
  double edge_prob = -1.0;
  double noise_sigma = -1.0;
  double split_ratio = -1.0;
  long long seed = -1;
  int jobs = -1;
};

int cmd_synth_bench(const SynthBenchArgs& args) {
  graphlet::BenchmarkConfig cfg;
  if (!args.config_path.empty()) {
    cfg = graphlet::BenchmarkConfig::from_json(parse_json_file(args.config_path));
  }
  // flag overrides win over the config file
  if (args.trials >= 0) cfg.trials = args.trials;
  if (args.nodes >= 0) cfg.nodes = args.nodes;
  if (args.samples >= 0) cfg.samples = args.samples;
  if (args.k_best >= 0) cfg.k_best = args.k_best;
  if (args.edge_prob >= 0.0) cfg.edge_prob = args.edge_prob;
  if (args.noise_sigma >= 0.0) cfg.noise_sigma = args.noise_sigma;
  if (args.split_ratio >= 0.0) cfg.split_ratio = args.split_ratio;
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (args.jobs >= 0) cfg.jobs = args.jobs;
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  cfg.validate();

  log_line("synth-bench: " + std::to_string(cfg.trials) + " trials, " +
           std::to_string(cfg.nodes) + " nodes, " + std::to_string(cfg.jobs) +
           " jobs");
  const graphlet::RegressionReport report = graphlet::run_synthetic_benchmark(cfg);

  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path base(cfg.out_dir);
  graphlet::write_file((base / "report.csv").string(),
                       graphlet::report_to_csv(report));
  graphlet::write_file((base / "report.json").string(),
                       graphlet::report_to_json(report).dump(2) + "\n");
  log_line("wrote " + (base / "report.csv").string() + " and report.json (" +
           std::to_string(report.trials_used) + " trials used, " +
           std::to_string(report.trials_failed) + " failed)");
  return 0;
}

struct GraphBuildArgs {
  std::string method;
  std::string input;
  std::string output;
  std::string coords_path;
  double threshold = 0.0;
  bool binary = false;
  int k = 8;
  double alpha = 1.0;
  double beta = 0.0;
  int max_iter = 5000;
  double tol = 1e-6;
};

int cmd_graph_build(const GraphBuildArgs& args) {
  static const std::vector<std::string> kMethods = {
      "covariance", "correlation", "threshold", "knn", "semi-local", "kalofolias"};
  if (std::find(kMethods.begin(), kMethods.end(), args.method) == kMethods.end()) {
    std::string valid;
    for (const auto& m : kMethods) valid += (valid.empty() ? "" : ", ") + m;
    throw graphlet::ConfigError("unknown method '" + args.method +
                                "'; valid methods: " + valid);
  }

  graphlet::ordered_json sidecar;
  sidecar["method"] = args.method;
  sidecar["input"] = args.input;

  graphlet::Graph result = [&]() {
    if (args.method == "covariance" || args.method == "correlation" ||
        args.method == "kalofolias") {
      const Eigen::MatrixXd series = graphlet::read_matrix_csv(args.input);
      if (args.method == "covariance") return graphlet::covariance_graph(series);
      if (args.method == "correlation") return graphlet::correlation_graph(series);
      sidecar["alpha"] = args.alpha;
      sidecar["beta"] = args.beta;
      sidecar["max_iter"] = args.max_iter;
      sidecar["tol"] = args.tol;
      graphlet::KalofoliasResult learned = graphlet::kalofolias_learn(
          series, args.alpha, args.beta, args.max_iter, args.tol);
      sidecar["converged"] = learned.converged;
      sidecar["iterations"] = learned.iterations;
      if (!learned.converged) {
        std::cerr << "warning: kalofolias did not reach tol in "
                  << learned.iterations << " iterations; best iterate written\n";
      }
      return std::move(learned.graph);
    }
    const graphlet::Graph g =
        graphlet::Graph::from_weights(graphlet::read_matrix_csv(args.input));
    if (args.method == "threshold") {
      sidecar["t"] = args.threshold;
      sidecar["binary"] = args.binary;
      return graphlet::threshold_graph(g, args.threshold, args.binary);
    }
    if (args.method == "knn") {
      sidecar["k"] = args.k;
      sidecar["binary"] = args.binary;
      return graphlet::knn_graph(g, args.k, args.binary);
    }
    if (args.coords_path.empty()) {
      throw graphlet::ConfigError("semi-local requires --coords");
    }
    sidecar["coords"] = args.coords_path;
    return graphlet::semi_local_graph(g, graphlet::read_matrix_csv(args.coords_path));
  }();

  graphlet::write_matrix_csv(args.output, result.weights());
  graphlet::write_file(args.output + ".json", sidecar.dump(2) + "\n");
  log_line("wrote " + args.output + " (" + std::to_string(result.n_nodes()) +
           " nodes)");
  return 0;
}

struct TransformArgs {
  std::string graph_path;
  std::string signals_path;
  std::string output;
  std::string family = "warped_translate";
  std::string laplacian = "combinatorial";
  int bands = 0;  // 0: family default
  std::string coefficients;
  bool identity_kernel = false;
};

int cmd_transform(const TransformArgs& args) {
  const Eigen::MatrixXd weights = graphlet::read_matrix_csv(args.graph_path);
  const Eigen::MatrixXd signals = graphlet::read_matrix_csv(args.signals_path);
  if (signals.cols() != weights.rows()) {
    throw graphlet::DimensionMismatch(
        "signals are " + std::to_string(signals.rows()) + "x" +
        std::to_string(signals.cols()) + " but the graph is " +
        std::to_string(weights.rows()) + "x" + std::to_string(weights.cols()));
  }

  const graphlet::Graph g = graphlet::Graph::from_weights(weights);
  graphlet::LaplacianKind kind;
  if (args.laplacian == "combinatorial") {
    kind = graphlet::LaplacianKind::Combinatorial;
  } else if (args.laplacian == "normalized") {
    kind = graphlet::LaplacianKind::Normalized;
  } else {
    throw graphlet::ConfigError("unknown laplacian '" + args.laplacian +
                                "'; valid: combinatorial, normalized");
  }
  const graphlet::Spectrum spectrum =
      graphlet::eigendecompose(graphlet::build_laplacian(g, kind));

  graphlet::KernelBank bank;
  if (args.identity_kernel) {
    // debug bank: a single all-pass band, so features reproduce the input
    bank.scaling = [](double) { return 1.0; };
    bank.spectrum_max = spectrum.lambda_max();
    bank.band_labels = {"identity"};
  } else {
    graphlet::KernelSpec spec;
    spec.family = graphlet::kernel_family_from_name(args.family);
    spec.n_bands =
        args.bands > 0 ? args.bands : graphlet::default_band_count(spec.family);
    if (!args.coefficients.empty()) {
      spec.cosine_coeffs = parse_coefficients(args.coefficients);
    }
    bank = graphlet::make_bank(spec, spectrum.eigenvalues);
  }

  const graphlet::WaveletFrame frame = graphlet::build_frame(spectrum, bank);
  const Eigen::MatrixXd features = graphlet::extract_features(frame, signals);
  graphlet::write_matrix_csv(args.output, features);

  graphlet::ordered_json layout;
  layout["graph"] = args.graph_path;
  layout["laplacian"] = args.laplacian;
  layout["kernel"] = args.identity_kernel ? "identity" : args.family;
  layout["bands"] = frame.band_labels;
  layout["n_nodes"] = frame.n_nodes();
  layout["order"] = "band-major";
  layout["columns"] = graphlet::ordered_json::array();
  for (Eigen::Index b = 0; b < frame.n_bands(); ++b) {
    for (Eigen::Index node = 0; node < frame.n_nodes(); ++node) {
      layout["columns"].push_back({{"band", b}, {"node", node}});
    }
  }
  graphlet::write_file(args.output + ".layout.json", layout.dump(2) + "\n");
  log_line("wrote " + args.output + " (" + std::to_string(features.rows()) + "x" +
           std::to_string(features.cols()) + ")");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graphlet: spectral graph wavelet features and benchmarks"};
  app.require_subcommand(1);

  SynthBenchArgs bench;
  CLI::App* bench_cmd = app.add_subcommand(
      "synth-bench", "Run the synthetic smooth-signal regression benchmark");
  bench_cmd->add_option("--config", bench.config_path, "JSON config file");
  bench_cmd->add_option("--out-dir", bench.out_dir, "output directory");
  bench_cmd->add_option("--trials", bench.trials, "override trial count");
  bench_cmd->add_option("--nodes", bench.nodes, "override node count");
  bench_cmd->add_option("--samples", bench.samples, "override sample count");
  bench_cmd->add_option("--k-best", bench.k_best, "override selected feature count");
  bench_cmd->add_option("--edge-prob", bench.edge_prob, "override edge probability");
  bench_cmd->add_option("--noise-sigma", bench.noise_sigma, "override noise sigma");
  bench_cmd->add_option("--split-ratio", bench.split_ratio, "override train fraction");
  bench_cmd->add_option("--seed", bench.seed, "override base seed");
  bench_cmd->add_option("--jobs", bench.jobs, "trial parallelism");

  GraphBuildArgs build;
  CLI::App* build_cmd =
      app.add_subcommand("graph-build", "Build a graph from data or another graph");
  build_cmd->add_option("--method", build.method,
                        "covariance | correlation | threshold | knn | semi-local | "
                        "kalofolias")
      ->required();
  build_cmd->add_option("--input", build.input, "input CSV")->required();
  build_cmd->add_option("--output", build.output, "output weights CSV")->required();
  build_cmd->add_option("--t", build.threshold, "threshold value");
  build_cmd->add_flag("--binary", build.binary, "binarize surviving edges");
  build_cmd->add_option("--k", build.k, "neighbors per node (knn)");
  build_cmd->add_option("--coords", build.coords_path, "node coordinates CSV");
  build_cmd->add_option("--alpha", build.alpha, "kalofolias log-degree weight");
  build_cmd->add_option("--beta", build.beta, "kalofolias Frobenius weight");
  build_cmd->add_option("--max-iter", build.max_iter, "kalofolias iteration cap");
  build_cmd->add_option("--tol", build.tol, "kalofolias stop tolerance");

  TransformArgs transform;
  CLI::App* transform_cmd =
      app.add_subcommand("transform", "Extract SGWT features from signals");
  transform_cmd->add_option("--graph", transform.graph_path, "weights CSV")->required();
  transform_cmd->add_option("--signals", transform.signals_path, "signals CSV")
      ->required();
  transform_cmd->add_option("--output", transform.output, "features CSV")->required();
  transform_cmd->add_option("--family", transform.family, "kernel family");
  transform_cmd->add_option("--bands", transform.bands, "wavelet band count");
  transform_cmd->add_option("--coefficients", transform.coefficients,
                            "cosine coefficients, comma separated");
  transform_cmd->add_option("--laplacian", transform.laplacian,
                            "combinatorial | normalized");
  transform_cmd->add_flag("--identity-kernel", transform.identity_kernel,
                          "debug: single all-pass band");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (bench_cmd->parsed()) return cmd_synth_bench(bench);
    if (build_cmd->parsed()) return cmd_graph_build(build);
    if (transform_cmd->parsed()) return cmd_transform(transform);
    return kExitValidation;
  } catch (const graphlet::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const graphlet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
