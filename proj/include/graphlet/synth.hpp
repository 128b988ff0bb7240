#ifndef GRAPHLET_SYNTH_HPP
#define GRAPHLET_SYNTH_HPP

// Synthetic smooth-graph-signal regression problems: random signals are
// diffused over a seeded Erdos-Renyi graph by a lazy-random-walk operator,
// the target is a log of a random linear combination of the noiseless
// diffused signals, and Gaussian noise is added to the observations.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>

#include "graphlet/errors.hpp"
#include "graphlet/graph_core.hpp"
#include "graphlet/io.hpp"
#include "graphlet/rng.hpp"

namespace graphlet {

// Unit-weight G(n, p), resampled with derived seeds until connected
// (at most 100 attempts). Pairs are visited row-major over the upper
// triangle; each pair consumes one draw.
inline Graph erdos_renyi(Eigen::Index n, double p, std::uint64_t seed) {
  if (n < 2) throw InvalidInput("erdos_renyi: n must be >= 2");
  if (p < 0.0 || p > 1.0) throw InvalidInput("erdos_renyi: p must be in [0, 1]");

  const std::uint64_t root = derive_seed(seed, rng_stream::kGraph);
  for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
    Rng rng(derive_seed(root, attempt));
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (rng.bernoulli(p)) {
          w(i, j) = 1.0;
          w(j, i) = 1.0;
        }
      }
    }
    Graph g = Graph::from_weights(std::move(w));
    if (g.connected()) return g;
  }
  throw ConnectivityFailure("erdos_renyi: no connected sample in 100 attempts (n=" +
                            std::to_string(n) + ", p=" + std::to_string(p) + ")");
}

// Lazy random walk A = I + D^{-1} W (or its halved variant), degrees taken
// as absolute weight sums. For nonnegative weights every row sums to 2
// (resp. 1).
inline Eigen::MatrixXd diffusion_operator(const Graph& g, bool halved = false) {
  const Eigen::VectorXd d = g.absolute_degrees();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) == 0.0) {
      throw IsolatedNode("diffusion undefined: node " + std::to_string(i) +
                         " has zero degree");
    }
  }
  Eigen::MatrixXd a = d.cwiseInverse().asDiagonal() * g.weights();
  a.diagonal().array() += 1.0;
  if (halved) a *= 0.5;
  return a;
}

struct SynthConfig {
  Eigen::Index n_nodes = 500;
  Eigen::Index n_samples = 200;
  double edge_prob = 0.1;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
  bool halved_diffusion = false;
  int diffusion_steps = 1;
};

struct SyntheticDataset {
  Graph graph;
  Eigen::MatrixXd X;     // m x n observed signals (diffused + noise)
  Eigen::VectorXd y;     // length-m targets
  Eigen::VectorXd beta;  // length-n true weights
  double shift_c = 0.0;  // log-argument shift recorded for traceability
  SynthConfig config;
};

// Sub-streams (documented in rng.hpp): kGraph for the topology, kSignals
// for R (row-major), kBeta for the weights, kNoise for the observation
// noise (row-major). y_i = log(R_hat_i . beta + c) with the smallest shift
// c >= 1 that keeps every argument at least 1.
inline SyntheticDataset generate_dataset(const SynthConfig& cfg) {
  if (cfg.n_samples < 1) throw InvalidInput("generate_dataset: m must be >= 1");
  if (cfg.noise_sigma < 0.0) throw InvalidInput("generate_dataset: sigma must be >= 0");
  if (cfg.diffusion_steps < 1) {
    throw InvalidInput("generate_dataset: diffusion_steps must be >= 1");
  }

  Graph graph = erdos_renyi(cfg.n_nodes, cfg.edge_prob, cfg.seed);
  const Eigen::MatrixXd a = diffusion_operator(graph, cfg.halved_diffusion);

  const Eigen::Index m = cfg.n_samples;
  const Eigen::Index n = cfg.n_nodes;

  Eigen::MatrixXd r(m, n);
  {
    Rng rng(derive_seed(cfg.seed, rng_stream::kSignals));
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j) r(i, j) = rng.normal();
  }
  Eigen::MatrixXd r_hat = r;
  for (int step = 0; step < cfg.diffusion_steps; ++step) r_hat = r_hat * a;

  Eigen::VectorXd beta(n);
  {
    Rng rng(derive_seed(cfg.seed, rng_stream::kBeta));
    for (Eigen::Index j = 0; j < n; ++j) beta(j) = rng.uniform01();
  }

  const Eigen::VectorXd linear = r_hat * beta;
  const double shift = 1.0 + std::max(0.0, -linear.minCoeff());
  const Eigen::VectorXd y = (linear.array() + shift).log();

  Eigen::MatrixXd x = std::move(r_hat);
  if (cfg.noise_sigma > 0.0) {
    Rng rng(derive_seed(cfg.seed, rng_stream::kNoise));
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j) x(i, j) += cfg.noise_sigma * rng.normal();
  }

  return SyntheticDataset{std::move(graph), std::move(x), y, std::move(beta),
                          shift, cfg};
}

// Directory layout: weights.csv, X.csv, y.csv, meta.json.
inline void write_dataset_dir(const SyntheticDataset& ds, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_matrix_csv((base / "weights.csv").string(), ds.graph.weights());
  write_matrix_csv((base / "X.csv").string(), ds.X);
  write_vector_csv((base / "y.csv").string(), ds.y);

  std::string meta = "{\n";
  meta += "  \"generator\": \"" + std::string(kRngVersion) + "\",\n";
  meta += "  \"seed\": " + std::to_string(ds.config.seed) + ",\n";
  meta += "  \"n_nodes\": " + std::to_string(ds.config.n_nodes) + ",\n";
  meta += "  \"n_samples\": " + std::to_string(ds.config.n_samples) + ",\n";
  meta += "  \"edge_prob\": " + format_double(ds.config.edge_prob) + ",\n";
  meta += "  \"noise_sigma\": " + format_double(ds.config.noise_sigma) + ",\n";
  meta += "  \"halved_diffusion\": " +
          std::string(ds.config.halved_diffusion ? "true" : "false") + ",\n";
  meta += "  \"diffusion_steps\": " + std::to_string(ds.config.diffusion_steps) + ",\n";
  meta += "  \"shift_c\": " + format_double(ds.shift_c) + "\n";
  meta += "}\n";
  write_file((base / "meta.json").string(), meta);
}

}  // namespace graphlet

#endif  // GRAPHLET_SYNTH_HPP
