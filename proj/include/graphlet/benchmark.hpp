#ifndef GRAPHLET_BENCHMARK_HPP
#define GRAPHLET_BENCHMARK_HPP

// Synthetic smooth-signal regression benchmark: per trial, generate a
// dataset, extract SGWT features per kernel family, select the k best by
// correlation on the training split, fit OLS and score the held-out split;
// a no-wavelet arm runs the raw signals through the same selection and
// regression. Trials are independent and may run in parallel with output
// identical for any job count.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "graphlet/errors.hpp"
#include "graphlet/graph_core.hpp"
#include "graphlet/io.hpp"
#include "graphlet/kernels.hpp"
#include "graphlet/pipeline.hpp"
#include "graphlet/rng.hpp"
#include "graphlet/sgwt.hpp"
#include "graphlet/synth.hpp"

#include "json.hpp"

namespace graphlet {

using ordered_json = nlohmann::ordered_json;

struct KernelArm {
  KernelSpec spec;

  std::string label() const { return kernel_family_name(spec.family); }
};

struct BenchmarkConfig {
  Eigen::Index nodes = 500;
  Eigen::Index samples = 200;
  int trials = 500;
  double edge_prob = 0.1;
  double noise_sigma = 0.1;
  std::uint64_t seed = 42;
  Eigen::Index k_best = 100;
  double split_ratio = 0.7;
  bool halved_diffusion = false;
  int diffusion_steps = 1;
  bool augment = false;  // append SGWT features to the raw signals
  int jobs = 1;
  std::string out_dir = ".";
  std::vector<KernelArm> kernels = default_kernels();

  static std::vector<KernelArm> default_kernels() {
    std::vector<KernelArm> arms;
    for (KernelFamily family :
         {KernelFamily::CubicSpline, KernelFamily::Meyer, KernelFamily::IteratedSine,
          KernelFamily::WarpedTranslate}) {
      KernelArm arm;
      arm.spec.family = family;
      arm.spec.n_bands = default_band_count(family);
      arms.push_back(arm);
    }
    return arms;
  }

  void validate() const {
    if (nodes < 2) throw ConfigError("nodes must be >= 2");
    if (samples < 10) throw ConfigError("samples must be >= 10");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (edge_prob < 0.0 || edge_prob > 1.0) {
      throw ConfigError("edge_prob must be in [0, 1]");
    }
    if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
    if (k_best < 1) throw ConfigError("k_best must be >= 1");
    if (split_ratio <= 0.0 || split_ratio >= 1.0) {
      throw ConfigError("split_ratio must be in (0, 1)");
    }
    if (diffusion_steps < 1) throw ConfigError("diffusion_steps must be >= 1");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (kernels.empty()) throw ConfigError("kernel list must not be empty");
    for (const KernelArm& arm : kernels) {
      if (arm.spec.n_bands < 1) throw ConfigError("kernel bands must be >= 1");
      if (arm.spec.family == KernelFamily::WarpedTranslate && arm.spec.n_bands < 2) {
        throw ConfigError("warped_translate needs at least 2 bands");
      }
    }
  }

  static BenchmarkConfig from_json(const ordered_json& j);
  ordered_json to_json() const;
};

inline BenchmarkConfig BenchmarkConfig::from_json(const ordered_json& j) {
  BenchmarkConfig cfg;
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "nodes") cfg.nodes = value.get<Eigen::Index>();
    else if (key == "samples") cfg.samples = value.get<Eigen::Index>();
    else if (key == "trials") cfg.trials = value.get<int>();
    else if (key == "edge_prob") cfg.edge_prob = value.get<double>();
    else if (key == "noise_sigma") cfg.noise_sigma = value.get<double>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "k_best") cfg.k_best = value.get<Eigen::Index>();
    else if (key == "split_ratio") cfg.split_ratio = value.get<double>();
    else if (key == "halved_diffusion") cfg.halved_diffusion = value.get<bool>();
    else if (key == "diffusion_steps") cfg.diffusion_steps = value.get<int>();
    else if (key == "augment") cfg.augment = value.get<bool>();
    else if (key == "jobs") cfg.jobs = value.get<int>();
    else if (key == "out_dir") cfg.out_dir = value.get<std::string>();
    else if (key == "kernels") {
      if (!value.is_array()) throw ConfigError("kernels must be an array");
      cfg.kernels.clear();
      for (const auto& item : value) {
        KernelArm arm;
        int bands = 0;  // 0: use the family default
        for (const auto& [akey, avalue] : item.items()) {
          if (akey == "family") {
            arm.spec.family = kernel_family_from_name(avalue.get<std::string>());
          } else if (akey == "bands") {
            bands = avalue.get<int>();
          } else if (akey == "coefficients") {
            arm.spec.cosine_coeffs = avalue.get<std::vector<double>>();
          } else {
            throw ConfigError("unknown kernel key '" + akey + "'");
          }
        }
        arm.spec.n_bands = bands > 0 ? bands : default_band_count(arm.spec.family);
        cfg.kernels.push_back(arm);
      }
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

// Resolved-config echo. `jobs` and `out_dir` are deliberately omitted:
// they control execution and placement only, and reports must be
// byte-identical for any job count or output location.
inline ordered_json BenchmarkConfig::to_json() const {
  ordered_json j;
  j["nodes"] = nodes;
  j["samples"] = samples;
  j["trials"] = trials;
  j["edge_prob"] = edge_prob;
  j["noise_sigma"] = noise_sigma;
  j["seed"] = seed;
  j["k_best"] = k_best;
  j["split_ratio"] = split_ratio;
  j["halved_diffusion"] = halved_diffusion;
  j["diffusion_steps"] = diffusion_steps;
  j["augment"] = augment;
  j["kernels"] = ordered_json::array();
  for (const KernelArm& arm : kernels) {
    ordered_json k;
    k["family"] = kernel_family_name(arm.spec.family);
    k["bands"] = arm.spec.n_bands;
    if (arm.spec.family == KernelFamily::WarpedTranslate) {
      k["coefficients"] = arm.spec.cosine_coeffs;
    }
    j["kernels"].push_back(k);
  }
  return j;
}

struct TrialOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::vector<Metrics> arm_metrics;  // kernel arms in config order, raw arm last
};

struct ReportRow {
  std::string representation;  // "sgwt" or "raw"
  std::string kernel_family;   // family name or "none"
  std::string graph_method;    // "erdos_renyi" for the synthetic benchmark
  MetricsSummary summary;
};

struct PairedDelta {
  std::string kernel_family;
  double mean_delta_r2 = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
};

struct RegressionReport {
  std::vector<ReportRow> rows;
  std::vector<PairedDelta> paired_delta_r2;  // each wavelet arm minus raw
  int trials_requested = 0;
  int trials_used = 0;
  int trials_failed = 0;
  ordered_json config_echo;
  std::vector<TrialOutcome> trial_detail;
};

namespace detail {

inline TrialOutcome run_benchmark_trial(const BenchmarkConfig& cfg, int trial) {
  TrialOutcome outcome;
  outcome.seed = derive_seed(derive_seed(cfg.seed, rng_stream::kTrials),
                             static_cast<std::uint64_t>(trial));
  try {
    SynthConfig synth_cfg;
    synth_cfg.n_nodes = cfg.nodes;
    synth_cfg.n_samples = cfg.samples;
    synth_cfg.edge_prob = cfg.edge_prob;
    synth_cfg.noise_sigma = cfg.noise_sigma;
    synth_cfg.seed = outcome.seed;
    synth_cfg.halved_diffusion = cfg.halved_diffusion;
    synth_cfg.diffusion_steps = cfg.diffusion_steps;
    const SyntheticDataset ds = generate_dataset(synth_cfg);

    const Laplacian lap = build_laplacian(ds.graph, LaplacianKind::Combinatorial);
    const Spectrum spectrum = eigendecompose(lap);

    const Eigen::Index m = ds.X.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Rng split_rng(derive_seed(outcome.seed, rng_stream::kSplit));
    split_rng.shuffle(order);
    const Eigen::Index n_train = std::clamp<Eigen::Index>(
        static_cast<Eigen::Index>(std::lround(cfg.split_ratio * static_cast<double>(m))),
        1, m - 1);

    const auto split_rows = [&](const Eigen::MatrixXd& features) {
      Eigen::MatrixXd train(n_train, features.cols());
      Eigen::MatrixXd test(m - n_train, features.cols());
      for (Eigen::Index i = 0; i < n_train; ++i) {
        train.row(i) = features.row(order[static_cast<std::size_t>(i)]);
      }
      for (Eigen::Index i = n_train; i < m; ++i) {
        test.row(i - n_train) = features.row(order[static_cast<std::size_t>(i)]);
      }
      return std::make_pair(std::move(train), std::move(test));
    };
    Eigen::VectorXd y_train(n_train), y_test(m - n_train);
    for (Eigen::Index i = 0; i < n_train; ++i) {
      y_train(i) = ds.y(order[static_cast<std::size_t>(i)]);
    }
    for (Eigen::Index i = n_train; i < m; ++i) {
      y_test(i - n_train) = ds.y(order[static_cast<std::size_t>(i)]);
    }

    const auto score_arm = [&](const Eigen::MatrixXd& features) {
      auto [train, test] = split_rows(features);
      const Eigen::Index k = std::min<Eigen::Index>(cfg.k_best, features.cols());
      const std::vector<Eigen::Index> selected = select_k_best(train, y_train, k);
      const LinearModel model = ols_fit(take_columns(train, selected), y_train);
      const Eigen::VectorXd pred = model.predict(take_columns(test, selected));
      return compute_metrics(y_test, pred);
    };

    for (const KernelArm& arm : cfg.kernels) {
      const KernelBank bank = make_bank(arm.spec, spectrum.eigenvalues);
      const WaveletFrame frame = build_frame(spectrum, bank);
      Eigen::MatrixXd features = extract_features(frame, ds.X);
      if (cfg.augment) {
        Eigen::MatrixXd augmented(m, ds.X.cols() + features.cols());
        augmented << ds.X, features;
        features = std::move(augmented);
      }
      outcome.arm_metrics.push_back(score_arm(features));
    }
    outcome.arm_metrics.push_back(score_arm(ds.X));  // no-wavelet arm
    outcome.ok = true;
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  return outcome;
}

}  // namespace detail

inline RegressionReport run_synthetic_benchmark(const BenchmarkConfig& cfg) {
  cfg.validate();

  RegressionReport report;
  report.trials_requested = cfg.trials;
  report.config_echo = cfg.to_json();
  report.trial_detail.resize(static_cast<std::size_t>(cfg.trials));

  std::atomic<int> next{0};
  const int workers = std::max(1, std::min(cfg.jobs, cfg.trials));
  const auto worker = [&]() {
    while (true) {
      const int t = next.fetch_add(1);
      if (t >= cfg.trials) break;
      report.trial_detail[static_cast<std::size_t>(t)] =
          detail::run_benchmark_trial(cfg, t);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  const std::size_t n_arms = cfg.kernels.size() + 1;
  std::vector<std::vector<Metrics>> per_arm(n_arms);
  for (const TrialOutcome& trial : report.trial_detail) {
    if (!trial.ok) {
      ++report.trials_failed;
      continue;
    }
    ++report.trials_used;
    for (std::size_t a = 0; a < n_arms; ++a) per_arm[a].push_back(trial.arm_metrics[a]);
  }
  if (report.trials_used == 0) {
    throw RuntimeFailure("benchmark: every trial failed (" +
                         report.trial_detail.front().error + ")");
  }

  for (std::size_t a = 0; a < cfg.kernels.size(); ++a) {
    ReportRow row;
    row.representation = "sgwt";
    row.kernel_family = cfg.kernels[a].label();
    row.graph_method = "erdos_renyi";
    row.summary = summarize_metrics(per_arm[a]);
    report.rows.push_back(std::move(row));
  }
  ReportRow raw_row;
  raw_row.representation = "raw";
  raw_row.kernel_family = "none";
  raw_row.graph_method = "erdos_renyi";
  raw_row.summary = summarize_metrics(per_arm[n_arms - 1]);
  report.rows.push_back(std::move(raw_row));

  // paired R^2 deltas against the no-wavelet arm, normal 95% interval
  for (std::size_t a = 0; a < cfg.kernels.size(); ++a) {
    std::vector<double> deltas;
    for (std::size_t t = 0; t < per_arm[a].size(); ++t) {
      deltas.push_back(per_arm[a][t].r2 - per_arm[n_arms - 1][t].r2);
    }
    const double n = static_cast<double>(deltas.size());
    const double mean = std::accumulate(deltas.begin(), deltas.end(), 0.0) / n;
    double ss = 0.0;
    for (double d : deltas) ss += (d - mean) * (d - mean);
    const double se = n > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
    report.paired_delta_r2.push_back(
        {cfg.kernels[a].label(), mean, mean - 1.96 * se, mean + 1.96 * se});
  }
  return report;
}

inline std::string report_to_csv(const RegressionReport& report) {
  std::ostringstream out;
  out << "representation,kernel,graph,trials_used,trials_failed,"
         "mse,mse_se,rmse,rmse_se,r2,r2_se,pearson,pearson_se\n";
  for (const ReportRow& row : report.rows) {
    out << row.representation << ',' << row.kernel_family << ',' << row.graph_method
        << ',' << report.trials_used << ',' << report.trials_failed << ','
        << format_double(row.summary.mean.mse) << ',' << format_double(row.summary.se.mse)
        << ',' << format_double(row.summary.mean.rmse) << ','
        << format_double(row.summary.se.rmse) << ',' << format_double(row.summary.mean.r2)
        << ',' << format_double(row.summary.se.r2) << ','
        << format_double(row.summary.mean.pearson) << ','
        << format_double(row.summary.se.pearson) << '\n';
  }
  return out.str();
}

inline ordered_json metrics_to_json(const Metrics& m) {
  ordered_json j;
  j["mse"] = m.mse;
  j["rmse"] = m.rmse;
  j["r2"] = m.r2;
  if (m.pearson_valid) {
    j["pearson"] = m.pearson;
  } else {
    j["pearson"] = nullptr;
  }
  return j;
}

inline ordered_json report_to_json(const RegressionReport& report) {
  ordered_json j;
  j["config"] = report.config_echo;
  j["rng_version"] = kRngVersion;
  j["trials"] = {{"requested", report.trials_requested},
                 {"used", report.trials_used},
                 {"failed", report.trials_failed}};
  j["rows"] = ordered_json::array();
  for (const ReportRow& row : report.rows) {
    ordered_json r;
    r["representation"] = row.representation;
    r["kernel"] = row.kernel_family;
    r["graph"] = row.graph_method;
    r["mean"] = metrics_to_json(row.summary.mean);
    r["se"] = metrics_to_json(row.summary.se);
    j["rows"].push_back(std::move(r));
  }
  j["paired_delta_r2_vs_no_wavelet"] = ordered_json::array();
  for (const PairedDelta& d : report.paired_delta_r2) {
    ordered_json item;
    item["kernel"] = d.kernel_family;
    item["mean"] = d.mean_delta_r2;
    item["ci95"] = {d.ci95_low, d.ci95_high};
    j["paired_delta_r2_vs_no_wavelet"].push_back(std::move(item));
  }
  j["trial_detail"] = ordered_json::array();
  const std::size_t n_arms =
      report.rows.size();  // kernel arms + raw, same order as rows
  for (const TrialOutcome& trial : report.trial_detail) {
    ordered_json t;
    t["seed"] = trial.seed;
    t["ok"] = trial.ok;
    if (!trial.ok) {
      t["error"] = trial.error;
    } else {
      ordered_json scores;
      for (std::size_t a = 0; a < n_arms; ++a) {
        const std::string key = report.rows[a].representation == "raw"
                                    ? "no_wavelet"
                                    : report.rows[a].kernel_family;
        scores[key] = metrics_to_json(trial.arm_metrics[a]);
      }
      t["scores"] = std::move(scores);
    }
    j["trial_detail"].push_back(std::move(t));
  }
  return j;
}

}  // namespace graphlet

#endif  // GRAPHLET_BENCHMARK_HPP
