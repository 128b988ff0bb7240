#include "doctest.h"

#include <string>

#include "graphlet/benchmark.hpp"

using namespace graphlet;

namespace {

BenchmarkConfig small_config() {
  BenchmarkConfig cfg;
  cfg.nodes = 40;
  cfg.samples = 30;
  cfg.trials = 3;
  cfg.edge_prob = 0.2;
  cfg.k_best = 10;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("benchmark report structure") {
  BenchmarkConfig cfg = small_config();
  cfg.trials = 1;
  cfg.kernels.clear();
  for (KernelFamily family : {KernelFamily::WarpedTranslate, KernelFamily::Meyer}) {
    KernelArm arm;
    arm.spec.family = family;
    cfg.kernels.push_back(arm);
  }

  const RegressionReport report = run_synthetic_benchmark(cfg);
  REQUIRE(report.rows.size() == 3);  // two kernel arms + the raw arm
  CHECK(report.rows[0].kernel_family == "warped_translate");
  CHECK(report.rows[1].kernel_family == "meyer");
  CHECK(report.rows[2].representation == "raw");
  CHECK(report.trials_used == 1);
  CHECK(report.trials_failed == 0);
  CHECK(report.paired_delta_r2.size() == 2);

  for (const ReportRow& row : report.rows) {
    CHECK(row.summary.mean.rmse * row.summary.mean.rmse ==
          doctest::Approx(row.summary.mean.mse).epsilon(1e-12));
    CHECK(row.summary.mean.r2 <= 1.0);
  }
}

TEST_CASE("benchmark is deterministic across reruns and job counts") {
  BenchmarkConfig cfg = small_config();
  cfg.jobs = 1;
  const RegressionReport first = run_synthetic_benchmark(cfg);
  const RegressionReport repeat = run_synthetic_benchmark(cfg);
  cfg.jobs = 4;
  const RegressionReport parallel = run_synthetic_benchmark(cfg);

  const std::string csv = report_to_csv(first);
  CHECK(csv == report_to_csv(repeat));
  CHECK(csv == report_to_csv(parallel));

  const std::string json = report_to_json(first).dump(2);
  CHECK(json == report_to_json(repeat).dump(2));
  CHECK(json == report_to_json(parallel).dump(2));
}

TEST_CASE("config json round trip and validation") {
  const auto j = ordered_json::parse(R"({
    "nodes": 64,
    "samples": 40,
    "trials": 2,
    "edge_prob": 0.15,
    "noise_sigma": 0.2,
    "seed": 9,
    "k_best": 12,
    "split_ratio": 0.8,
    "kernels": [
      {"family": "warped_translate", "bands": 5, "coefficients": [0.5, 0.5]},
      {"family": "cubic_spline", "bands": 3}
    ]
  })");
  const BenchmarkConfig cfg = BenchmarkConfig::from_json(j);
  CHECK(cfg.nodes == 64);
  CHECK(cfg.kernels.size() == 2);
  CHECK(cfg.kernels[0].spec.n_bands == 5);
  CHECK(cfg.kernels[1].spec.family == KernelFamily::CubicSpline);

  // echo contains every resolved field, including defaulted ones
  const ordered_json echo = cfg.to_json();
  CHECK(echo.contains("halved_diffusion"));
  CHECK(echo.contains("diffusion_steps"));
  CHECK(echo["split_ratio"] == 0.8);

  CHECK_THROWS_AS(BenchmarkConfig::from_json(ordered_json::parse(R"({"nodse": 3})")),
                  ConfigError);
  CHECK_THROWS_AS(BenchmarkConfig::from_json(ordered_json::parse(
                      R"({"kernels": [{"family": "meyer", "bandz": 2}]})")),
                  ConfigError);
  CHECK_THROWS_AS(BenchmarkConfig::from_json(ordered_json::parse(R"({"trials": 0})")),
                  ConfigError);
  CHECK_THROWS_AS(BenchmarkConfig::from_json(ordered_json::parse(
                      R"({"kernels": [{"family": "fourier"}]})")),
                  ConfigError);
}

TEST_CASE("failed trials are counted, not fatal, unless all fail") {
  BenchmarkConfig cfg = small_config();
  cfg.edge_prob = 0.0;  // no connected sample exists
  cfg.trials = 2;
  CHECK_THROWS_AS(run_synthetic_benchmark(cfg), RuntimeFailure);
}
