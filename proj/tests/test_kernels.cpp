#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "graphlet/graph_core.hpp"
#include "graphlet/kernels.hpp"
#include "graphlet/synth.hpp"
#include "support/oracles.hpp"

using namespace graphlet;

TEST_CASE("cubic spline kernel pinned values") {
  CHECK(cubic_spline_kernel(0.0) == 0.0);
  // s(1) = -5 + 11 - 6 + 1 and s(2) = -5 + 22 - 24 + 8, both 1 by hand
  CHECK(cubic_spline_kernel(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cubic_spline_kernel(2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cubic_spline_kernel(4.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_THROWS_AS(cubic_spline_kernel(-0.1), NegativeArgument);

  // continuity at the seams
  CHECK(cubic_spline_kernel(1.0 - 1e-9) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(cubic_spline_kernel(2.0 + 1e-9) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("meyer kernel pinned values") {
  CHECK(meyer_kernel(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(meyer_kernel(0.25) == 0.0);
  CHECK(meyer_kernel(3.0) == 0.0);
  // nu(0.5) = 0.5^4 * (35 - 42 + 17.5 - 2.5) = 0.5, so sin(pi/4)
  CHECK(meyer_kernel(0.75) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(meyer_kernel(-1.0), NegativeArgument);

  CHECK(meyer_kernel(0.5 + 1e-9) < 1e-6);
  CHECK(meyer_kernel(2.0 - 1e-9) < 1e-6);
}

TEST_CASE("iterated sine kernel") {
  CHECK(iterated_sine_kernel(0.4) == 0.0);
  CHECK(iterated_sine_kernel(2.5) == 0.0);
  CHECK(iterated_sine_kernel(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(iterated_sine_kernel(-0.5), NegativeArgument);

  // squares of dyadic shifts partition unity away from the scale ends
  for (int i = 0; i <= 10000; ++i) {
    const double x = 1.0 + 3.0 * static_cast<double>(i) / 10000.0;  // [1, 4]
    double sum = 0.0;
    for (int j = -3; j <= 3; ++j) {
      const double v = iterated_sine_kernel(std::ldexp(x, j));
      sum += v * v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("empirical cdf warping") {
  Eigen::VectorXd uniform(4);
  uniform << 0, 1, 2, 3;
  const WarpingFunction w = empirical_cdf_warping(uniform);
  CHECK(w(0.0) == doctest::Approx(0.0));
  CHECK(w(3.0) == doctest::Approx(1.0));
  CHECK(w(1.5) == doctest::Approx(0.5));

  Eigen::VectorXd clustered(4);
  clustered << 0, 0.1, 0.2, 3;
  const WarpingFunction wc = empirical_cdf_warping(clustered);
  CHECK(wc(0.2) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  // monotone on a fine grid
  oracles::TestRng rng(17);
  Eigen::VectorXd eigs(30);
  double acc = 0.0;
  for (int i = 0; i < 30; ++i) {
    acc += rng.uniform();
    eigs(i) = acc;
  }
  const WarpingFunction wr = empirical_cdf_warping(eigs);
  double prev = -1.0;
  for (int i = 0; i <= 2000; ++i) {
    const double lambda = eigs(0) + (eigs(29) - eigs(0)) * i / 2000.0;
    const double value = wr(lambda);
    CHECK(value >= prev - 1e-15);
    CHECK(value >= 0.0);
    CHECK(value <= 1.0);
    prev = value;
  }

  // duplicates collapse to one knot and the range stays [0, 1]
  Eigen::VectorXd dup(5);
  dup << 0, 0, 1, 1, 2;
  const WarpingFunction wd = empirical_cdf_warping(dup);
  CHECK(wd.knots.size() == 3);
  CHECK(wd(0.0) == doctest::Approx(0.0));
  CHECK(wd(2.0) == doctest::Approx(1.0));

  Eigen::VectorXd flat = Eigen::VectorXd::Constant(4, 2.0);
  CHECK_THROWS_AS(empirical_cdf_warping(flat), DegenerateSpectrum);
  Eigen::VectorXd one(1);
  one << 1.0;
  CHECK_THROWS_AS(empirical_cdf_warping(one), DegenerateSpectrum);
}

TEST_CASE("select_scales endpoints") {
  const auto single = select_scales(5.0, 1);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == doctest::Approx(0.4));

  const auto two = select_scales(10.0, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == doctest::Approx(4.0));
  CHECK(two[1] == doctest::Approx(0.2));

  const auto five = select_scales(7.3, 5);
  for (std::size_t j = 1; j < five.size(); ++j) CHECK(five[j] < five[j - 1]);

  CHECK_THROWS_AS(select_scales(0.0, 3), NonpositiveLambdaMax);
  CHECK_THROWS_AS(select_scales(-2.0, 3), NonpositiveLambdaMax);
}

TEST_CASE("warped translate bank is tight") {
  // linear warp == uniform eigenvalues
  Eigen::VectorXd eigs = Eigen::VectorXd::LinSpaced(100, 0.0, 8.0);
  const WarpingFunction warp = empirical_cdf_warping(eigs);
  const KernelBank bank = warped_translate_bank(warp, 4, {0.5, 0.5});
  REQUIRE(bank.n_bands() == 5);

  double min_sum = 1e300;
  double max_sum = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double lambda = 8.0 * static_cast<double>(i) / 10000.0;
    const double omega = warp(lambda);
    if (omega < 1.0 / 8.0 || omega > 7.0 / 8.0) continue;  // interior for R=4
    double sum = 0.0;
    for (Eigen::Index b = 0; b < bank.n_bands(); ++b) {
      const double g = bank.band(b, lambda);
      CHECK(g >= 0.0);
      sum += g * g;
    }
    min_sum = std::min(min_sum, sum);
    max_sum = std::max(max_sum, sum);
  }
  CHECK(max_sum - min_sum < 1e-8);

  // band-pass bands vanish at the spectrum bottom, the scaling does not
  CHECK(bank.scaling(0.0) > 0.0);
  for (const auto& g : bank.wavelets) CHECK(g(0.0) == doctest::Approx(0.0));
}

TEST_CASE("warped bands concentrate where eigenvalues cluster") {
  // half the eigenvalues packed into [0, 1], the rest spread to 10
  Eigen::VectorXd eigs(40);
  for (int i = 0; i < 20; ++i) eigs(i) = 0.05 * i;
  for (int i = 0; i < 20; ++i) eigs(20 + i) = 1.0 + 9.0 * (i + 1) / 20.0;
  const WarpingFunction warp = empirical_cdf_warping(eigs);
  const int r = 4;
  const KernelBank bank = warped_translate_bank(warp, r);

  // centers m/R in warped coordinates pull back to lambdas that are dense
  // near the cluster: the first two centers land inside [0, 1]
  std::vector<double> centers;
  for (int m = 0; m <= r; ++m) {
    // invert the warp by bisection
    double lo = 0.0, hi = 10.0;
    const double target = static_cast<double>(m) / r;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (warp(mid) < target ? lo : hi) = mid;
    }
    centers.push_back(0.5 * (lo + hi));
  }
  CHECK(centers[0] == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(centers[1] < 1.0);   // ~50% of eigenvalues sit below 1
  CHECK(centers[3] > 1.0);   // later centers stretch into the sparse tail
  CHECK(centers[4] == doctest::Approx(10.0).epsilon(1e-6));

  // every band evaluates nonnegative across the whole spectrum
  for (int i = 0; i <= 500; ++i) {
    const double lambda = 10.0 * i / 500.0;
    for (Eigen::Index b = 0; b < bank.n_bands(); ++b) {
      CHECK(bank.band(b, lambda) >= 0.0);
    }
  }
}

TEST_CASE("warped bank input validation") {
  Eigen::VectorXd eigs = Eigen::VectorXd::LinSpaced(10, 0.0, 2.0);
  const WarpingFunction warp = empirical_cdf_warping(eigs);
  CHECK_THROWS_AS(warped_translate_bank(warp, 1), TooFewTranslates);
  CHECK_THROWS_AS(warped_translate_bank(warp, 4, {}), InadmissibleCoefficients);
  CHECK_THROWS_AS(warped_translate_bank(warp, 4, {-0.5, 0.5}),
                  InadmissibleCoefficients);
  // window does not vanish at its support edge
  CHECK_THROWS_AS(warped_translate_bank(warp, 4, {0.7, 0.5}),
                  InadmissibleCoefficients);
  // edge condition holds but the squared windows do not telescope
  CHECK_THROWS_AS(warped_translate_bank(warp, 4, {0.375, 0.5, 0.125}),
                  InadmissibleCoefficients);
}

TEST_CASE("frame bounds") {
  Eigen::VectorXd eigs = Eigen::VectorXd::LinSpaced(60, 0.0, 6.0);

  SUBCASE("constant-one bank") {
    KernelBank bank;
    bank.scaling = [](double) { return 1.0; };
    bank.spectrum_max = 6.0;
    bank.band_labels = {"scaling"};
    const auto [a, b] = frame_bounds(bank, eigs);
    CHECK(a == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(b == doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("warped bank on its own eigenvalues") {
    const KernelBank bank = warped_translate_bank(empirical_cdf_warping(eigs), 4);
    const auto [a, b] = frame_bounds(bank, eigs);
    CHECK(b / a <= 1.0 + 1e-6);
    CHECK(a > 0.0);
  }

  SUBCASE("cubic spline bank covers a connected ER spectrum") {
    const Graph g = erdos_renyi(50, 0.2, 123);
    const Spectrum s =
        eigendecompose(build_laplacian(g, LaplacianKind::Combinatorial));
    const KernelBank bank =
        scaled_kernel_bank(KernelFamily::CubicSpline, s.lambda_max(), 4);
    const auto [a, b] = frame_bounds(bank, s.eigenvalues);
    CHECK(a > 0.0);
    CHECK(b >= a);
  }

  SUBCASE("empty eval points rejected") {
    KernelBank bank;
    bank.scaling = [](double) { return 1.0; };
    bank.spectrum_max = 1.0;
    CHECK_THROWS_AS(frame_bounds(bank, Eigen::VectorXd()), EmptyEvalPoints);
  }
}

TEST_CASE("scaled banks keep kernels finite, nonnegative and band-pass") {
  for (KernelFamily family : {KernelFamily::CubicSpline, KernelFamily::Meyer,
                              KernelFamily::IteratedSine}) {
    const KernelBank bank = scaled_kernel_bank(family, 12.0, 4);
    REQUIRE(bank.n_bands() == 5);
    CHECK(bank.scaling(0.0) > 0.0);
    for (const auto& g : bank.wavelets) CHECK(g(0.0) == 0.0);
    for (int i = 0; i <= 1000; ++i) {
      const double lambda = 12.0 * i / 1000.0;
      for (Eigen::Index b = 0; b < bank.n_bands(); ++b) {
        const double v = bank.band(b, lambda);
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
      }
    }
  }
}
