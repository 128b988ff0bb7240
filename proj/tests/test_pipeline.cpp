#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "graphlet/pipeline.hpp"
#include "support/oracles.hpp"

using namespace graphlet;

namespace {

// second-moment standardization matching the lasso's internal convention
Eigen::MatrixXd standardized(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out = x.rowwise() - x.colwise().mean();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    out.col(j) /= std::sqrt(out.col(j).squaredNorm() /
                            static_cast<double>(out.rows()));
  }
  return out;
}

double kkt_violation(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const LinearModel& model, double lambda) {
  const Eigen::VectorXd r = y - model.predict(x);
  const double inv_m = 1.0 / static_cast<double>(x.rows());
  double worst = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double g = inv_m * x.col(j).dot(r);
    if (model.weights(j) == 0.0) {
      worst = std::max(worst, std::abs(g) - lambda);
    } else {
      worst = std::max(worst, std::abs(g - lambda * (model.weights(j) > 0 ? 1.0 : -1.0)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("select_k_best") {
  oracles::TestRng rng(11);

  SUBCASE("a copy of the target ranks first") {
    Eigen::MatrixXd x = rng.matrix(20, 5);
    const Eigen::VectorXd y = rng.vector(20);
    x.col(3) = y;
    const auto idx = select_k_best(x, y, 2);
    CHECK(idx[0] == 3);
  }

  SUBCASE("k == q returns all indices ordered by score") {
    const Eigen::MatrixXd x = rng.matrix(30, 5);
    const Eigen::VectorXd y = rng.vector(30);
    const auto idx = select_k_best(x, y, 5);
    REQUIRE(idx.size() == 5);

    std::vector<double> scores;
    for (Eigen::Index j = 0; j < 5; ++j) {
      scores.push_back(std::abs(oracles::brute_force_pearson(x.col(j), y)));
    }
    for (std::size_t i = 1; i < idx.size(); ++i) {
      CHECK(scores[static_cast<std::size_t>(idx[i - 1])] >=
            scores[static_cast<std::size_t>(idx[i])]);
    }
  }

  SUBCASE("matches the brute-force ranking") {
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXd x = rng.matrix(25, 5);
      const Eigen::VectorXd y = rng.vector(25);
      const auto idx = select_k_best(x, y, 5);

      std::vector<std::pair<double, Eigen::Index>> expected;
      for (Eigen::Index j = 0; j < 5; ++j) {
        expected.emplace_back(-std::abs(oracles::brute_force_pearson(x.col(j), y)), j);
      }
      std::sort(expected.begin(), expected.end());
      for (std::size_t i = 0; i < 5; ++i) {
        CHECK(idx[i] == expected[i].second);
      }
    }
  }

  SUBCASE("ranking invariant under positive feature rescaling") {
    Eigen::MatrixXd x = rng.matrix(40, 6);
    const Eigen::VectorXd y = rng.vector(40);
    const auto before = select_k_best(x, y, 6);
    x.col(2) *= 1000.0;
    x.col(4) *= 1e-6;
    const auto after = select_k_best(x, y, 6);
    CHECK(before == after);
  }

  SUBCASE("constant features score zero") {
    Eigen::MatrixXd x = rng.matrix(15, 3);
    x.col(0).setConstant(7.0);
    const Eigen::VectorXd y = rng.vector(15);
    const auto idx = select_k_best(x, y, 3);
    CHECK(idx.back() == 0);
  }

  SUBCASE("k out of range") {
    const Eigen::MatrixXd x = rng.matrix(10, 3);
    const Eigen::VectorXd y = rng.vector(10);
    CHECK_THROWS_AS(select_k_best(x, y, 0), KOutOfRange);
    CHECK_THROWS_AS(select_k_best(x, y, 4), KOutOfRange);
  }
}

TEST_CASE("pca") {
  oracles::TestRng rng(13);

  SUBCASE("collinear points need one component") {
    Eigen::MatrixXd x(50, 2);
    for (int i = 0; i < 50; ++i) {
      const double t = rng.normal();
      x(i, 0) = 3.0 * t + 1.0;
      x(i, 1) = -2.0 * t + 5.0;
    }
    const PcaModel model = pca_fit(x, 2);
    const double total = model.explained_variance.sum();
    CHECK(model.explained_variance(0) / total >= 1.0 - 1e-10);
  }

  SUBCASE("full-rank capture reconstructs the data") {
    const Eigen::MatrixXd x = rng.matrix(30, 6);
    const PcaModel model = pca_fit(x, 6);
    const Eigen::MatrixXd projected = pca_transform(model, x);
    const Eigen::MatrixXd rebuilt =
        (projected * model.components.transpose()).rowwise() + model.mean.transpose();
    CHECK((rebuilt - x).cwiseAbs().maxCoeff() <= 1e-8);
  }

  SUBCASE("explained variances match the covariance eigenvalues") {
    const Eigen::MatrixXd x = rng.matrix(40, 6);
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered / 39.0;
    auto eigs = oracles::jacobi_eigenvalues(cov);  // ascending

    const PcaModel model = pca_fit(x, 6);
    for (int i = 0; i < 6; ++i) {
      CHECK(model.explained_variance(i) ==
            doctest::Approx(eigs[static_cast<std::size_t>(5 - i)]).epsilon(1e-8));
      if (i > 0) {
        CHECK(model.explained_variance(i) <= model.explained_variance(i - 1) + 1e-12);
      }
    }

    // components orthonormal
    const Eigen::MatrixXd gram = model.components.transpose() * model.components;
    CHECK((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-9);
  }

  SUBCASE("transform of the mean row is zero") {
    const Eigen::MatrixXd x = rng.matrix(25, 4);
    const PcaModel model = pca_fit(x, 3);
    const Eigen::MatrixXd mean_row = model.mean.transpose();
    CHECK(pca_transform(model, mean_row).cwiseAbs().maxCoeff() < 1e-12);

    // projection never grows the norm
    for (int i = 0; i < 25; ++i) {
      const Eigen::MatrixXd row = x.row(i);
      const double projected_norm = pca_transform(model, row).norm();
      const double centered_norm = (row - mean_row).norm();
      CHECK(projected_norm <= centered_norm + 1e-10);
    }
  }

  SUBCASE("reconstruction error shrinks with more components") {
    const Eigen::MatrixXd x = rng.matrix(30, 8);
    double previous = 1e300;
    for (int c = 1; c <= 8; ++c) {
      const PcaModel model = pca_fit(x, c);
      const Eigen::MatrixXd rebuilt =
          (pca_transform(model, x) * model.components.transpose()).rowwise() +
          model.mean.transpose();
      const double err = (rebuilt - x).norm();
      CHECK(err <= previous + 1e-10);
      previous = err;
    }
  }

  SUBCASE("component bounds") {
    const Eigen::MatrixXd x = rng.matrix(10, 4);
    CHECK_THROWS_AS(pca_fit(x, 0), TooManyComponents);
    CHECK_THROWS_AS(pca_fit(x, 5), TooManyComponents);
    const PcaModel model = pca_fit(x, 2);
    CHECK_THROWS_AS(pca_transform(model, Eigen::MatrixXd::Zero(3, 7)),
                    DimensionMismatch);
  }
}

TEST_CASE("ols") {
  oracles::TestRng rng(19);

  SUBCASE("noiseless line") {
    Eigen::MatrixXd x(10, 1);
    Eigen::VectorXd y(10);
    for (int i = 0; i < 10; ++i) {
      x(i, 0) = i;
      y(i) = 2.0 * i + 1.0;
    }
    const LinearModel model = ols_fit(x, y);
    CHECK(model.weights(0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(model.intercept == doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("constant target") {
    const Eigen::MatrixXd x = rng.matrix(12, 3);
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(12, 4.5);
    const LinearModel model = ols_fit(x, y);
    CHECK(model.weights.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(model.intercept == doctest::Approx(4.5));
  }

  SUBCASE("matches the normal equations") {
    const Eigen::MatrixXd x = rng.matrix(40, 5);
    const Eigen::VectorXd y = rng.vector(40);
    const LinearModel model = ols_fit(x, y);

    const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
    const Eigen::VectorXd yc = y.array() - y.mean();
    const Eigen::VectorXd w_oracle =
        (xc.transpose() * xc).ldlt().solve(xc.transpose() * yc);
    CHECK((model.weights - w_oracle).cwiseAbs().maxCoeff() < 1e-8);

    // residual orthogonal to the columns
    const Eigen::VectorXd r = y - model.predict(x);
    CHECK((x.transpose() * r).cwiseAbs().maxCoeff() < 1e-8);
  }

  SUBCASE("rank deficiency falls back to the least-norm solution") {
    Eigen::MatrixXd x = rng.matrix(20, 3);
    x.conservativeResize(20, 4);
    x.col(3) = x.col(1);  // duplicated column
    const Eigen::VectorXd y = rng.vector(20);
    const LinearModel model = ols_fit(x, y);
    CHECK(model.weights.allFinite());
    const Eigen::VectorXd r = y - model.predict(x);
    CHECK((x.transpose() * r).cwiseAbs().maxCoeff() < 1e-8);
    // least-norm splits the duplicated direction evenly
    CHECK(model.weights(1) == doctest::Approx(model.weights(3)).epsilon(1e-8));
  }
}

TEST_CASE("lasso") {
  oracles::TestRng rng(23);

  SUBCASE("lambda zero matches ols") {
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::MatrixXd x = rng.matrix(60, 8);
      const Eigen::VectorXd y = rng.vector(60);
      const LinearModel lasso = lasso_fit(x, y, 0.0, 50000, 1e-13);
      const LinearModel ols = ols_fit(x, y);
      CHECK((lasso.weights - ols.weights).cwiseAbs().maxCoeff() < 1e-6);
      CHECK(lasso.intercept == doctest::Approx(ols.intercept).epsilon(1e-6));
    }
  }

  SUBCASE("lambda above the critical value kills every weight") {
    const Eigen::MatrixXd x = standardized(rng.matrix(50, 6));
    const Eigen::VectorXd y = rng.vector(50);
    const Eigen::VectorXd yc = y.array() - y.mean();
    const double lambda_max =
        (x.transpose() * yc).cwiseAbs().maxCoeff() / 50.0;
    const LinearModel model = lasso_fit(x, y, lambda_max * 1.0001);
    CHECK(model.weights.cwiseAbs().maxCoeff() == 0.0);
    CHECK(model.intercept == doctest::Approx(y.mean()));
  }

  SUBCASE("KKT conditions hold at the solution") {
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::MatrixXd x = standardized(rng.matrix(50, 10));
      const Eigen::VectorXd y = rng.vector(50);
      const double lambda = 0.02 + 0.05 * rng.uniform();
      const LinearModel model = lasso_fit(x, y, lambda, 50000, 1e-12);
      CHECK(model.converged);
      CHECK(kkt_violation(x, y, model, lambda) < 1e-6);
    }
  }

  SUBCASE("sparsity grows along the lambda path") {
    const Eigen::MatrixXd x = standardized(rng.matrix(80, 12));
    Eigen::VectorXd w_true = Eigen::VectorXd::Zero(12);
    w_true(1) = 2.0;
    w_true(5) = -1.0;
    w_true(9) = 0.5;
    const Eigen::VectorXd y = x * w_true + 0.05 * rng.vector(80);

    int previous_zeros = -1;
    for (double lambda : {0.0, 0.01, 0.05, 0.1, 0.3, 1.0}) {
      const LinearModel model = lasso_fit(x, y, lambda, 50000, 1e-12);
      int zeros = 0;
      for (Eigen::Index j = 0; j < 12; ++j) {
        if (model.weights(j) == 0.0) ++zeros;
      }
      CHECK(zeros >= previous_zeros);
      previous_zeros = zeros;
    }
  }
}

TEST_CASE("metrics") {
  SUBCASE("perfect predictions") {
    Eigen::VectorXd y(4);
    y << 1, 2, 3, 4;
    const Metrics m = compute_metrics(y, y);
    CHECK(m.mse == 0.0);
    CHECK(m.r2 == doctest::Approx(1.0));
    CHECK(m.pearson == doctest::Approx(1.0));
  }

  SUBCASE("predicting the mean gives r2 = 0") {
    Eigen::VectorXd y(4);
    y << 1, 2, 3, 4;
    const Eigen::VectorXd pred = Eigen::VectorXd::Constant(4, y.mean());
    const Metrics m = compute_metrics(y, pred);
    CHECK(m.r2 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(m.pearson_valid);
  }

  SUBCASE("hand-computed three point case") {
    Eigen::VectorXd y(3), pred(3);
    y << 1, 2, 3;
    pred << 1, 2, 4;
    const Metrics m = compute_metrics(y, pred);
    CHECK(m.mse == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(std::abs(m.rmse - 0.5774) < 1e-4);
    CHECK(m.rmse * m.rmse == doctest::Approx(m.mse).epsilon(1e-12));
  }

  SUBCASE("length checks") {
    Eigen::VectorXd a(3), b(2);
    a.setZero();
    b.setZero();
    CHECK_THROWS_AS(compute_metrics(a, b), DimensionMismatch);
  }
}

TEST_CASE("metrics summary keeps rmse^2 == mse") {
  std::vector<Metrics> samples;
  Eigen::VectorXd y(4), p(4);
  y << 1, 2, 3, 4;
  p << 1.1, 2.2, 2.9, 3.7;
  samples.push_back(compute_metrics(y, p));
  p << 0.9, 2.0, 3.3, 4.4;
  samples.push_back(compute_metrics(y, p));
  const MetricsSummary s = summarize_metrics(samples);
  CHECK(s.mean.rmse * s.mean.rmse == doctest::Approx(s.mean.mse).epsilon(1e-12));
  CHECK(s.count == 2);
}

TEST_CASE("cross validation") {
  oracles::TestRng rng(29);

  SUBCASE("leave-one-group-out builds one fold per group") {
    const auto folds = make_folds(
        CvScheme::leave_one_group_out({1, 1, 2, 2}), 4);
    REQUIRE(folds.size() == 2);
    CHECK(folds[0].size() == 2);
    CHECK(folds[1].size() == 2);
  }

  SUBCASE("k-fold partitions the index set") {
    const auto folds = make_folds(CvScheme::k_fold(4, 7), 22);
    REQUIRE(folds.size() == 4);
    std::vector<int> seen(22, 0);
    for (const auto& fold : folds) {
      for (Eigen::Index i : fold) ++seen[static_cast<std::size_t>(i)];
    }
    for (int count : seen) CHECK(count == 1);
  }

  SUBCASE("perfect linear data scores r2 == 1 per fold") {
    Eigen::MatrixXd x(24, 2);
    Eigen::VectorXd y(24);
    for (int i = 0; i < 24; ++i) {
      x(i, 0) = rng.normal();
      x(i, 1) = rng.normal();
      y(i) = 3.0 * x(i, 0) - 1.5 * x(i, 1) + 0.25;
    }
    PipelineSpec spec;
    const CvResult result = cross_validate(x, y, spec, CvScheme::k_fold(4, 3));
    for (const auto& fold : result.folds) {
      CHECK(fold.metrics.r2 == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  SUBCASE("shuffled-target control stays near zero") {
    const Eigen::MatrixXd x = rng.matrix(400, 2);
    const Eigen::VectorXd y = rng.vector(400);
    PipelineSpec spec;
    const CvResult result = cross_validate(x, y, spec, CvScheme::k_fold(5, 11));
    CHECK(std::abs(result.summary.mean.r2) <= 3.0 * result.summary.se.r2);
  }

  SUBCASE("no leakage: mutating held-out targets leaves predictions unchanged") {
    const Eigen::MatrixXd x = rng.matrix(30, 12);
    Eigen::VectorXd y = x.col(0) + 0.1 * rng.vector(30);
    std::vector<int> groups(30);
    for (int i = 0; i < 30; ++i) groups[static_cast<std::size_t>(i)] = i < 15 ? 1 : 2;

    PipelineSpec spec;
    spec.reduction = PipelineSpec::Reduction::KBest;
    spec.reduction_size = 4;

    const CvScheme cv = CvScheme::leave_one_group_out(groups);
    const CvResult before = cross_validate(x, y, spec, cv);

    // poison the targets of group 2 (the test fold whose train is group 1)
    for (int i = 15; i < 30; ++i) y(i) += 100.0 * rng.normal();
    const CvResult after = cross_validate(x, y, spec, cv);

    // fold 1 tests on group 2 and trains on group 1, which is untouched
    CHECK((before.folds[1].predictions - after.folds[1].predictions)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    // sanity: the poisoned fold's metrics did change
    CHECK(before.folds[1].metrics.mse != after.folds[1].metrics.mse);
  }

  SUBCASE("nested lambda grid is resolved on training folds") {
    Eigen::MatrixXd x = rng.matrix(60, 6);
    Eigen::VectorXd w_true = Eigen::VectorXd::Zero(6);
    w_true(0) = 2.0;
    w_true(3) = -1.0;
    const Eigen::VectorXd y = x * w_true + 0.1 * rng.vector(60);

    PipelineSpec spec;
    spec.regressor = PipelineSpec::Regressor::Lasso;
    spec.lasso_lambda_grid = {0.001, 0.01, 0.1, 1.0};
    const CvResult result = cross_validate(x, y, spec, CvScheme::k_fold(3, 17));
    for (const auto& fold : result.folds) {
      CHECK(fold.chosen_lambda >= 0.001);
      CHECK(fold.chosen_lambda <= 1.0);
      CHECK(fold.metrics.r2 > 0.8);
    }
  }

  SUBCASE("pca reduction inside cv") {
    const Eigen::MatrixXd x = rng.matrix(40, 10);
    const Eigen::VectorXd y = x.col(1) + 0.05 * rng.vector(40);
    PipelineSpec spec;
    spec.reduction = PipelineSpec::Reduction::Pca;
    spec.reduction_size = 5;
    const CvResult result = cross_validate(x, y, spec, CvScheme::k_fold(4, 23));
    CHECK(result.summary.mean.r2 > 0.0);
    CHECK(result.summary.count == 4);
  }

  SUBCASE("fold validation") {
    const Eigen::MatrixXd x = rng.matrix(6, 2);
    const Eigen::VectorXd y = rng.vector(6);
    CHECK_THROWS_AS(make_folds(CvScheme::k_fold(1, 0), 6), FoldTooSmall);
    CHECK_THROWS_AS(make_folds(CvScheme::k_fold(7, 0), 6), FoldTooSmall);
    CHECK_THROWS_AS(make_folds(CvScheme::leave_one_group_out({1, 1, 1}), 3),
                    FoldTooSmall);
    CHECK_THROWS_AS(make_folds(CvScheme::leave_one_group_out({1, 2}), 3),
                    DimensionMismatch);
  }
}
