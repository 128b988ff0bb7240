#ifndef GRAPHLET_PIPELINE_HPP
#define GRAPHLET_PIPELINE_HPP

// Regression machinery: univariate feature selection, PCA, OLS, Lasso by
// coordinate descent, leakage-free cross-validation and the standard
// regression metrics.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "graphlet/errors.hpp"
#include "graphlet/graph_core.hpp"
#include "graphlet/rng.hpp"

namespace graphlet {

namespace detail {

// Pearson correlation; NaN when either input is constant.
inline double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd ac = a.array() - a.mean();
  const Eigen::ArrayXd bc = b.array() - b.mean();
  const double denom = std::sqrt(ac.square().sum() * bc.square().sum());
  if (denom == 0.0 || !std::isfinite(denom)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::clamp((ac * bc).sum() / denom, -1.0, 1.0);
}

}  // namespace detail

// Indices of the k features with the largest |Pearson correlation with y|,
// in score order; ties broken by lower column index. Constant features
// score 0.
inline std::vector<Eigen::Index> select_k_best(const Eigen::MatrixXd& x,
                                               const Eigen::VectorXd& y,
                                               Eigen::Index k) {
  if (y.size() != x.rows()) throw DimensionMismatch("select_k_best: rows != |y|");
  if (x.rows() < 3) throw InvalidInput("select_k_best: need at least 3 samples");
  if (k < 1 || k > x.cols()) {
    throw KOutOfRange("select_k_best: k=" + std::to_string(k) +
                      " outside [1, " + std::to_string(x.cols()) + "]");
  }

  std::vector<std::pair<double, Eigen::Index>> scored;
  scored.reserve(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double r = detail::pearson(x.col(j), y);
    scored.emplace_back(std::isnan(r) ? 0.0 : std::abs(r), j);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<Eigen::Index> out(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = scored[static_cast<std::size_t>(i)].second;
  return out;
}

inline Eigen::MatrixXd take_columns(const Eigen::MatrixXd& x,
                                    const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = x.col(idx[j]);
  return out;
}

struct PcaModel {
  Eigen::VectorXd mean;                // length q
  Eigen::MatrixXd components;          // q x n_components, orthonormal columns
  Eigen::VectorXd explained_variance;  // nonincreasing
};

// Top right-singular vectors of the centered data. Component signs follow
// the same largest-entry-nonnegative rule as eigenvectors.
inline PcaModel pca_fit(const Eigen::MatrixXd& x, Eigen::Index n_components) {
  const Eigen::Index m = x.rows();
  const Eigen::Index q = x.cols();
  if (m < 2) throw InvalidInput("pca_fit: need at least 2 samples");
  if (n_components < 1 || n_components > std::min(m, q)) {
    throw TooManyComponents("pca_fit: n_components=" + std::to_string(n_components) +
                            " outside [1, min(" + std::to_string(m) + ", " +
                            std::to_string(q) + ")]");
  }
  PcaModel model;
  model.mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - model.mean.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
  model.components = svd.matrixV().leftCols(n_components);
  fix_eigenvector_signs(model.components);
  model.explained_variance =
      svd.singularValues().head(n_components).array().square() /
      static_cast<double>(m - 1);
  return model;
}

inline Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.mean.size()) {
    throw DimensionMismatch("pca_transform: " + std::to_string(x.cols()) +
                            " columns, model fit on " +
                            std::to_string(model.mean.size()));
  }
  return (x.rowwise() - model.mean.transpose()) * model.components;
}

struct LinearModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  bool converged = true;
  int iterations = 0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
    if (x.cols() != weights.size()) {
      throw DimensionMismatch("predict: feature count mismatch");
    }
    return (x * weights).array() + intercept;
  }
};

// Least squares with intercept; rank-deficient systems get the least-norm
// solution.
inline LinearModel ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (y.size() != x.rows()) throw DimensionMismatch("ols_fit: rows != |y|");
  if (x.rows() < 1) throw InvalidInput("ols_fit: empty system");

  const Eigen::RowVectorXd mean_x = x.colwise().mean();
  const double mean_y = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - mean_x;
  const Eigen::VectorXd yc = y.array() - mean_y;

  LinearModel model;
  model.weights = xc.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(yc);
  model.intercept = mean_y - mean_x.dot(model.weights);
  return model;
}

// Coordinate descent for (1/2m)||y - Xw - b||^2 + lambda ||w||_1.
// Columns are scaled to zero mean and unit second moment internally
// (sd_j = sqrt(sum (x_ij - mu_j)^2 / m)) and the weights are mapped back,
// so KKT conditions hold in the standardized coordinates. Constant columns
// get weight 0.
inline LinearModel lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             double lambda, int max_iter = 10000,
                             double tol = 1e-10) {
  if (y.size() != x.rows()) throw DimensionMismatch("lasso_fit: rows != |y|");
  if (lambda < 0.0) throw InvalidInput("lasso_fit: lambda must be >= 0");
  const Eigen::Index m = x.rows();
  const Eigen::Index q = x.cols();
  if (m < 2) throw InvalidInput("lasso_fit: need at least 2 samples");

  const Eigen::RowVectorXd mean_x = x.colwise().mean();
  const double mean_y = y.mean();
  Eigen::MatrixXd xs = x.rowwise() - mean_x;
  Eigen::VectorXd sd(q);
  for (Eigen::Index j = 0; j < q; ++j) {
    sd(j) = std::sqrt(xs.col(j).squaredNorm() / static_cast<double>(m));
    if (sd(j) > 1e-15) xs.col(j) /= sd(j);
  }
  const Eigen::VectorXd yc = y.array() - mean_y;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd residual = yc;
  const double inv_m = 1.0 / static_cast<double>(m);

  LinearModel model;
  model.converged = false;
  int it = 0;
  for (; it < max_iter; ++it) {
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < q; ++j) {
      if (sd(j) <= 1e-15) continue;
      const double w_old = w(j);
      const double rho = inv_m * xs.col(j).dot(residual) + w_old;
      const double w_new =
          std::copysign(std::max(std::abs(rho) - lambda, 0.0), rho);
      if (w_new != w_old) {
        residual.noalias() += xs.col(j) * (w_old - w_new);
        w(j) = w_new;
        max_delta = std::max(max_delta, std::abs(w_new - w_old));
      }
    }
    if (max_delta < tol) {
      model.converged = true;
      ++it;
      break;
    }
  }

  for (Eigen::Index j = 0; j < q; ++j) {
    if (sd(j) > 1e-15) w(j) /= sd(j);
  }
  model.weights = std::move(w);
  model.intercept = mean_y - mean_x.dot(model.weights);
  model.iterations = it;
  return model;
}

struct Metrics {
  double mse = 0.0;
  double rmse = 0.0;
  double r2 = 0.0;
  double pearson = 0.0;
  bool pearson_valid = true;
};

inline Metrics compute_metrics(const Eigen::VectorXd& y_true,
                               const Eigen::VectorXd& y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw DimensionMismatch("metrics: length mismatch");
  }
  if (y_true.size() < 2) throw InvalidInput("metrics: need at least 2 values");

  Metrics metrics;
  metrics.mse = (y_true - y_pred).squaredNorm() / static_cast<double>(y_true.size());
  metrics.rmse = std::sqrt(metrics.mse);
  const double ss_tot = (y_true.array() - y_true.mean()).square().sum();
  const double ss_res = (y_true - y_pred).squaredNorm();
  metrics.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot
                            : std::numeric_limits<double>::quiet_NaN();
  metrics.pearson = detail::pearson(y_true, y_pred);
  metrics.pearson_valid = !std::isnan(metrics.pearson);
  return metrics;
}

// Point estimates and standard errors across folds (or trials).
// The reported rmse is sqrt(mean mse) -- the pooled value, which keeps
// rmse^2 == mse -- with its SE from the dispersion of per-fold rmse.
struct MetricsSummary {
  Metrics mean;
  Metrics se;
  int count = 0;
};

inline MetricsSummary summarize_metrics(const std::vector<Metrics>& samples) {
  if (samples.empty()) throw InvalidInput("summarize_metrics: no samples");
  MetricsSummary s;
  s.count = static_cast<int>(samples.size());
  const double n = static_cast<double>(samples.size());

  const auto mean_se = [n](const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    if (v.size() < 2) return std::make_pair(mean, 0.0);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::make_pair(mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n));
  };

  std::vector<double> mse, rmse, r2, pearson;
  bool pearson_ok = true;
  for (const Metrics& m : samples) {
    mse.push_back(m.mse);
    rmse.push_back(m.rmse);
    r2.push_back(m.r2);
    pearson.push_back(m.pearson);
    pearson_ok = pearson_ok && m.pearson_valid;
  }
  std::tie(s.mean.mse, s.se.mse) = mean_se(mse);
  std::tie(std::ignore, s.se.rmse) = mean_se(rmse);
  s.mean.rmse = std::sqrt(s.mean.mse);
  std::tie(s.mean.r2, s.se.r2) = mean_se(r2);
  if (pearson_ok) {
    std::tie(s.mean.pearson, s.se.pearson) = mean_se(pearson);
  } else {
    s.mean.pearson = std::numeric_limits<double>::quiet_NaN();
    s.se.pearson = std::numeric_limits<double>::quiet_NaN();
  }
  s.mean.pearson_valid = pearson_ok;
  s.se.pearson_valid = pearson_ok;
  return s;
}

struct CvScheme {
  enum class Kind { KFold, LeaveOneGroupOut };
  Kind kind = Kind::KFold;
  int n_folds = 5;
  std::vector<int> groups;  // one label per sample, LeaveOneGroupOut only
  std::uint64_t shuffle_seed = 0;

  static CvScheme k_fold(int k, std::uint64_t seed) {
    CvScheme cv;
    cv.kind = Kind::KFold;
    cv.n_folds = k;
    cv.shuffle_seed = seed;
    return cv;
  }
  static CvScheme leave_one_group_out(std::vector<int> labels) {
    CvScheme cv;
    cv.kind = Kind::LeaveOneGroupOut;
    cv.groups = std::move(labels);
    return cv;
  }
};

// Test-index sets; every sample lands in exactly one fold.
inline std::vector<std::vector<Eigen::Index>> make_folds(const CvScheme& cv,
                                                         Eigen::Index m) {
  std::vector<std::vector<Eigen::Index>> folds;
  if (cv.kind == CvScheme::Kind::KFold) {
    if (cv.n_folds < 2 || cv.n_folds > m) {
      throw FoldTooSmall("k-fold: k=" + std::to_string(cv.n_folds) +
                         " invalid for m=" + std::to_string(m));
    }
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    Rng rng(cv.shuffle_seed);
    rng.shuffle(idx);
    folds.resize(static_cast<std::size_t>(cv.n_folds));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      folds[i * static_cast<std::size_t>(cv.n_folds) / idx.size()].push_back(idx[i]);
    }
  } else {
    if (static_cast<Eigen::Index>(cv.groups.size()) != m) {
      throw DimensionMismatch("leave-one-group-out: group labels != sample count");
    }
    std::map<int, std::vector<Eigen::Index>> by_group;
    for (Eigen::Index i = 0; i < m; ++i) {
      by_group[cv.groups[static_cast<std::size_t>(i)]].push_back(i);
    }
    if (by_group.size() < 2) {
      throw FoldTooSmall("leave-one-group-out: need at least 2 groups");
    }
    for (auto& [label, members] : by_group) folds.push_back(std::move(members));
  }
  for (const auto& f : folds) {
    if (f.empty()) throw FoldTooSmall("cross-validation produced an empty fold");
  }
  return folds;
}

struct PipelineSpec {
  enum class Reduction { None, KBest, Pca };
  enum class Regressor { Ols, Lasso };

  Reduction reduction = Reduction::None;
  Eigen::Index reduction_size = 0;  // k for KBest, components for Pca
  Regressor regressor = Regressor::Ols;
  double lasso_lambda = 0.0;
  std::vector<double> lasso_lambda_grid;  // nonempty: nested CV on train folds
  int lasso_max_iter = 10000;
  double lasso_tol = 1e-10;
};

struct CvFold {
  std::vector<Eigen::Index> test_indices;
  Metrics metrics;
  Eigen::VectorXd predictions;
  double chosen_lambda = 0.0;
};

struct CvResult {
  std::vector<CvFold> folds;
  MetricsSummary summary;
};

namespace detail {

struct FittedPipeline {
  PipelineSpec::Reduction reduction;
  std::vector<Eigen::Index> selected;
  PcaModel pca;
  LinearModel model;
  double lambda = 0.0;

  Eigen::MatrixXd reduce(const Eigen::MatrixXd& x) const {
    switch (reduction) {
      case PipelineSpec::Reduction::KBest: return take_columns(x, selected);
      case PipelineSpec::Reduction::Pca: return pca_transform(pca, x);
      default: return x;
    }
  }
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
    return model.predict(reduce(x));
  }
};

inline FittedPipeline fit_pipeline(const Eigen::MatrixXd& x_train,
                                   const Eigen::VectorXd& y_train,
                                   const PipelineSpec& spec, double lambda) {
  FittedPipeline fitted;
  fitted.reduction = spec.reduction;
  fitted.lambda = lambda;
  Eigen::MatrixXd reduced;
  switch (spec.reduction) {
    case PipelineSpec::Reduction::KBest: {
      const Eigen::Index k = std::min(spec.reduction_size, x_train.cols());
      fitted.selected = select_k_best(x_train, y_train, k);
      reduced = take_columns(x_train, fitted.selected);
      break;
    }
    case PipelineSpec::Reduction::Pca: {
      const Eigen::Index c =
          std::min(spec.reduction_size, std::min(x_train.rows(), x_train.cols()));
      fitted.pca = pca_fit(x_train, c);
      reduced = pca_transform(fitted.pca, x_train);
      break;
    }
    default: reduced = x_train;
  }
  if (spec.regressor == PipelineSpec::Regressor::Ols) {
    fitted.model = ols_fit(reduced, y_train);
  } else {
    fitted.model =
        lasso_fit(reduced, y_train, lambda, spec.lasso_max_iter, spec.lasso_tol);
  }
  return fitted;
}

// Mean held-out MSE of an inner k-fold on the training block, one value
// per candidate lambda; ties prefer the larger (sparser) lambda.
inline double pick_lambda(const Eigen::MatrixXd& x_train,
                          const Eigen::VectorXd& y_train,
                          const PipelineSpec& spec, std::uint64_t seed) {
  const int inner_k =
      std::max(2, std::min(3, static_cast<int>(x_train.rows() / 2)));
  const auto inner_folds =
      make_folds(CvScheme::k_fold(inner_k, seed), x_train.rows());

  double best_lambda = spec.lasso_lambda_grid.front();
  double best_mse = std::numeric_limits<double>::infinity();
  for (double lambda : spec.lasso_lambda_grid) {
    double total = 0.0;
    for (const auto& test_idx : inner_folds) {
      std::vector<char> in_test(static_cast<std::size_t>(x_train.rows()), 0);
      for (Eigen::Index i : test_idx) in_test[static_cast<std::size_t>(i)] = 1;
      std::vector<Eigen::Index> train_idx;
      for (Eigen::Index i = 0; i < x_train.rows(); ++i) {
        if (!in_test[static_cast<std::size_t>(i)]) train_idx.push_back(i);
      }
      Eigen::MatrixXd xi(static_cast<Eigen::Index>(train_idx.size()), x_train.cols());
      Eigen::VectorXd yi(static_cast<Eigen::Index>(train_idx.size()));
      for (std::size_t r = 0; r < train_idx.size(); ++r) {
        xi.row(static_cast<Eigen::Index>(r)) = x_train.row(train_idx[r]);
        yi(static_cast<Eigen::Index>(r)) = y_train(train_idx[r]);
      }
      const FittedPipeline fitted = fit_pipeline(xi, yi, spec, lambda);
      Eigen::MatrixXd xt(static_cast<Eigen::Index>(test_idx.size()), x_train.cols());
      Eigen::VectorXd yt(static_cast<Eigen::Index>(test_idx.size()));
      for (std::size_t r = 0; r < test_idx.size(); ++r) {
        xt.row(static_cast<Eigen::Index>(r)) = x_train.row(test_idx[r]);
        yt(static_cast<Eigen::Index>(r)) = y_train(test_idx[r]);
      }
      total += (yt - fitted.predict(xt)).squaredNorm() /
               static_cast<double>(test_idx.size());
    }
    const double mean_mse = total / static_cast<double>(inner_folds.size());
    if (mean_mse < best_mse - 1e-15 ||
        (std::abs(mean_mse - best_mse) <= 1e-15 && lambda > best_lambda)) {
      best_mse = mean_mse;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

}  // namespace detail

// Held-out scores per fold with mean and SE = sd / sqrt(n_folds). Feature
// selection, PCA and standardization are fit on the training folds only;
// an inner lambda grid (Lasso) is also resolved on the training folds.
inline CvResult cross_validate(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const PipelineSpec& spec, const CvScheme& cv) {
  if (y.size() != x.rows()) throw DimensionMismatch("cross_validate: rows != |y|");
  const auto folds = make_folds(cv, x.rows());

  CvResult result;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& test_idx = folds[f];
    std::vector<char> in_test(static_cast<std::size_t>(x.rows()), 0);
    for (Eigen::Index i : test_idx) in_test[static_cast<std::size_t>(i)] = 1;
    std::vector<Eigen::Index> train_idx;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (!in_test[static_cast<std::size_t>(i)]) train_idx.push_back(i);
    }
    if (train_idx.size() < 2 || test_idx.empty()) {
      throw FoldTooSmall("cross_validate: fold " + std::to_string(f) + " too small");
    }

    Eigen::MatrixXd x_train(static_cast<Eigen::Index>(train_idx.size()), x.cols());
    Eigen::VectorXd y_train(static_cast<Eigen::Index>(train_idx.size()));
    for (std::size_t r = 0; r < train_idx.size(); ++r) {
      x_train.row(static_cast<Eigen::Index>(r)) = x.row(train_idx[r]);
      y_train(static_cast<Eigen::Index>(r)) = y(train_idx[r]);
    }
    Eigen::MatrixXd x_test(static_cast<Eigen::Index>(test_idx.size()), x.cols());
    Eigen::VectorXd y_test(static_cast<Eigen::Index>(test_idx.size()));
    for (std::size_t r = 0; r < test_idx.size(); ++r) {
      x_test.row(static_cast<Eigen::Index>(r)) = x.row(test_idx[r]);
      y_test(static_cast<Eigen::Index>(r)) = y(test_idx[r]);
    }

    double lambda = spec.lasso_lambda;
    if (spec.regressor == PipelineSpec::Regressor::Lasso &&
        !spec.lasso_lambda_grid.empty()) {
      lambda = detail::pick_lambda(x_train, y_train, spec,
                                   derive_seed(cv.shuffle_seed, 1000 + f));
    }
    const detail::FittedPipeline fitted =
        detail::fit_pipeline(x_train, y_train, spec, lambda);

    CvFold fold;
    fold.test_indices = test_idx;
    fold.predictions = fitted.predict(x_test);
    fold.metrics = compute_metrics(y_test, fold.predictions);
    fold.chosen_lambda = lambda;
    result.folds.push_back(std::move(fold));
  }

  std::vector<Metrics> per_fold;
  for (const auto& f : result.folds) per_fold.push_back(f.metrics);
  result.summary = summarize_metrics(per_fold);
  return result;
}

}  // namespace graphlet

#endif  // GRAPHLET_PIPELINE_HPP
