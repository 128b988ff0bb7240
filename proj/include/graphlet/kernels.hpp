#ifndef GRAPHLET_KERNELS_HPP
#define GRAPHLET_KERNELS_HPP

// Wavelet kernel families and scaling functions evaluated on a graph
// spectrum: cubic spline, Meyer, iterated sine (all placed with dyadic
// log-spaced scales) and spectrum-adapted warped translates, where uniform
// cosine windows live in coordinates warped by the empirical CDF of the
// eigenvalues so that resolution concentrates where eigenvalues cluster.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "graphlet/errors.hpp"

namespace graphlet {

namespace detail {
inline constexpr double kPi = 3.14159265358979323846;

// Meyer auxiliary polynomial: nu(0)=0, nu(1)=1, C^3 at both ends.
// Clamped to [0, 1]: near t=1 rounding can push the raw value past 1,
// which would flip the cosine branch slightly negative.
inline double meyer_nu(double t) {
  const double v = t * t * t * t * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t);
  return std::clamp(v, 0.0, 1.0);
}
}  // namespace detail

// Band-pass bump with g(1)=g(2)=1, x^2 rise below 1, 4/x^2 decay above 2.
inline double cubic_spline_kernel(double x) {
  if (x < 0.0) throw NegativeArgument("cubic_spline_kernel: x < 0");
  if (x < 1.0) return x * x;
  if (x <= 2.0) return -5.0 + 11.0 * x - 6.0 * x * x + x * x * x;
  return 4.0 / (x * x);
}

// Meyer window on [1/2, 2], peak value 1 at x=1.
inline double meyer_kernel(double x) {
  if (x < 0.0) throw NegativeArgument("meyer_kernel: x < 0");
  if (x <= 0.5 || x >= 2.0) return 0.0;
  if (x < 1.0) return std::sin(0.5 * detail::kPi * detail::meyer_nu(2.0 * x - 1.0));
  return std::cos(0.5 * detail::kPi * detail::meyer_nu(x - 1.0));
}

// Half-cosine window with one sine iteration, supported on [1/2, 2]; in
// log2 coordinates the squares of its dyadic shifts sum to 1.
inline double iterated_sine_kernel(double x) {
  if (x < 0.0) throw NegativeArgument("iterated_sine_kernel: x < 0");
  if (x <= 0.5 || x >= 2.0) return 0.0;
  const double u = std::log2(x);  // in (-1, 1)
  const double c = std::cos(0.5 * detail::kPi * u);
  return std::sin(0.5 * detail::kPi * c * c);
}

// Nondecreasing piecewise-linear map from the spectrum to [0, 1].
struct WarpingFunction {
  std::vector<double> knots;   // ascending eigenvalue abscissae
  std::vector<double> values;  // nondecreasing ordinates in [0, 1]

  double operator()(double lambda) const {
    if (lambda <= knots.front()) return values.front();
    if (lambda >= knots.back()) return values.back();
    const auto it = std::upper_bound(knots.begin(), knots.end(), lambda);
    const std::size_t hi = static_cast<std::size_t>(it - knots.begin());
    const std::size_t lo = hi - 1;
    const double span = knots[hi] - knots[lo];
    const double t = (lambda - knots[lo]) / span;
    return values[lo] + t * (values[hi] - values[lo]);
  }
};

// Piecewise-linear interpolant of the empirical CDF of the eigenvalues:
// knot i at rank i/(n-1), duplicates collapsed to their mean rank, then
// rescaled so the ends sit exactly at 0 and 1.
inline WarpingFunction empirical_cdf_warping(const Eigen::VectorXd& eigenvalues) {
  const Eigen::Index n = eigenvalues.size();
  if (n < 2) throw DegenerateSpectrum("need at least 2 eigenvalues");
  for (Eigen::Index i = 1; i < n; ++i) {
    if (eigenvalues(i) < eigenvalues(i - 1)) {
      throw InvalidInput("eigenvalues must be ascending");
    }
  }
  if (eigenvalues(n - 1) == eigenvalues(0)) {
    throw DegenerateSpectrum("all eigenvalues equal");
  }

  WarpingFunction w;
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && eigenvalues(j + 1) == eigenvalues(i)) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j);
    w.knots.push_back(eigenvalues(i));
    w.values.push_back(mean_rank / static_cast<double>(n - 1));
    i = j + 1;
  }
  const double lo = w.values.front();
  const double hi = w.values.back();
  for (double& v : w.values) v = (v - lo) / (hi - lo);
  w.values.front() = 0.0;
  w.values.back() = 1.0;
  return w;
}

using KernelFn = std::function<double(double)>;

// One scaling function plus J band-pass kernels calibrated to a spectrum.
struct KernelBank {
  KernelFn scaling;
  std::vector<KernelFn> wavelets;
  double spectrum_max = 0.0;
  std::vector<std::string> band_labels;  // size J+1, label 0 is the scaling

  Eigen::Index n_bands() const {
    return static_cast<Eigen::Index>(wavelets.size()) + 1;
  }

  double band(Eigen::Index b, double lambda) const {
    return b == 0 ? scaling(lambda) : wavelets[static_cast<std::size_t>(b - 1)](lambda);
  }
};

enum class KernelFamily { CubicSpline, Meyer, IteratedSine, WarpedTranslate };

inline std::string kernel_family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::CubicSpline: return "cubic_spline";
    case KernelFamily::Meyer: return "meyer";
    case KernelFamily::IteratedSine: return "iterated_sine";
    case KernelFamily::WarpedTranslate: return "warped_translate";
  }
  return "unknown";
}

inline KernelFamily kernel_family_from_name(const std::string& name) {
  if (name == "cubic_spline") return KernelFamily::CubicSpline;
  if (name == "meyer") return KernelFamily::Meyer;
  if (name == "iterated_sine") return KernelFamily::IteratedSine;
  if (name == "warped_translate") return KernelFamily::WarpedTranslate;
  throw ConfigError(
      "unknown kernel family '" + name +
      "'; valid: cubic_spline, meyer, iterated_sine, warped_translate");
}

// Default wavelet band counts. Scale families follow the usual 4-scale
// dyadic analysis. Warped translates need a finer split: ER-style spectra
// pack almost every eigenvalue into one wide bulk next to an isolated zero,
// and with few translates the bottom band smears the informative low
// frequencies across that bulk.
inline constexpr int kDefaultScaleBands = 4;
inline constexpr int kDefaultWarpedTranslates = 16;

inline int default_band_count(KernelFamily family) {
  return family == KernelFamily::WarpedTranslate ? kDefaultWarpedTranslates
                                                 : kDefaultScaleBands;
}

struct KernelSpec {
  KernelFamily family = KernelFamily::WarpedTranslate;
  int n_bands = kDefaultWarpedTranslates;  // J wavelet bands (translates R)
  std::vector<double> cosine_coeffs = {0.5, 0.5};
};

// Log-spaced scales s_1 > ... > s_J with s_1 = 2/(lambda_max/20) and
// s_J = 2/lambda_max. J=1 keeps only the finest scale 2/lambda_max.
inline std::vector<double> select_scales(double lambda_max, int j_scales) {
  if (lambda_max <= 0.0) throw NonpositiveLambdaMax("lambda_max must be > 0");
  if (j_scales < 1) throw InvalidInput("scale count must be >= 1");

  const double s_fine = 2.0 / lambda_max;
  if (j_scales == 1) return {s_fine};
  const double s_coarse = 2.0 / (lambda_max / 20.0);
  std::vector<double> scales(static_cast<std::size_t>(j_scales));
  const double log_hi = std::log(s_coarse);
  const double log_lo = std::log(s_fine);
  for (int j = 0; j < j_scales; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(j_scales - 1);
    scales[static_cast<std::size_t>(j)] = std::exp(log_hi + t * (log_lo - log_hi));
  }
  scales.front() = s_coarse;
  scales.back() = s_fine;
  return scales;
}

// Bank of J dyadic-scale kernels plus a low-pass scaling function
// h(lambda) = exp(-(lambda / (0.6 * lambda_max/20))^4).
inline KernelBank scaled_kernel_bank(KernelFamily family, double lambda_max,
                                     int j_bands) {
  if (family == KernelFamily::WarpedTranslate) {
    throw InvalidInput("warped translates need warped_translate_bank");
  }
  const std::vector<double> scales = select_scales(lambda_max, j_bands);

  double (*mother)(double) = nullptr;
  switch (family) {
    case KernelFamily::CubicSpline: mother = cubic_spline_kernel; break;
    case KernelFamily::Meyer: mother = meyer_kernel; break;
    case KernelFamily::IteratedSine: mother = iterated_sine_kernel; break;
    default: break;
  }

  KernelBank bank;
  bank.spectrum_max = lambda_max;
  const double h_width = 0.6 * lambda_max / 20.0;
  bank.scaling = [h_width](double lambda) {
    const double r = lambda / h_width;
    return std::exp(-(r * r * r * r));
  };
  bank.band_labels.push_back("scaling");
  for (double s : scales) {
    // eigensolvers report the zero eigenvalue as -1e-16 or so; clamp
    bank.wavelets.push_back(
        [mother, s](double lambda) { return mother(s * std::max(lambda, 0.0)); });
    char label[32];
    std::snprintf(label, sizeof(label), "s=%.6g", s);
    bank.band_labels.push_back(label);
  }
  return bank;
}

namespace detail {

// Cosine-sum window sum_k a_k cos(2*pi*k*t) on |t| <= 1/2, negative lobes
// clipped to zero. Hann coefficients {1/2, 1/2} give cos^2(pi*t).
inline double cosine_window(const std::vector<double>& coeffs, double t) {
  if (t < -0.5 || t > 0.5) return 0.0;
  double v = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    v += coeffs[k] * std::cos(2.0 * kPi * static_cast<double>(k) * t);
  }
  return std::max(v, 0.0);
}

}  // namespace detail

// Spectrum-adapted tight bank: R+1 translates of one cosine window placed
// uniformly at m/R, m = 0..R, in warped coordinates. Each window spans two
// translate steps and the band response is the square root of the window,
// so the squared responses of the two bands covering any point telescope
// to a constant: with Hann coefficients, sum_m g_m(lambda)^2 == 1 on the
// whole spectrum. Band 0, centered at the spectrum bottom, serves as the
// scaling function.
inline KernelBank warped_translate_bank(const WarpingFunction& warp, int r_translates,
                                        const std::vector<double>& coeffs = {0.5, 0.5}) {
  if (r_translates < 2) throw TooFewTranslates("need at least 2 translates");
  if (coeffs.empty() || coeffs[0] <= 0.0) {
    throw InadmissibleCoefficients("cosine coefficients need a_0 > 0");
  }
  double alternating = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    alternating += (k % 2 == 0 ? coeffs[k] : -coeffs[k]);
  }
  if (std::abs(alternating) > 1e-9) {
    throw InadmissibleCoefficients(
        "cosine coefficients must satisfy sum_k (-1)^k a_k = 0 so the window "
        "vanishes at its support edge");
  }

  const double r = static_cast<double>(r_translates);
  KernelBank bank;
  bank.spectrum_max = warp.knots.back();

  const auto band_fn = [warp, coeffs, r](int m) {
    return [warp, coeffs, r, m](double lambda) {
      const double omega = warp(lambda);
      const double t = (omega - static_cast<double>(m) / r) * r * 0.5;
      return std::sqrt(detail::cosine_window(coeffs, t));
    };
  };

  bank.scaling = band_fn(0);
  bank.band_labels.push_back("scaling");
  for (int m = 1; m <= r_translates; ++m) {
    bank.wavelets.push_back(band_fn(m));
    char label[32];
    std::snprintf(label, sizeof(label), "m=%d", m);
    bank.band_labels.push_back(label);
  }

  // Tightness is the operative guarantee; verify it numerically on the
  // interior of the warped axis rather than trusting the coefficients.
  const double lo = warp.knots.front();
  const double hi = warp.knots.back();
  double min_sum = std::numeric_limits<double>::infinity();
  double max_sum = 0.0;
  const int grid = 2000;
  for (int i = 0; i <= grid; ++i) {
    const double lambda = lo + (hi - lo) * static_cast<double>(i) / grid;
    const double omega = warp(lambda);
    if (omega < 0.5 / r || omega > 1.0 - 0.5 / r) continue;
    double sum = 0.0;
    for (Eigen::Index b = 0; b < bank.n_bands(); ++b) {
      const double g = bank.band(b, lambda);
      sum += g * g;
    }
    min_sum = std::min(min_sum, sum);
    max_sum = std::max(max_sum, sum);
  }
  if (!(min_sum > 0.0) || (max_sum - min_sum) > 1e-8 * max_sum) {
    throw InadmissibleCoefficients(
        "cosine coefficients do not form a tight bank: squared sum varies by " +
        std::to_string(max_sum - min_sum));
  }
  return bank;
}

// A = min, B = max over eval_points of h(l)^2 + sum_j g_j(l)^2.
// A > 0 means the bank is a frame on those points.
inline std::pair<double, double> frame_bounds(const KernelBank& bank,
                                              const Eigen::VectorXd& eval_points) {
  if (eval_points.size() == 0) throw EmptyEvalPoints("no evaluation points");
  double a = std::numeric_limits<double>::infinity();
  double b = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < eval_points.size(); ++i) {
    double sum = 0.0;
    for (Eigen::Index band = 0; band < bank.n_bands(); ++band) {
      const double g = bank.band(band, eval_points(i));
      sum += g * g;
    }
    a = std::min(a, sum);
    b = std::max(b, sum);
  }
  return {a, b};
}

// Calibrate a bank of the requested family to a set of eigenvalues.
inline KernelBank make_bank(const KernelSpec& spec, const Eigen::VectorXd& eigenvalues) {
  if (spec.n_bands < 1) throw InvalidInput("kernel bands must be >= 1");
  if (spec.family == KernelFamily::WarpedTranslate) {
    const WarpingFunction warp = empirical_cdf_warping(eigenvalues);
    return warped_translate_bank(warp, spec.n_bands, spec.cosine_coeffs);
  }
  const double lambda_max = eigenvalues.maxCoeff();
  return scaled_kernel_bank(spec.family, lambda_max, spec.n_bands);
}

}  // namespace graphlet

#endif  // GRAPHLET_KERNELS_HPP
