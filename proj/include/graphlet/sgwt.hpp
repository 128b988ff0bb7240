#ifndef GRAPHLET_SGWT_HPP
#define GRAPHLET_SGWT_HPP

// Spectral graph wavelet transform: a kernel bank evaluated at the
// eigenvalues acts as a set of spectral multipliers; analysis of a signal
// is multiply-in-spectral-domain per band, which equals the inner product
// with every localized wavelet atom but costs a factor n less.

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "graphlet/errors.hpp"
#include "graphlet/graph_core.hpp"
#include "graphlet/kernels.hpp"

namespace graphlet {

struct WaveletFrame {
  Spectrum spectrum;
  Eigen::MatrixXd band_multipliers;  // (J+1) x n, row 0 is the scaling band
  std::vector<std::string> band_labels;

  Eigen::Index n_bands() const { return band_multipliers.rows(); }
  Eigen::Index n_nodes() const { return band_multipliers.cols(); }

  // min/max over eigenvalues of the squared multiplier column sums
  std::pair<double, double> bounds_on_eigenvalues() const {
    const Eigen::VectorXd sums = band_multipliers.colwise().squaredNorm();
    return {sums.minCoeff(), sums.maxCoeff()};
  }
};

inline WaveletFrame build_frame(const Spectrum& s, const KernelBank& bank) {
  const double lmax = s.lambda_max();
  if (lmax > bank.spectrum_max * (1.0 + 1e-9) + 1e-300) {
    throw SpectrumExceedsCalibration(
        "spectrum max " + std::to_string(lmax) + " exceeds bank calibration " +
        std::to_string(bank.spectrum_max));
  }
  WaveletFrame frame;
  frame.spectrum = s;
  frame.band_labels = bank.band_labels;
  frame.band_multipliers.resize(bank.n_bands(), s.size());
  for (Eigen::Index b = 0; b < bank.n_bands(); ++b) {
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      const double g = bank.band(b, s.eigenvalues(k));
      if (!std::isfinite(g) || g < 0.0) {
        throw InvalidInput("kernel produced invalid multiplier at band " +
                           std::to_string(b));
      }
      frame.band_multipliers(b, k) = g;
    }
  }
  return frame;
}

// Coefficients (J+1) x n: row b is igft(multipliers_b .* gft(f)).
inline Eigen::MatrixXd analyze(const WaveletFrame& frame, const Eigen::VectorXd& f) {
  if (f.size() != frame.n_nodes()) {
    throw DimensionMismatch("analyze: signal length " + std::to_string(f.size()) +
                            " != node count " + std::to_string(frame.n_nodes()));
  }
  const Eigen::VectorXd fhat = frame.spectrum.eigenvectors.transpose() * f;
  Eigen::MatrixXd coeffs(frame.n_bands(), frame.n_nodes());
  for (Eigen::Index b = 0; b < frame.n_bands(); ++b) {
    coeffs.row(b) = (frame.spectrum.eigenvectors *
                     frame.band_multipliers.row(b).transpose().cwiseProduct(fhat))
                        .transpose();
  }
  return coeffs;
}

// Rows of `signals` are independent graph signals; output row i is
// analyze(signal_i) flattened band-major: band 0 nodes 0..n-1, band 1, ...
inline Eigen::MatrixXd extract_features(const WaveletFrame& frame,
                                        const Eigen::MatrixXd& signals) {
  const Eigen::Index n = frame.n_nodes();
  if (signals.cols() != n) {
    throw DimensionMismatch("extract_features: signals have " +
                            std::to_string(signals.cols()) + " columns, graph has " +
                            std::to_string(n) + " nodes");
  }
  const Eigen::Index m = signals.rows();
  const Eigen::Index bands = frame.n_bands();
  const Eigen::MatrixXd& u = frame.spectrum.eigenvectors;

  const Eigen::MatrixXd spectral = signals * u;  // m x n, rows are gft(signal)
  Eigen::MatrixXd features(m, bands * n);
  for (Eigen::Index b = 0; b < bands; ++b) {
    features.middleCols(b * n, n) =
        (spectral.array().rowwise() * frame.band_multipliers.row(b).array()).matrix() *
        u.transpose();
  }
  return features;
}

// Inverse transform for tight frames: (1/A) sum_b igft(m_b .* gft(c_b)).
// Refuses frames whose bounds on the eigenvalues are not tight.
inline Eigen::VectorXd synthesize_tight(const WaveletFrame& frame,
                                        const Eigen::MatrixXd& coeffs) {
  if (coeffs.rows() != frame.n_bands() || coeffs.cols() != frame.n_nodes()) {
    throw DimensionMismatch("synthesize_tight: coefficient shape " +
                            std::to_string(coeffs.rows()) + "x" +
                            std::to_string(coeffs.cols()) + " != frame shape");
  }
  const auto [a, b] = frame.bounds_on_eigenvalues();
  if (!(a > 0.0) || b / a - 1.0 > 1e-6) {
    throw NotTight("frame bounds (" + std::to_string(a) + ", " + std::to_string(b) +
                   ") are not tight; least-squares reconstruction is not provided");
  }
  const Eigen::MatrixXd& u = frame.spectrum.eigenvectors;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(frame.n_nodes());
  for (Eigen::Index band = 0; band < frame.n_bands(); ++band) {
    const Eigen::VectorXd chat = u.transpose() * coeffs.row(band).transpose();
    acc.noalias() +=
        u * frame.band_multipliers.row(band).transpose().cwiseProduct(chat);
  }
  return acc / a;
}

}  // namespace graphlet

#endif  // GRAPHLET_SGWT_HPP
