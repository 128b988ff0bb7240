#ifndef GRAPHLET_GRAPH_CORE_HPP
#define GRAPHLET_GRAPH_CORE_HPP

// Graph representation, Laplacians, eigendecomposition and the graph
// Fourier transform.
//
// Weights may be signed; degrees are always sums of absolute weights, which
// keeps every Laplacian positive semi-definite (diagonal dominance).

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphlet/errors.hpp"

namespace graphlet {

class Graph {
 public:
  // Validates symmetry (exact), zero diagonal and finite entries.
  static Graph from_weights(Eigen::MatrixXd weights) {
    check_weights(weights);
    return Graph(std::move(weights), std::nullopt);
  }

  static Graph from_weights(Eigen::MatrixXd weights, Eigen::MatrixXd coords) {
    check_weights(weights);
    if (coords.rows() != weights.rows()) {
      throw DimensionMismatch(
          "coords rows (" + std::to_string(coords.rows()) +
          ") must equal node count (" + std::to_string(weights.rows()) + ")");
    }
    return Graph(std::move(weights), std::move(coords));
  }

  Eigen::Index n_nodes() const { return weights_.rows(); }
  const Eigen::MatrixXd& weights() const { return weights_; }
  bool has_coords() const { return coords_.has_value(); }
  const Eigen::MatrixXd& coords() const {
    if (!coords_) throw InvalidInput("graph has no node coordinates");
    return *coords_;
  }

  // Absolute degree vector, d_i = sum_j |w_ij|.
  Eigen::VectorXd absolute_degrees() const {
    return weights_.cwiseAbs().rowwise().sum();
  }

  bool connected() const {
    const Eigen::Index n = n_nodes();
    if (n == 0) return false;
    std::vector<Eigen::Index> stack{0};
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    seen[0] = true;
    Eigen::Index found = 1;
    while (!stack.empty()) {
      const Eigen::Index u = stack.back();
      stack.pop_back();
      for (Eigen::Index v = 0; v < n; ++v) {
        if (weights_(u, v) != 0.0 && !seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = true;
          ++found;
          stack.push_back(v);
        }
      }
    }
    return found == n;
  }

 private:
  Graph(Eigen::MatrixXd w, std::optional<Eigen::MatrixXd> c)
      : weights_(std::move(w)), coords_(std::move(c)) {}

  static void check_weights(const Eigen::MatrixXd& w) {
    if (w.rows() != w.cols() || w.rows() < 1) {
      throw InvalidInput("weight matrix must be square and nonempty, got " +
                         std::to_string(w.rows()) + "x" +
                         std::to_string(w.cols()));
    }
    if (!w.allFinite()) throw InvalidInput("weight matrix has non-finite entries");
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      if (w(i, i) != 0.0) {
        throw InvalidInput("weight matrix diagonal must be zero (node " +
                           std::to_string(i) + ")");
      }
      for (Eigen::Index j = i + 1; j < w.cols(); ++j) {
        if (w(i, j) != w(j, i)) {
          throw AsymmetricInput("weights not symmetric at (" +
                                std::to_string(i) + "," + std::to_string(j) +
                                ")");
        }
      }
    }
  }

  Eigen::MatrixXd weights_;
  std::optional<Eigen::MatrixXd> coords_;
};

enum class LaplacianKind { Combinatorial, Normalized };

struct Laplacian {
  Eigen::MatrixXd matrix;
  LaplacianKind kind = LaplacianKind::Combinatorial;
};

// L = D - W with D_ii = sum_j |w_ij|; L_norm = D^{-1/2} L D^{-1/2}.
// The absolute degrees keep L diagonally dominant, hence positive
// semi-definite even for signed weights.
inline Laplacian build_laplacian(const Graph& g, LaplacianKind kind) {
  const Eigen::VectorXd d = g.absolute_degrees();
  Eigen::MatrixXd l = -g.weights();
  l.diagonal() = d;

  if (kind == LaplacianKind::Normalized) {
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (d(i) == 0.0) {
        throw IsolatedNode("normalized Laplacian undefined: node " +
                           std::to_string(i) + " has zero degree");
      }
    }
    const Eigen::VectorXd dinv_sqrt = d.array().rsqrt().matrix();
    l = dinv_sqrt.asDiagonal() * l * dinv_sqrt.asDiagonal();
    // restore exact symmetry lost to rounding in the two-sided scaling
    l = ((l + l.transpose()) * 0.5).eval();
  }
  return Laplacian{std::move(l), kind};
}

struct Spectrum {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // column k pairs with eigenvalues(k)

  Eigen::Index size() const { return eigenvalues.size(); }
  double lambda_max() const { return eigenvalues(eigenvalues.size() - 1); }
};

// Sign convention: the entry of largest magnitude in each eigenvector is
// made nonnegative, ties broken by lowest index. Keeps downstream features
// reproducible across runs and platforms.
inline void fix_eigenvector_signs(Eigen::MatrixXd& u) {
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      const double a = std::abs(u(i, k));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (u(arg, k) < 0.0) u.col(k) = -u.col(k);
  }
}

inline Spectrum eigendecompose(const Laplacian& l) {
  const Eigen::Index n = l.matrix.rows();
  if (n != l.matrix.cols()) throw DimensionMismatch("Laplacian not square");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l.matrix);
  if (solver.info() != Eigen::Success) {
    const double residual =
        (l.matrix * solver.eigenvectors() -
         solver.eigenvectors() * solver.eigenvalues().asDiagonal())
            .cwiseAbs()
            .maxCoeff();
    throw ConvergenceFailure(
        "eigendecomposition did not converge; max residual " +
        std::to_string(residual));
  }

  Spectrum s;
  s.eigenvalues = solver.eigenvalues();
  s.eigenvectors = solver.eigenvectors();
  fix_eigenvector_signs(s.eigenvectors);
  return s;
}

// f_hat = U^T f
inline Eigen::VectorXd gft(const Spectrum& s, const Eigen::VectorXd& f) {
  if (f.size() != s.size()) {
    throw DimensionMismatch("gft: signal length " + std::to_string(f.size()) +
                            " != spectrum size " + std::to_string(s.size()));
  }
  return s.eigenvectors.transpose() * f;
}

// f = U f_hat
inline Eigen::VectorXd igft(const Spectrum& s, const Eigen::VectorXd& fhat) {
  if (fhat.size() != s.size()) {
    throw DimensionMismatch("igft: coefficient length " +
                            std::to_string(fhat.size()) + " != spectrum size " +
                            std::to_string(s.size()));
  }
  return s.eigenvectors * fhat;
}

// f^T L f, the graph smoothness of f (0 for constants on nonnegative
// connected graphs).
inline double laplacian_quadratic_form(const Laplacian& l,
                                       const Eigen::VectorXd& f) {
  if (f.size() != l.matrix.rows()) {
    throw DimensionMismatch("quadratic form: signal length " +
                            std::to_string(f.size()) + " != Laplacian size " +
                            std::to_string(l.matrix.rows()));
  }
  return f.dot(l.matrix * f);
}

}  // namespace graphlet

#endif  // GRAPHLET_GRAPH_CORE_HPP
