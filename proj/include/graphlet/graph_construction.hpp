#ifndef GRAPHLET_GRAPH_CONSTRUCTION_HPP
#define GRAPHLET_GRAPH_CONSTRUCTION_HPP

// Graph inference from multivariate time series: covariance/correlation
// graphs, thresholded/binary and KNN variants, the semi-local distance
// pruning, and smoothness-based graph learning (log-degree model solved by
// a primal-dual splitting).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "graphlet/errors.hpp"
#include "graphlet/graph_core.hpp"

namespace graphlet {

namespace detail {

inline void check_time_series(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw InvalidInput("time series needs at least 2 observations");
  if (!x.allFinite()) throw InvalidInput("time series has non-finite entries");
}

// mirror the upper triangle so the symmetry invariant holds bit-exactly
inline void symmetrize_upper(Eigen::MatrixXd& w) {
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    w(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < w.cols(); ++j) w(j, i) = w(i, j);
  }
}

struct UnionFind {
  std::vector<Eigen::Index> parent;
  explicit UnionFind(Eigen::Index n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  }
  Eigen::Index find(Eigen::Index a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  }
  bool unite(Eigen::Index a, Eigen::Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

}  // namespace detail

// Sample covariance between columns (denominator T-1), diagonal zeroed.
inline Graph covariance_graph(const Eigen::MatrixXd& x) {
  detail::check_time_series(x);
  const double t = static_cast<double>(x.rows());
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::MatrixXd w = centered.transpose() * centered / (t - 1.0);
  detail::symmetrize_upper(w);
  return Graph::from_weights(std::move(w));
}

// Pearson correlation between columns, diagonal zeroed, entries in [-1, 1].
inline Graph correlation_graph(const Eigen::MatrixXd& x) {
  detail::check_time_series(x);
  const double t = static_cast<double>(x.rows());
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  const Eigen::VectorXd sd = (centered.colwise().squaredNorm() / (t - 1.0))
                                 .array()
                                 .sqrt()
                                 .matrix()
                                 .transpose();
  for (Eigen::Index j = 0; j < sd.size(); ++j) {
    if (sd(j) == 0.0) {
      throw DegenerateSeries("column " + std::to_string(j) +
                             " is constant; correlation undefined");
    }
  }
  Eigen::MatrixXd w = centered.transpose() * centered / (t - 1.0);
  w = (sd.cwiseInverse().asDiagonal() * w * sd.cwiseInverse().asDiagonal()).eval();
  w = w.cwiseMin(1.0).cwiseMax(-1.0).eval();
  detail::symmetrize_upper(w);
  return Graph::from_weights(std::move(w));
}

// Zero every edge with |w| < t; binary maps the surviving edges to 1.
inline Graph threshold_graph(const Graph& g, double t, bool binary) {
  const Eigen::MatrixXd& w = g.weights();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(w.rows(), w.cols());
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < w.cols(); ++j) {
      if (w(i, j) != 0.0 && std::abs(w(i, j)) >= t) {
        out(i, j) = binary ? 1.0 : w(i, j);
      }
    }
  }
  detail::symmetrize_upper(out);
  return g.has_coords() ? Graph::from_weights(std::move(out), g.coords())
                        : Graph::from_weights(std::move(out));
}

// Keep each node's k strongest incident edges (by |w|, ties to the lower
// node index) and symmetrize by union: an edge survives if either endpoint
// keeps it.
inline Graph knn_graph(const Graph& g, int k, bool binary) {
  const Eigen::Index n = g.n_nodes();
  if (k < 1) throw KOutOfRange("knn: k must be >= 1");
  if (k >= n) throw KTooLarge("knn: k must be < n_nodes");
  const Eigen::MatrixXd& w = g.weights();

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::pair<double, Eigen::Index>> incident;
  for (Eigen::Index i = 0; i < n; ++i) {
    incident.clear();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i && w(i, j) != 0.0) incident.emplace_back(std::abs(w(i, j)), j);
    }
    std::sort(incident.begin(), incident.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    const std::size_t keep = std::min<std::size_t>(incident.size(),
                                                   static_cast<std::size_t>(k));
    for (std::size_t e = 0; e < keep; ++e) {
      const Eigen::Index j = incident[e].second;
      const Eigen::Index a = std::min(i, j);
      const Eigen::Index b = std::max(i, j);
      out(a, b) = binary ? 1.0 : w(a, b);
    }
  }
  detail::symmetrize_upper(out);
  return g.has_coords() ? Graph::from_weights(std::move(out), g.coords())
                        : Graph::from_weights(std::move(out));
}

// Zero all edges whose endpoint distance exceeds t*, the smallest pairwise
// distance that keeps the graph connected. The search walks the sorted set
// of pairwise distances with a union-find, so t* is attained exactly.
inline Graph semi_local_graph(const Graph& g, const Eigen::MatrixXd& coords) {
  const Eigen::Index n = g.n_nodes();
  if (coords.rows() != n) {
    throw DimensionMismatch("semi_local: coords rows != node count");
  }
  if (n == 1) return Graph::from_weights(g.weights(), coords);

  struct Edge {
    double dist;
    Eigen::Index i, j;
  };
  std::vector<Edge> edges;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (g.weights()(i, j) != 0.0) {
        edges.push_back({(coords.row(i) - coords.row(j)).norm(), i, j});
      }
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  detail::UnionFind uf(n);
  Eigen::Index components = n;
  double t_star = std::numeric_limits<double>::quiet_NaN();
  std::size_t e = 0;
  while (e < edges.size() && components > 1) {
    const double d = edges[e].dist;
    while (e < edges.size() && edges[e].dist == d) {
      if (uf.unite(edges[e].i, edges[e].j)) --components;
      ++e;
    }
    if (components == 1) t_star = d;
  }
  if (components > 1) {
    throw DisconnectedAtAnyThreshold(
        "semi_local: graph is disconnected at every distance threshold");
  }

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (g.weights()(i, j) != 0.0 &&
          (coords.row(i) - coords.row(j)).norm() <= t_star) {
        out(i, j) = g.weights()(i, j);
      }
    }
  }
  detail::symmetrize_upper(out);
  return Graph::from_weights(std::move(out), coords);
}

struct KalofoliasResult {
  Graph graph;
  bool converged = false;
  int iterations = 0;
  double objective_first_iter = 0.0;
  double objective_best = 0.0;
  // best objective seen up to each 10-iteration mark
  std::vector<double> objective_checkpoints;
};

// Learn nonnegative weights from column signals by solving
//   min_{W >= 0, sym, zero diag}  ||W o Z||_1 - alpha 1^T log(W 1) + beta ||W||_F^2
// with Z_ij = ||x_:i - x_:j||^2 (normalized by its mean), via a primal-dual
// splitting on the upper-triangle vector. The log barrier keeps every
// degree positive. Returns the best iterate by objective.
inline KalofoliasResult kalofolias_learn(const Eigen::MatrixXd& x, double alpha = 1.0,
                                         double beta = 0.0, int max_iter = 5000,
                                         double tol = 1e-6) {
  detail::check_time_series(x);
  if (alpha <= 0.0) throw InvalidInput("kalofolias: alpha must be > 0");
  if (beta < 0.0) throw InvalidInput("kalofolias: beta must be >= 0");
  const Eigen::Index n = x.cols();
  if (n < 2) throw InvalidInput("kalofolias: need at least 2 nodes");

  const Eigen::Index n_edges = n * (n - 1) / 2;
  Eigen::VectorXd z(n_edges);
  {
    Eigen::Index e = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        z(e++) = (x.col(i) - x.col(j)).squaredNorm();
      }
    }
    const double mean = z.mean();
    if (mean > 0.0) z /= mean;
  }

  // degree operator d = S w and its adjoint on the edge vector
  const auto apply_s = [n](const Eigen::VectorXd& w) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    Eigen::Index e = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j, ++e) {
        d(i) += w(e);
        d(j) += w(e);
      }
    }
    return d;
  };
  const auto apply_st = [n, n_edges](const Eigen::VectorXd& v) {
    Eigen::VectorXd w(n_edges);
    Eigen::Index e = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j, ++e) w(e) = v(i) + v(j);
    }
    return w;
  };

  const auto objective = [&](const Eigen::VectorXd& w) {
    const Eigen::VectorXd d = apply_s(w);
    if ((d.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
    return 2.0 * z.dot(w) - alpha * d.array().log().sum() +
           2.0 * beta * w.squaredNorm();
  };

  const double norm_s = std::sqrt(2.0 * static_cast<double>(n - 1));
  const double gamma = 0.99 / (1.0 + 4.0 * beta + norm_s);

  Eigen::VectorXd w = Eigen::VectorXd::Constant(n_edges, 1.0 / static_cast<double>(n));
  Eigen::VectorXd v = apply_s(w);

  KalofoliasResult result{Graph::from_weights(Eigen::MatrixXd::Zero(n, n))};
  Eigen::VectorXd best_w = w;
  double best_obj = std::numeric_limits<double>::infinity();

  int it = 0;
  for (; it < max_iter; ++it) {
    const Eigen::VectorXd y = w - gamma * (4.0 * beta * w + apply_st(v));
    const Eigen::VectorXd ybar = v + gamma * apply_s(w);
    // p is the proxed primal point: the feasible candidate this iteration
    const Eigen::VectorXd p = (y - 2.0 * gamma * z).cwiseMax(0.0);
    const Eigen::VectorXd pbar =
        0.5 * (ybar.array() - (ybar.array().square() + 4.0 * alpha * gamma).sqrt())
                  .matrix();
    const Eigen::VectorXd q = p - gamma * (4.0 * beta * p + apply_st(pbar));
    const Eigen::VectorXd qbar = pbar + gamma * apply_s(p);

    const Eigen::VectorXd w_next = w - y + q;
    const double rel_change =
        (w_next - w).norm() / std::max(w.norm(), 1e-12);
    v += qbar - ybar;
    w = w_next;

    const double obj = objective(p);
    if (obj < best_obj) {
      best_obj = obj;
      best_w = p;
    }
    if (it == 0) result.objective_first_iter = obj;
    if ((it + 1) % 10 == 0) result.objective_checkpoints.push_back(best_obj);

    if (rel_change < tol) {
      result.converged = true;
      ++it;
      break;
    }
  }
  result.iterations = it;
  result.objective_best = best_obj;
  if (result.objective_checkpoints.empty() ||
      result.objective_checkpoints.back() != best_obj) {
    result.objective_checkpoints.push_back(best_obj);
  }

  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index e = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j, ++e) weights(i, j) = best_w(e);
  }
  detail::symmetrize_upper(weights);
  result.graph = Graph::from_weights(std::move(weights));
  return result;
}

}  // namespace graphlet

#endif  // GRAPHLET_GRAPH_CONSTRUCTION_HPP
