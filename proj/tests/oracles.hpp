#pragma once

// Independent reference computations and random instance generators for the
// tests. Nothing here calls into the library code it checks.

#include "nsi/features.hpp"
#include "nsi/graph_core.hpp"
#include "nsi/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline std::string id(char prefix, int i) {
  std::string s = std::to_string(i);
  return prefix + std::string(4 - std::min<std::size_t>(4, s.size()), '0') + s;
}

// ---------------------------------------------------------------------------
// graphs

/// Links of the tweet graph by pairwise endpoint comparison.
inline std::set<std::pair<std::string, std::string>> line_graph_links(const nsi::UserGraph& g) {
  std::set<std::pair<std::string, std::string>> links;
  const auto& e = g.edges();
  for (std::size_t a = 0; a < e.size(); ++a) {
    for (std::size_t b = a + 1; b < e.size(); ++b) {
      const bool share = e[a].src == e[b].src || e[a].src == e[b].dst || e[a].dst == e[b].src || e[a].dst == e[b].dst;
      if (share) links.insert(std::minmax(e[a].tweet, e[b].tweet));
    }
  }
  return links;
}

/// Random user graph with up to `max_edges` edges over few users, so that
/// shared endpoints, multi-edges and self-loops all occur.
inline nsi::UserGraph random_user_graph(Rng& rng, int max_edges) {
  const int edges = uniform_int(rng, 1, max_edges);
  const int users = uniform_int(rng, 1, std::max(2, edges));
  std::vector<int> tweet_ids(static_cast<std::size_t>(edges));
  for (int i = 0; i < edges; ++i) tweet_ids[static_cast<std::size_t>(i)] = i;
  std::shuffle(tweet_ids.begin(), tweet_ids.end(), rng);
  nsi::UserGraph g;
  for (int i = 0; i < edges; ++i) {
    g.add({id('u', uniform_int(rng, 0, users - 1)), id('u', uniform_int(rng, 0, users - 1)),
           id('t', tweet_ids[static_cast<std::size_t>(i)]), 1.0});
  }
  return g;
}

/// Random nonnegative directed weights (no self-loops), density in (0, 1].
inline Eigen::MatrixXd random_directed(Rng& rng, int n, double density) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && uniform(rng, 0.0, 1.0) < density) w(i, j) = uniform(rng, 0.1, 2.0);
  return w;
}

inline Eigen::MatrixXd random_symmetric(Rng& rng, int n, double density) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (uniform(rng, 0.0, 1.0) < density) w(i, j) = w(j, i) = uniform(rng, 0.1, 2.0);
  return w;
}

/// Row-normalized walk with uniform dangling rows and teleportation.
inline Eigen::MatrixXd transition(const Eigen::MatrixXd& w, double damping) {
  const auto n = w.rows();
  Eigen::MatrixXd p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = w.row(i).sum();
    if (d > 0) p.row(i) = w.row(i) / d;
    else p.row(i).setConstant(1.0 / static_cast<double>(n));
  }
  return damping * p + Eigen::MatrixXd::Constant(n, n, (1.0 - damping) / static_cast<double>(n));
}

/// Left eigenvector of P for the eigenvalue nearest 1, scaled to sum 1.
inline Eigen::VectorXd stationary_eigen(const Eigen::MatrixXd& p) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(p.transpose());
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()[i] - 1.0) < std::abs(es.eigenvalues()[best] - 1.0)) best = i;
  Eigen::VectorXd v = es.eigenvectors().col(best).real();
  return v / v.sum();
}

/// 1/2 sum_{u,v} pi(u) P(u,v) |f_u / sqrt(pi_u) - f_v / sqrt(pi_v)|^2.
inline double pairwise_smoothness(const Eigen::MatrixXd& f, const Eigen::MatrixXd& p, const Eigen::VectorXd& pi) {
  double s = 0.0;
  for (Eigen::Index u = 0; u < p.rows(); ++u)
    for (Eigen::Index v = 0; v < p.cols(); ++v)
      s += pi(u) * p(u, v) * (f.row(u) / std::sqrt(pi(u)) - f.row(v) / std::sqrt(pi(v))).squaredNorm();
  return 0.5 * s;
}

// ---------------------------------------------------------------------------
// solver

struct Instance {
  Eigen::MatrixXd X;   // m x n
  Eigen::MatrixXd Y;   // n x c
  Eigen::MatrixXd Xg;  // m x ng
  Eigen::MatrixXd L;   // ng x ng
  std::vector<std::vector<std::size_t>> groups;
  double lambda1 = 0, lambda2 = 0, lambda_s = 0;
};

inline double objective(const Instance& in, const Eigen::MatrixXd& w) {
  double l21 = 0.0;
  for (const auto& g : in.groups) {
    double sq = 0.0;
    for (const auto r : g) sq += w.row(static_cast<Eigen::Index>(r)).squaredNorm();
    l21 += std::sqrt(sq);
  }
  const Eigen::MatrixXd f = in.Xg.transpose() * w;
  return 0.5 * (in.X.transpose() * w - in.Y).squaredNorm() + in.lambda1 * w.cwiseAbs().sum() + 0.5 * in.lambda2 * l21 +
         0.5 * in.lambda_s * (f.transpose() * in.L * f).trace();
}

struct ProxResult {
  Eigen::MatrixXd W;
  double objective = 0;
  int iterations = 0;
  bool converged = false;
};

/// Accelerated proximal gradient with adaptive restart, started from zero.
/// The proximal map of l1 + group-l2 is the soft threshold followed by group
/// shrinkage. Stops when the gradient mapping falls below `tol`.
inline ProxResult proximal_gradient(const Instance& in, double tol = 1e-10, int max_iter = 2000000) {
  const Eigen::MatrixXd a = in.X * in.X.transpose() + in.lambda_s * in.Xg * in.L * in.Xg.transpose();
  const Eigen::MatrixXd b = in.X * in.Y;
  const double lip = std::max(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues().maxCoeff(), 1e-12);
  const double t = 1.0 / lip;
  const auto prox = [&](const Eigen::MatrixXd& v) {
    Eigen::MatrixXd z = v.unaryExpr([&](double x) { return std::copysign(std::max(std::abs(x) - t * in.lambda1, 0.0), x); });
    for (const auto& g : in.groups) {
      double sq = 0.0;
      for (const auto r : g) sq += z.row(static_cast<Eigen::Index>(r)).squaredNorm();
      const double norm = std::sqrt(sq);
      const double scale = norm > 0 ? std::max(0.0, 1.0 - t * in.lambda2 / 2.0 / norm) : 0.0;
      for (const auto r : g) z.row(static_cast<Eigen::Index>(r)) *= scale;
    }
    return z;
  };
  const Eigen::Index m = in.X.rows(), c = in.Y.cols();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, c), y = w;
  double theta = 1.0;
  double f_prev = objective(in, w);
  ProxResult out;
  for (int k = 1; k <= max_iter; ++k) {
    const Eigen::MatrixXd next = prox(y - t * (a * y - b));
    const double mapping = (y - next).cwiseAbs().maxCoeff() / t;
    const double f = objective(in, next);
    out.iterations = k;
    if (f > f_prev && theta > 1.0) {  // restart the momentum
      y = w;
      theta = 1.0;
      continue;
    }
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    y = next + ((theta - 1.0) / theta_next) * (next - w);
    w = next;
    theta = theta_next;
    f_prev = f;
    if (mapping < tol) {
      out.converged = true;
      break;
    }
  }
  out.W = w;
  out.objective = objective(in, w);
  return out;
}

inline Eigen::MatrixXd random_psd(Rng& rng, int n) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = uniform(rng, -1.0, 1.0);
  const int rank = uniform_int(rng, 1, n);
  const Eigen::MatrixXd b = a.leftCols(rank);
  return b * b.transpose() / static_cast<double>(n);
}

inline Eigen::MatrixXd one_hot_random(Rng& rng, int n, int c) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, c);
  for (int i = 0; i < n; ++i) y(i, uniform_int(rng, 0, c - 1)) = 1.0;
  return y;
}

/// Random partition of 0..m-1 into nonempty groups.
inline std::vector<std::vector<std::size_t>> random_groups(Rng& rng, int m) {
  const int k = uniform_int(rng, 1, m);
  std::vector<std::size_t> of(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) of[static_cast<std::size_t>(j)] = static_cast<std::size_t>(j < k ? j : uniform_int(rng, 0, k - 1));
  std::shuffle(of.begin(), of.end(), rng);
  std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(k));
  for (int j = 0; j < m; ++j) groups[of[static_cast<std::size_t>(j)]].push_back(static_cast<std::size_t>(j));
  return groups;
}

/// Random tiny instance; X is dense with some exact zeros.
inline Instance random_instance(Rng& rng, int max_m, int max_n) {
  Instance in;
  const int m = uniform_int(rng, 2, max_m);
  const int n = uniform_int(rng, 2, max_n);
  in.X.resize(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) in.X(i, j) = uniform(rng, 0.0, 1.0) < 0.25 ? 0.0 : uniform(rng, -1.0, 2.0);
  in.Y = one_hot_random(rng, n, 2);
  in.Xg = in.X;
  in.L = random_psd(rng, n);
  in.groups = random_groups(rng, m);
  in.lambda1 = uniform(rng, 0.0, 0.3);
  in.lambda2 = uniform(rng, 0.05, 1.0);
  in.lambda_s = uniform(rng, 0.0, 1.0);
  return in;
}

inline nsi::FeatureGroups to_groups(const std::vector<std::vector<std::size_t>>& groups, std::size_t m) {
  std::vector<std::size_t> of(m);
  std::vector<std::string> keys;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const auto r : groups[g]) of[r] = g;
    keys.push_back("g" + std::to_string(1000 + g));
  }
  return nsi::FeatureGroups::from_assignment(of, keys);
}

inline nsi::Problem to_problem(const Instance& in) {
  return nsi::make_transductive_problem(in.X.sparseView(), in.Y, in.Xg.sparseView(), in.L,
                                        to_groups(in.groups, static_cast<std::size_t>(in.X.rows())));
}

inline nsi::Hyperparams to_hyper(const Instance& in) {
  nsi::Hyperparams h;
  h.lambda1 = in.lambda1;
  h.lambda2 = in.lambda2;
  h.lambda_s = in.lambda_s;
  return h;
}

}  // namespace oracle
