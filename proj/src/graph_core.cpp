#include "nsi/graph_core.hpp"

#include "nsi/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace nsi {

UserGraph::UserGraph(std::vector<Interaction> edges) {
  for (auto& e : edges) add(std::move(e));
}

void UserGraph::add(Interaction edge) {
  if (edge.tweet.empty()) throw ValidationError("interaction with empty tweet id");
  if (edge.src.empty() || edge.dst.empty())
    throw ValidationError("interaction " + edge.tweet + " has an empty user id");
  if (!(edge.weight >= 0.0) || !std::isfinite(edge.weight))
    throw ValidationError("interaction " + edge.tweet + " has a negative or non-finite weight");
  if (!tweets_.insert(edge.tweet).second) throw ValidationError("duplicate tweet id: " + edge.tweet);
  users_.insert(edge.src);
  users_.insert(edge.dst);
  edges_.push_back(std::move(edge));
}

TweetGraph::TweetGraph(std::vector<std::string> nodes, SparseMatrix adjacency)
    : nodes_(std::move(nodes)), adjacency_(std::move(adjacency)) {
  const auto n = static_cast<Eigen::Index>(nodes_.size());
  if (adjacency_.rows() != n || adjacency_.cols() != n)
    throw ValidationError("tweet graph adjacency is " + std::to_string(adjacency_.rows()) + "x" +
                          std::to_string(adjacency_.cols()) + " but there are " + std::to_string(n) + " nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i], i).second) throw ValidationError("duplicate tweet id: " + nodes_[i]);
  }
  adjacency_.prune(0.0);
  adjacency_.makeCompressed();
  for (Eigen::Index k = 0; k < adjacency_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(adjacency_, k); it; ++it) {
      if (it.row() == it.col()) throw ValidationError("tweet graph has a self link at " + nodes_[it.row()]);
      if (!(it.value() > 0.0) || !std::isfinite(it.value()))
        throw ValidationError("tweet graph has a negative or non-finite weight");
    }
  }
  const SparseMatrix t = adjacency_.transpose();
  if (SparseMatrix(t - adjacency_).norm() != 0.0)
    throw ValidationError("tweet graph adjacency is not symmetric");
}

std::size_t TweetGraph::index_of(const std::string& tweet) const {
  const auto it = index_.find(tweet);
  return it == index_.end() ? nodes_.size() : it->second;
}

TweetGraph TweetGraph::induced(std::span<const std::size_t> keep) const {
  std::vector<Eigen::Index> remap(nodes_.size(), -1);
  std::vector<std::string> sub_nodes;
  sub_nodes.reserve(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] >= nodes_.size()) throw ValidationError("induced subgraph index out of range");
    remap[keep[k]] = static_cast<Eigen::Index>(k);
    sub_nodes.push_back(nodes_[keep[k]]);
  }
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index c = 0; c < adjacency_.outerSize(); ++c) {
    if (remap[c] < 0) continue;
    for (SparseMatrix::InnerIterator it(adjacency_, c); it; ++it) {
      if (remap[it.row()] >= 0) triplets.emplace_back(remap[it.row()], remap[c], it.value());
    }
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  SparseMatrix sub(m, m);
  sub.setFromTriplets(triplets.begin(), triplets.end());
  return TweetGraph(std::move(sub_nodes), std::move(sub));
}

TweetGraph line_graph(const UserGraph& g) {
  if (g.empty()) throw ValidationError("user graph has no interactions");

  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& edges = g.edges();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return edges[a].tweet < edges[b].tweet; });

  std::vector<std::string> nodes;
  nodes.reserve(order.size());
  std::map<std::string, std::vector<Eigen::Index>> incident;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& e = edges[order[k]];
    nodes.push_back(e.tweet);
    const auto idx = static_cast<Eigen::Index>(k);
    incident[e.src].push_back(idx);
    if (e.dst != e.src) incident[e.dst].push_back(idx);
  }

  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& [user, tweets] : incident) {
    for (std::size_t a = 0; a < tweets.size(); ++a) {
      for (std::size_t b = a + 1; b < tweets.size(); ++b) {
        triplets.emplace_back(tweets[a], tweets[b], 1.0);
        triplets.emplace_back(tweets[b], tweets[a], 1.0);
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(nodes.size());
  SparseMatrix adjacency(n, n);
  // Interactions sharing both endpoints appear twice; the link stays 1.
  adjacency.setFromTriplets(triplets.begin(), triplets.end(), [](double a, double) { return a; });
  return TweetGraph(std::move(nodes), std::move(adjacency));
}

TransitionMatrix transition_matrix(const SparseMatrix& weights, double damping) {
  if (!(damping > 0.0 && damping <= 1.0)) throw ValidationError("damping must lie in (0, 1]");
  const Eigen::Index n = weights.rows();
  if (n == 0 || weights.cols() != n) throw ValidationError("transition matrix needs a nonempty square weight matrix");

  TransitionMatrix t;
  t.damping = damping;
  t.P = Eigen::MatrixXd(weights);
  t.dangling.assign(static_cast<std::size_t>(n), false);
  const double uniform = 1.0 / static_cast<double>(n);
  for (Eigen::Index u = 0; u < n; ++u) {
    const double out = t.P.row(u).sum();
    if (out > 0.0) {
      t.P.row(u) /= out;
    } else {
      t.dangling[static_cast<std::size_t>(u)] = true;
      t.P.row(u).setConstant(uniform);
    }
  }
  if (damping < 1.0) t.P = (damping * t.P.array() + (1.0 - damping) * uniform).matrix();
  return t;
}

TransitionMatrix transition_matrix(const TweetGraph& h, double damping) {
  return transition_matrix(h.adjacency(), damping);
}

namespace {

std::vector<bool> reachable(const Eigen::MatrixXd& P, bool forward) {
  const Eigen::Index n = P.rows();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::queue<Eigen::Index> frontier;
  frontier.push(0);
  seen[0] = true;
  while (!frontier.empty()) {
    const Eigen::Index u = frontier.front();
    frontier.pop();
    for (Eigen::Index v = 0; v < n; ++v) {
      const double w = forward ? P(u, v) : P(v, u);
      if (w > 0.0 && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        frontier.push(v);
      }
    }
  }
  return seen;
}

}  // namespace

bool is_strongly_connected(const Eigen::MatrixXd& P) {
  if (P.rows() == 0) return false;
  const auto all = [](const std::vector<bool>& s) { return std::all_of(s.begin(), s.end(), [](bool b) { return b; }); };
  return all(reachable(P, true)) && all(reachable(P, false));
}

StationaryDistribution stationary_distribution(const TransitionMatrix& p, double tol, int max_iter) {
  if (!(tol > 0.0)) throw ValidationError("stationary distribution tolerance must be positive");
  const Eigen::Index n = p.P.rows();
  if (n == 0) throw ValidationError("empty transition matrix");
  const bool lazy = p.damping >= 1.0;
  if (lazy && !is_strongly_connected(p.P))
    throw ValidationError("random walk is reducible; the stationary distribution is not unique (use damping < 1)");

  Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  Eigen::VectorXd next(n);
  double residual = 0.0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    next.noalias() = p.P.transpose() * pi;
    residual = (next - pi).lpNorm<Eigen::Infinity>();
    if (residual < tol) return {pi, residual, iter};
    pi = lazy ? Eigen::VectorXd(0.5 * (pi + next)) : next;
    pi /= pi.sum();
  }
  throw ConvergenceError("stationary distribution did not converge", residual, max_iter);
}

GraphLaplacian laplacian(const TransitionMatrix& p, const StationaryDistribution& pi) {
  const Eigen::Index n = p.P.rows();
  if (pi.pi.size() != n) throw ValidationError("stationary distribution size does not match transition matrix");
  for (Eigen::Index v = 0; v < n; ++v) {
    if (!(pi.pi(v) > 0.0))
      throw ValidationError("stationary probability of node " + std::to_string(v) +
                            " is not positive; the walk needs damping < 1");
  }
  const Eigen::ArrayXd root = pi.pi.array().sqrt();
  // M = Pi^1/2 P Pi^-1/2
  const Eigen::MatrixXd M = (root.matrix().asDiagonal() * p.P * root.inverse().matrix().asDiagonal());

  GraphLaplacian out;
  out.theta.resize(n, n);
  for (Eigen::Index u = 0; u < n; ++u) {
    out.theta(u, u) = M(u, u);
    for (Eigen::Index v = u + 1; v < n; ++v) {
      const double s = 0.5 * (M(u, v) + M(v, u));
      out.theta(u, v) = s;
      out.theta(v, u) = s;
    }
  }
  out.L = Eigen::MatrixXd::Identity(n, n) - out.theta;
  return out;
}

double smoothness(const Eigen::MatrixXd& f, const TransitionMatrix& p, const StationaryDistribution& pi) {
  const Eigen::Index n = p.P.rows();
  if (f.rows() != n || pi.pi.size() != n) throw ValidationError("smoothness: shape mismatch");
  const Eigen::MatrixXd y_hat = pi.pi.array().rsqrt().matrix().asDiagonal() * f;
  double total = 0.0;
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = 0; v < n; ++v) {
      const double w = pi.pi(u) * p.P(u, v);
      if (w == 0.0) continue;
      total += w * (y_hat.row(u) - y_hat.row(v)).squaredNorm();
    }
  }
  return 0.5 * total;
}

GraphLaplacian graph_laplacian(const TweetGraph& h, double damping, double tol, int max_iter) {
  if (h.size() == 0) throw ValidationError("tweet graph is empty");
  const auto n = static_cast<Eigen::Index>(h.size());
  const SparseMatrix& a = h.adjacency();

  std::vector<std::size_t> linked;
  for (Eigen::Index c = 0; c < a.outerSize(); ++c) {
    if (a.col(c).nonZeros() > 0) linked.push_back(static_cast<std::size_t>(c));
  }

  GraphLaplacian out;
  out.theta = Eigen::MatrixXd::Identity(n, n);
  out.L = Eigen::MatrixXd::Zero(n, n);
  if (linked.empty()) return out;

  const TweetGraph core = h.induced(linked);
  const TransitionMatrix p = transition_matrix(core, damping);
  if (damping >= 1.0 && !is_strongly_connected(p.P))
    throw ValidationError("tweet graph is disconnected; damping 1 has no unique stationary distribution (use damping < 1)");
  const GraphLaplacian sub = laplacian(p, stationary_distribution(p, tol, max_iter));

  for (std::size_t i = 0; i < linked.size(); ++i) {
    for (std::size_t j = 0; j < linked.size(); ++j) {
      const auto r = static_cast<Eigen::Index>(linked[i]);
      const auto c = static_cast<Eigen::Index>(linked[j]);
      out.theta(r, c) = sub.theta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      out.L(r, c) = sub.L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

}  // namespace nsi
