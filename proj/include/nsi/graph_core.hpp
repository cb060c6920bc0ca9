#pragma once

// Tweet-graph construction and the random-walk machinery behind the
// graph-smoothness penalty.
//
// A user-interaction multigraph (one edge per tweet) is converted into a
// tweet-tweet graph where two tweets are linked when their interaction edges
// share a user. A damped random walk on that graph gives the transition
// matrix P and its stationary distribution pi, from which the symmetric
// operator Theta and the Laplacian L = I - Theta are assembled.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace nsi {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// One reply/retweet interaction; the tweet id names the edge.
struct Interaction {
  std::string src;
  std::string dst;
  std::string tweet;
  double weight = 1.0;
};

/// Directed multigraph of user interactions. Tweet ids are unique.
class UserGraph {
 public:
  UserGraph() = default;
  explicit UserGraph(std::vector<Interaction> edges);

  /// Throws ValidationError on a duplicate tweet id, an empty id or a
  /// negative weight.
  void add(Interaction edge);

  const std::vector<Interaction>& edges() const noexcept { return edges_; }
  const std::set<std::string>& users() const noexcept { return users_; }
  std::size_t size() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }

 private:
  std::vector<Interaction> edges_;
  std::set<std::string> users_;
  std::set<std::string> tweets_;
};

/// Undirected weighted graph over tweets. Node i is `nodes()[i]`; the
/// adjacency is symmetric, nonnegative and has an empty diagonal.
class TweetGraph {
 public:
  TweetGraph() = default;
  TweetGraph(std::vector<std::string> nodes, SparseMatrix adjacency);

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const SparseMatrix& adjacency() const noexcept { return adjacency_; }

  /// Index of a tweet id, or size() when absent.
  std::size_t index_of(const std::string& tweet) const;

  /// Number of undirected links.
  std::size_t link_count() const noexcept { return static_cast<std::size_t>(adjacency_.nonZeros() / 2); }

  /// Subgraph induced by `keep` (indices into nodes(), in the given order).
  TweetGraph induced(std::span<const std::size_t> keep) const;

 private:
  std::vector<std::string> nodes_;
  std::map<std::string, std::size_t> index_;
  SparseMatrix adjacency_;
};

struct TransitionMatrix {
  Eigen::MatrixXd P;  ///< row-stochastic, n x n
  double damping = 1.0;
  std::vector<bool> dangling;  ///< rows with zero out-degree (uniform redistribution)
};

struct StationaryDistribution {
  Eigen::VectorXd pi;
  double residual = 0.0;  ///< ||pi^T P - pi^T||_inf at return
  int iterations = 0;
};

struct GraphLaplacian {
  Eigen::MatrixXd L;      ///< I - Theta, symmetric PSD
  Eigen::MatrixXd theta;  ///< symmetrized pi-normalized transition operator
};

inline constexpr double kDefaultDamping = 0.85;
inline constexpr double kDefaultStationaryTol = 1e-14;
inline constexpr int kDefaultStationaryMaxIter = 100000;

/// Node-to-edge conversion: one tweet node per interaction, linked with
/// weight 1 whenever the two interactions share an endpoint (direction is
/// ignored). Nodes are sorted by tweet id.
TweetGraph line_graph(const UserGraph& g);

/// Random-walk transition matrix of a nonnegative (possibly directed)
/// weight matrix. Zero-degree rows become uniform; the result is blended
/// with uniform teleportation: P = damping * P0 + (1 - damping) / n.
TransitionMatrix transition_matrix(const SparseMatrix& weights, double damping);
TransitionMatrix transition_matrix(const TweetGraph& h, double damping);

/// Power iteration from the uniform vector. With damping == 1 the chain
/// must be irreducible (ValidationError otherwise) and the lazy chain
/// (I + P) / 2 is iterated so periodic walks converge too.
/// Throws ConvergenceError when max_iter is reached.
StationaryDistribution stationary_distribution(const TransitionMatrix& p,
                                               double tol = kDefaultStationaryTol,
                                               int max_iter = kDefaultStationaryMaxIter);

/// Theta = (Pi^1/2 P Pi^-1/2 + Pi^-1/2 P^T Pi^1/2) / 2 and L = I - Theta.
/// Throws ValidationError when some pi(v) <= 0.
GraphLaplacian laplacian(const TransitionMatrix& p, const StationaryDistribution& pi);

/// Pairwise smoothness 1/2 sum_{u,v} pi(u) P(u,v) |f(u)/sqrt(pi(u)) - f(v)/sqrt(pi(v))|^2,
/// where row u of `f` holds the classification function at u. Equals
/// tr(f^T L f) when pi is stationary. Used as an independent check of the
/// trace form.
double smoothness(const Eigen::MatrixXd& f, const TransitionMatrix& p, const StationaryDistribution& pi);

/// True when every node reaches every other through positive entries of P.
bool is_strongly_connected(const Eigen::MatrixXd& P);

/// Laplacian of a tweet graph as used by the solver. Nodes without any link
/// carry no smoothness (zero row and column of L, unit diagonal in Theta);
/// the walk, pi and Theta are computed on the remaining nodes. With
/// damping == 1 the linked part must be connected.
GraphLaplacian graph_laplacian(const TweetGraph& h, double damping = kDefaultDamping,
                               double tol = kDefaultStationaryTol, int max_iter = kDefaultStationaryMaxIter);

}  // namespace nsi
