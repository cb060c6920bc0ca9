#pragma once

// Sparse, group-sparse and graph-smooth linear classifier.
//
// Minimizes over W (m x c)
//
//   1/2 |X^T W - Y|^2 + l1 |W|_1 + l2/2 sum_g |W_g| + ls/2 tr(W^T Xg L Xg^T W)
//
// by iteratively reweighted least squares on the smooth part (the l1 term
// excluded), followed by a projection stage that brings in the l1 soft
// threshold: block coordinate descent over the rows of W on the full
// objective.
//
// X holds the labeled columns used by the loss. Xg holds the columns the
// graph penalty runs over: the same tweets in the inductive setting, or
// labeled and unlabeled tweets together in the transductive one.

#include "nsi/features.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <span>
#include <string>
#include <vector>

namespace nsi {

/// Starting point of the reweighting iterations. `identity_reweighting`
/// uses D0 = I for the first solve; `truncated_identity` starts from
/// W0 = I (m x c) and reweights from it, which pins every group that is zero
/// in W0 at the epsilon floor.
enum class InitMode { identity_reweighting, truncated_identity };
std::string to_string(InitMode mode);
InitMode parse_init(const std::string& s);

struct Hyperparams {
  double lambda1 = 0.01;
  double lambda2 = 0.5;
  double lambda_s = 0.4;
  double epsilon = 1e-10;  ///< floor on group norms in the reweighting
  double tol = 1e-6;       ///< relative change of the smooth objective
  int max_iter = 100;
  double refine_tol = 1e-10;  ///< projection stage: relative objective decrease per sweep
  int refine_max_iter = 10000;
  InitMode init = InitMode::identity_reweighting;

  /// ValidationError on a negative lambda or a nonpositive tolerance.
  void validate() const;
};

/// n x c one-hot; class order (negative, positive).
using LabelMatrix = Eigen::MatrixXd;
/// m x c.
using WeightMatrix = Eigen::MatrixXd;

/// Labels must lie in [0, classes).
LabelMatrix one_hot(std::span<const int> labels, int classes = 2);

struct Problem {
  Eigen::SparseMatrix<double> X;   ///< m x n, loss columns
  LabelMatrix Y;                   ///< n x c
  Eigen::SparseMatrix<double> Xg;  ///< m x ng, graph columns
  Eigen::MatrixXd L;               ///< ng x ng Laplacian
  FeatureGroups groups;

  std::size_t features() const noexcept { return static_cast<std::size_t>(X.rows()); }
  std::size_t classes() const noexcept { return static_cast<std::size_t>(Y.cols()); }
  /// ValidationError on any shape disagreement.
  void validate() const;
};

/// Graph penalty over the training columns themselves.
Problem make_problem(Eigen::SparseMatrix<double> X, LabelMatrix Y, Eigen::MatrixXd L, FeatureGroups groups);
/// Graph penalty over `x_graph` (e.g. training plus test columns).
Problem make_transductive_problem(Eigen::SparseMatrix<double> X, LabelMatrix Y, Eigen::SparseMatrix<double> x_graph,
                                  Eigen::MatrixXd L, FeatureGroups groups);

/// Per-group 2-norms of the row blocks of W.
Eigen::VectorXd group_norms(const WeightMatrix& w, const FeatureGroups& groups);
double l21_norm(const WeightMatrix& w, const FeatureGroups& groups);

/// tr(W^T Xg L Xg^T W).
double graph_term(const WeightMatrix& w, const Problem& p);

/// Full objective including the l1 term.
double objective(const WeightMatrix& w, const Problem& p, const Hyperparams& h);

/// |X^T W - Y|^2 + l2 |W|_21 + ls tr(W^T Xg L Xg^T W): the quantity the
/// reweighting iterations decrease.
double smooth_objective(const WeightMatrix& w, const Problem& p, const Hyperparams& h);

/// Diagonal of D: D_jj = 1 / (2 max(|w_g(j)|, epsilon)).
Eigen::VectorXd reweight(const WeightMatrix& w, const FeatureGroups& groups, const Hyperparams& h);

/// Largest m the dense normal equations accept (an m x m double matrix is
/// 3.2 GB at this size).
inline constexpr Eigen::Index kMaxFeatures = 20000;

/// Dense pieces of the normal equations: G = X X^T, S = Xg L Xg^T, XY = X Y.
struct NormalEquations {
  Eigen::MatrixXd G;
  Eigen::MatrixXd S;
  Eigen::MatrixXd XY;

  explicit NormalEquations(const Problem& p);
};

/// Solves (G + l2 D + ls S) W = XY by Cholesky. NumericalError (advising
/// lambda2 > 0) when the system is singular.
WeightMatrix irls_step(const NormalEquations& eq, const Eigen::VectorXd& d, const Hyperparams& h);

/// G W - XY + l2 D W + ls S W.
WeightMatrix gradient_smooth(const WeightMatrix& w, const Problem& p, const Eigen::VectorXd& d, const Hyperparams& h);

/// Entrywise soft threshold by lambda1.
WeightMatrix l1_sparsify(const WeightMatrix& w, const Hyperparams& h);

struct FitReport {
  std::vector<double> objective_trace;  ///< full objective after each reweighting iteration
  std::vector<double> smooth_trace;     ///< smooth objective after each reweighting iteration
  int iterations = 0;
  bool converged = false;
  int refine_iterations = 0;
  bool refine_converged = true;
  double final_objective = 0.0;
  double final_sparsity = 0.0;  ///< fraction of all-zero rows of W
};

struct FitResult {
  WeightMatrix W;
  FitReport report;
};

/// Reweighting iterations until the smooth objective settles, then the
/// projection stage. Rows of W whose features never occur in X or Xg are
/// exactly zero when lambda2 > 0.
FitResult fit(const Problem& p, const Hyperparams& h);

/// X^T W for the columns of `x` (n x c).
Eigen::MatrixXd scores(const Eigen::SparseMatrix<double>& x, const WeightMatrix& w);
/// argmax over classes; ties go to the lower class index.
int predict(const Eigen::VectorXd& x, const WeightMatrix& w);
std::vector<int> predict_all(const Eigen::SparseMatrix<double>& x, const WeightMatrix& w);
int argmax_row(const Eigen::MatrixXd& s, Eigen::Index row);

}  // namespace nsi
