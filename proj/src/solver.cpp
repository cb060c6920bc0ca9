#include "nsi/solver.hpp"

#include "nsi/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nsi {

void Hyperparams::validate() const {
  const auto nonneg = [](double v) { return v >= 0.0 && std::isfinite(v); };
  if (!nonneg(lambda1) || !nonneg(lambda2) || !nonneg(lambda_s))
    throw ValidationError("regularization weights must be finite and nonnegative");
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (!(tol > 0.0) || !(refine_tol > 0.0)) throw ValidationError("tolerances must be positive");
  if (max_iter < 1 || refine_max_iter < 0) throw ValidationError("iteration caps must be positive");
}

std::string to_string(InitMode mode) {
  return mode == InitMode::identity_reweighting ? "identity-reweighting" : "truncated-identity";
}

InitMode parse_init(const std::string& s) {
  if (s == "identity-reweighting") return InitMode::identity_reweighting;
  if (s == "truncated-identity") return InitMode::truncated_identity;
  throw ValidationError("unknown initialization '" + s + "'");
}

LabelMatrix one_hot(std::span<const int> labels, int classes) {
  if (classes < 1) throw ValidationError("need at least one class");
  LabelMatrix y = LabelMatrix::Zero(static_cast<Eigen::Index>(labels.size()), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes)
      throw ValidationError("label " + std::to_string(labels[i]) + " outside [0, " + std::to_string(classes) + ")");
    y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return y;
}

void Problem::validate() const {
  if (Y.cols() < 1) throw ValidationError("label matrix has no classes");
  if (Y.rows() != X.cols())
    throw ValidationError("feature matrix has " + std::to_string(X.cols()) + " columns for " +
                          std::to_string(Y.rows()) + " labels");
  if (Xg.rows() != X.rows()) throw ValidationError("graph feature matrix has a different feature count");
  if (L.rows() != L.cols() || L.rows() != Xg.cols())
    throw ValidationError("Laplacian is " + std::to_string(L.rows()) + "x" + std::to_string(L.cols()) + " for " +
                          std::to_string(Xg.cols()) + " graph columns");
  if (groups.rows() != static_cast<std::size_t>(X.rows()))
    throw ValidationError("feature groups cover " + std::to_string(groups.rows()) + " rows, X has " +
                          std::to_string(X.rows()));
}

Problem make_problem(Eigen::SparseMatrix<double> X, LabelMatrix Y, Eigen::MatrixXd L, FeatureGroups groups) {
  Problem p;
  p.Xg = X;
  p.X = std::move(X);
  p.Y = std::move(Y);
  p.L = std::move(L);
  p.groups = std::move(groups);
  p.validate();
  return p;
}

Problem make_transductive_problem(Eigen::SparseMatrix<double> X, LabelMatrix Y, Eigen::SparseMatrix<double> x_graph,
                                  Eigen::MatrixXd L, FeatureGroups groups) {
  Problem p{std::move(X), std::move(Y), std::move(x_graph), std::move(L), std::move(groups)};
  p.validate();
  return p;
}

Eigen::VectorXd group_norms(const WeightMatrix& w, const FeatureGroups& groups) {
  Eigen::VectorXd norms(static_cast<Eigen::Index>(groups.groups.size()));
  for (std::size_t g = 0; g < groups.groups.size(); ++g) {
    double sq = 0.0;
    for (const auto row : groups.groups[g]) sq += w.row(static_cast<Eigen::Index>(row)).squaredNorm();
    norms(static_cast<Eigen::Index>(g)) = std::sqrt(sq);
  }
  return norms;
}

double l21_norm(const WeightMatrix& w, const FeatureGroups& groups) { return group_norms(w, groups).sum(); }

double graph_term(const WeightMatrix& w, const Problem& p) {
  const Eigen::MatrixXd v = p.Xg.transpose() * w;
  return (v.transpose() * p.L * v).trace();
}

namespace {

double loss_sq(const WeightMatrix& w, const Problem& p) {
  return (Eigen::MatrixXd(p.X.transpose() * w) - p.Y).squaredNorm();
}

void check_shape(const WeightMatrix& w, const Problem& p) {
  if (w.rows() != p.X.rows() || w.cols() != p.Y.cols())
    throw ValidationError("weight matrix is " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                          ", expected " + std::to_string(p.X.rows()) + "x" + std::to_string(p.Y.cols()));
}

}  // namespace

double objective(const WeightMatrix& w, const Problem& p, const Hyperparams& h) {
  check_shape(w, p);
  return 0.5 * loss_sq(w, p) + h.lambda1 * w.cwiseAbs().sum() + 0.5 * h.lambda2 * l21_norm(w, p.groups) +
         0.5 * h.lambda_s * graph_term(w, p);
}

double smooth_objective(const WeightMatrix& w, const Problem& p, const Hyperparams& h) {
  check_shape(w, p);
  return loss_sq(w, p) + h.lambda2 * l21_norm(w, p.groups) + h.lambda_s * graph_term(w, p);
}

Eigen::VectorXd reweight(const WeightMatrix& w, const FeatureGroups& groups, const Hyperparams& h) {
  const Eigen::VectorXd norms = group_norms(w, groups);
  Eigen::VectorXd d(static_cast<Eigen::Index>(groups.rows()));
  for (std::size_t row = 0; row < groups.rows(); ++row)
    d(static_cast<Eigen::Index>(row)) =
        1.0 / (2.0 * std::max(norms(static_cast<Eigen::Index>(groups.group_of[row])), h.epsilon));
  return d;
}

NormalEquations::NormalEquations(const Problem& p) {
  p.validate();
  if (p.X.rows() > kMaxFeatures)
    throw ValidationError(std::to_string(p.X.rows()) + " features exceed the dense solver limit of " +
                          std::to_string(kMaxFeatures) + "; raise --min-count or set --max-features");
  G = Eigen::MatrixXd(p.X * p.X.transpose());
  const Eigen::MatrixXd xl = p.Xg * p.L;
  S = xl * p.Xg.transpose();
  S = 0.5 * (S + S.transpose());
  XY = p.X * p.Y;
}

WeightMatrix irls_step(const NormalEquations& eq, const Eigen::VectorXd& d, const Hyperparams& h) {
  const Eigen::Index m = eq.G.rows();
  if (d.size() != m) throw ValidationError("reweighting diagonal has the wrong length");
  if (m == 0) return WeightMatrix::Zero(0, eq.XY.cols());
  Eigen::MatrixXd a = eq.G;
  if (h.lambda_s != 0.0) a += h.lambda_s * eq.S;
  a.diagonal() += h.lambda2 * d;

  const Eigen::VectorXd diag = a.diagonal();
  if ((diag.array() <= 0.0).any() || !diag.allFinite())
    throw NumericalError("singular linear system (a feature never occurs); use lambda2 > 0");
  const Eigen::VectorXd s = diag.cwiseSqrt().cwiseInverse();
  a = s.asDiagonal() * a * s.asDiagonal();
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-13)
    throw NumericalError("singular or ill-conditioned linear system; use lambda2 > 0");
  const Eigen::MatrixXd rhs = s.asDiagonal() * eq.XY;
  return s.asDiagonal() * llt.solve(rhs);
}

WeightMatrix gradient_smooth(const WeightMatrix& w, const Problem& p, const Eigen::VectorXd& d, const Hyperparams& h) {
  check_shape(w, p);
  if (d.size() != w.rows()) throw ValidationError("reweighting diagonal has the wrong length");
  const Eigen::MatrixXd v = p.Xg.transpose() * w;
  const Eigen::MatrixXd lv = p.L * v;
  WeightMatrix g = p.X * Eigen::MatrixXd(p.X.transpose() * w) - p.X * p.Y;
  g += h.lambda2 * (d.asDiagonal() * w);
  g += h.lambda_s * (p.Xg * lv);
  return g;
}

WeightMatrix l1_sparsify(const WeightMatrix& w, const Hyperparams& h) {
  const double t = h.lambda1;
  return w.unaryExpr([t](double v) { return v > t ? v - t : (v < -t ? v + t : 0.0); });
}

namespace {

// Restriction of the normal equations to the rows in `active`.
struct Reduced {
  std::vector<Eigen::Index> active;
  NormalEquations eq;
  FeatureGroups groups;
};

// Rows of W whose feature never occurs in X or Xg decouple: with a group
// penalty their optimum is exactly zero.
std::vector<Eigen::Index> occurring_rows(const Problem& p) {
  std::vector<bool> seen(static_cast<std::size_t>(p.X.rows()), false);
  for (const auto* x : {&p.X, &p.Xg}) {
    for (Eigen::Index k = 0; k < x->outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(*x, k); it; ++it) {
        if (it.value() != 0.0) seen[static_cast<std::size_t>(it.row())] = true;
      }
    }
  }
  std::vector<Eigen::Index> rows;
  for (std::size_t j = 0; j < seen.size(); ++j) {
    if (seen[j]) rows.push_back(static_cast<Eigen::Index>(j));
  }
  return rows;
}

Reduced reduce(const NormalEquations& full, const FeatureGroups& groups, std::vector<Eigen::Index> active) {
  NormalEquations eq = full;
  eq.G = full.G(active, active);
  eq.S = full.S(active, active);
  eq.XY = full.XY(active, Eigen::all);
  std::vector<std::size_t> group_of(active.size());
  std::vector<std::size_t> remap(groups.groups.size(), groups.groups.size());
  std::vector<std::string> keys;
  for (std::size_t i = 0; i < active.size(); ++i) {
    const auto g = groups.group_of[static_cast<std::size_t>(active[i])];
    if (remap[g] == groups.groups.size()) {
      remap[g] = keys.size();
      keys.push_back(groups.keys[g]);
    }
    group_of[i] = remap[g];
  }
  return Reduced{std::move(active), std::move(eq), FeatureGroups::from_assignment(std::move(group_of), std::move(keys))};
}

// 2F(W) from the normal equations, up to the constant |Y|^2.
double smooth_from_equations(const WeightMatrix& w, const NormalEquations& eq, const FeatureGroups& groups,
                             const Hyperparams& h, double y_sq) {
  const double loss = (w.transpose() * eq.G * w).trace() - 2.0 * (w.transpose() * eq.XY).trace() + y_sq;
  return loss + h.lambda2 * l21_norm(w, groups) + h.lambda_s * (w.transpose() * eq.S * w).trace();
}

double soft(double v, double t) { return v > t ? v - t : (v < -t ? v + t : 0.0); }

// argmin_{t >= 0} 1/2 (t - nu)^2 + beta sqrt(t^2 + r^2): the length of a row
// after shrinkage when the rest of its group has norm r.
double shrink_length(double nu, double beta, double r) {
  if (beta == 0.0) return nu;
  if (r == 0.0) return std::max(nu - beta, 0.0);
  double lo = 0.0, hi = nu;
  double t = std::max(nu - beta, 0.5 * nu);
  for (int it = 0; it < 100; ++it) {
    const double q = std::sqrt(t * t + r * r);
    const double phi = t - nu + beta * t / q;
    if (phi == 0.0) break;
    (phi > 0.0 ? hi : lo) = t;
    const double slope = 1.0 + beta * r * r / (q * q * q);
    double next = t - phi / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool done = std::abs(next - t) <= 1e-16 * std::max(1.0, t);
    t = next;
    if (done) break;
  }
  return t;
}

struct RefineResult {
  int iterations = 0;
  bool converged = false;
};

// Block coordinate descent over the rows of W on the full objective, each
// row minimized exactly (soft threshold, then shrinkage against the rest of
// its group). A group sitting at zero is released by a proximal step on the
// whole block when its optimality condition fails.
RefineResult refine(WeightMatrix& w, const NormalEquations& eq, const FeatureGroups& groups, const Hyperparams& h,
                    double y_sq) {
  Eigen::MatrixXd a = eq.G;
  if (h.lambda_s != 0.0) a += h.lambda_s * eq.S;
  const Eigen::Index m = a.rows();
  const Eigen::Index c = w.cols();
  Eigen::MatrixXd grad = a * w - eq.XY;
  std::vector<double> group_sq(groups.groups.size(), 0.0);
  for (Eigen::Index j = 0; j < m; ++j) group_sq[groups.group_of[static_cast<std::size_t>(j)]] += w.row(j).squaredNorm();

  const double half_l2 = 0.5 * h.lambda2;
  const auto apply = [&](Eigen::Index j, const Eigen::RowVectorXd& next) {
    const Eigen::RowVectorXd delta = next - w.row(j);
    if ((delta.array() == 0.0).all()) return 0.0;
    group_sq[groups.group_of[static_cast<std::size_t>(j)]] += next.squaredNorm() - w.row(j).squaredNorm();
    w.row(j) = next;
    grad.noalias() += a.col(j) * delta;
    return delta.cwiseAbs().maxCoeff();
  };

  const auto value = [&] {
    double groups_sum = 0.0;
    for (const double sq : group_sq) groups_sum += std::sqrt(std::max(sq, 0.0));
    return 0.5 * (w.cwiseProduct(grad).sum() - w.cwiseProduct(eq.XY).sum() + y_sq) + h.lambda1 * w.cwiseAbs().sum() +
           half_l2 * groups_sum;
  };

  RefineResult out;
  double prev = value();
  for (int sweep = 0; sweep < h.refine_max_iter; ++sweep) {
    out.iterations = sweep + 1;
    double moved = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double ajj = a(j, j);
      if (!(ajj > 0.0)) {
        moved = std::max(moved, apply(j, Eigen::RowVectorXd::Zero(c)));
        continue;
      }
      const auto g = groups.group_of[static_cast<std::size_t>(j)];
      Eigen::RowVectorXd v = (w.row(j) - grad.row(j) / ajj).unaryExpr([&](double x) { return soft(x, h.lambda1 / ajj); });
      const double nu = v.norm();
      const double rest = std::sqrt(std::max(group_sq[g] - w.row(j).squaredNorm(), 0.0));
      const double len = nu == 0.0 ? 0.0 : shrink_length(nu, half_l2 / ajj, rest);
      if (len == 0.0) v.setZero();
      else v *= len / nu;
      moved = std::max(moved, apply(j, v));
    }

    bool released = false;
    if (h.lambda2 > 0.0) {
      for (std::size_t g = 0; g < groups.groups.size(); ++g) {
        const auto& rows = groups.groups[g];
        if (group_sq[g] != 0.0 || rows.size() < 2) continue;
        double sq = 0.0;
        for (const auto r : rows) {
          for (Eigen::Index k = 0; k < c; ++k) {
            const double s = soft(-grad(static_cast<Eigen::Index>(r), k), h.lambda1);
            sq += s * s;
          }
        }
        if (std::sqrt(sq) <= half_l2 * (1.0 + 1e-12)) continue;
        double lip = 0.0;
        for (const auto r : rows) {
          double row_sum = 0.0;
          for (const auto q : rows) row_sum += std::abs(a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)));
          lip = std::max(lip, row_sum);
        }
        Eigen::MatrixXd block(static_cast<Eigen::Index>(rows.size()), c);
        for (std::size_t i = 0; i < rows.size(); ++i) {
          block.row(static_cast<Eigen::Index>(i)) = (-grad.row(static_cast<Eigen::Index>(rows[i])) / lip).unaryExpr(
              [&](double x) { return soft(x, h.lambda1 / lip); });
        }
        block *= std::max(0.0, 1.0 - half_l2 / (lip * block.norm()));
        for (std::size_t i = 0; i < rows.size(); ++i)
          moved = std::max(moved, apply(static_cast<Eigen::Index>(rows[i]), block.row(static_cast<Eigen::Index>(i))));
        released = true;
      }
    }
    const double f = value();
    const bool settled = prev - f <= h.refine_tol * std::max(1.0, std::abs(f)) || moved == 0.0;
    prev = f;
    if (!released && settled) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace

FitResult fit(const Problem& p, const Hyperparams& h) {
  h.validate();
  p.validate();
  const Eigen::Index m = p.X.rows();
  const Eigen::Index c = p.Y.cols();
  const NormalEquations full(p);

  std::vector<Eigen::Index> active;
  if (h.lambda2 > 0.0) {
    active = occurring_rows(p);
  } else {
    active.resize(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) active[static_cast<std::size_t>(j)] = j;
  }
  const Reduced red = reduce(full, p.groups, active);
  const auto scatter = [&](const WeightMatrix& wa) {
    WeightMatrix w = WeightMatrix::Zero(m, c);
    for (std::size_t i = 0; i < red.active.size(); ++i) w.row(red.active[i]) = wa.row(static_cast<Eigen::Index>(i));
    return w;
  };

  const double y_sq = p.Y.squaredNorm();
  WeightMatrix wa = WeightMatrix::Zero(static_cast<Eigen::Index>(red.active.size()), c);
  for (std::size_t i = 0; i < red.active.size(); ++i) {
    if (red.active[i] < c) wa(static_cast<Eigen::Index>(i), red.active[i]) = 1.0;
  }

  FitResult result;
  auto& rep = result.report;
  const bool from_w0 = h.init == InitMode::truncated_identity;
  double prev = from_w0 ? smooth_from_equations(wa, red.eq, red.groups, h, y_sq)
                        : std::numeric_limits<double>::infinity();
  for (int it = 1; it <= h.max_iter; ++it) {
    const Eigen::VectorXd d = it == 1 && !from_w0 ? Eigen::VectorXd::Ones(wa.rows()) : reweight(wa, red.groups, h);
    wa = irls_step(red.eq, d, h);
    const double f = smooth_from_equations(wa, red.eq, red.groups, h, y_sq);
    rep.smooth_trace.push_back(f);
    rep.objective_trace.push_back(0.5 * f + h.lambda1 * wa.cwiseAbs().sum());
    rep.iterations = it;
    if (h.lambda2 == 0.0 || (std::isfinite(prev) && std::abs(prev - f) <= h.tol * std::max(std::abs(prev), 1e-300))) {
      rep.converged = true;
      break;
    }
    prev = f;
  }

  if (h.lambda1 > 0.0 || h.lambda2 > 0.0) {
    const auto r = refine(wa, red.eq, red.groups, h, y_sq);
    rep.refine_iterations = r.iterations;
    rep.refine_converged = r.converged;
  }

  result.W = scatter(wa);
  rep.final_objective = objective(result.W, p, h);
  Eigen::Index zero_rows = 0;
  for (Eigen::Index j = 0; j < m; ++j) zero_rows += (result.W.row(j).array() == 0.0).all() ? 1 : 0;
  rep.final_sparsity = m == 0 ? 0.0 : static_cast<double>(zero_rows) / static_cast<double>(m);
  return result;
}

Eigen::MatrixXd scores(const Eigen::SparseMatrix<double>& x, const WeightMatrix& w) {
  if (x.rows() != w.rows())
    throw ValidationError("feature matrix has " + std::to_string(x.rows()) + " rows, model has " +
                          std::to_string(w.rows()));
  return x.transpose() * w;
}

int argmax_row(const Eigen::MatrixXd& s, Eigen::Index row) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < s.cols(); ++k) {
    if (s(row, k) > s(row, best)) best = k;
  }
  return static_cast<int>(best);
}

int predict(const Eigen::VectorXd& x, const WeightMatrix& w) {
  if (x.size() != w.rows()) throw ValidationError("feature vector length does not match the model");
  const Eigen::MatrixXd s = x.transpose() * w;
  return argmax_row(s, 0);
}

std::vector<int> predict_all(const Eigen::SparseMatrix<double>& x, const WeightMatrix& w) {
  const Eigen::MatrixXd s = scores(x, w);
  std::vector<int> out(static_cast<std::size_t>(s.rows()));
  for (Eigen::Index i = 0; i < s.rows(); ++i) out[static_cast<std::size_t>(i)] = argmax_row(s, i);
  return out;
}

}  // namespace nsi
