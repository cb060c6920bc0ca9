#include "nsi/evaluation.hpp"

#include "nsi/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

namespace nsi {

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) noexcept {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

ConfusionCounts confusion(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size())
    throw ValidationError("have " + std::to_string(predicted.size()) + " predictions for " +
                          std::to_string(truth.size()) + " labels");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == 1;
    const bool p = predicted[i] == 1;
    if (t && p) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Metrics metrics_from(double precision, double recall) {
  Metrics m{precision, recall, 0.0};
  if (precision + recall > 0.0) m.f1 = 2.0 * precision * recall / (precision + recall);
  return m;
}

Metrics metrics(const ConfusionCounts& c) {
  const auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  return metrics_from(ratio(c.tp, c.tp + c.fp), ratio(c.tp, c.tp + c.fn));
}

std::string format3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

namespace {

std::map<int, std::vector<std::size_t>> by_class(std::span<const int> labels) {
  std::map<int, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < labels.size(); ++i) classes[labels[i]].push_back(i);
  if (classes.size() < 2) throw ValidationError("stratified split needs at least two classes");
  return classes;
}

}  // namespace

Split stratified_split(std::span<const int> labels, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("train fraction must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  Split s;
  for (auto& [label, items] : by_class(labels)) {
    std::shuffle(items.begin(), items.end(), rng);
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(items.size())));
    s.train.insert(s.train.end(), items.begin(), items.begin() + static_cast<std::ptrdiff_t>(k));
    s.test.insert(s.test.end(), items.begin() + static_cast<std::ptrdiff_t>(k), items.end());
  }
  if (s.train.empty() || s.test.empty()) throw ValidationError("split leaves an empty train or test set");
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw ValidationError("need at least two folds");
  if (labels.size() < static_cast<std::size_t>(folds)) throw ValidationError("more folds than items");
  std::mt19937_64 rng(seed);
  std::vector<int> fold(labels.size(), 0);
  int next = 0;
  for (auto& [label, items] : by_class(labels)) {
    std::shuffle(items.begin(), items.end(), rng);
    for (const auto i : items) {
      fold[i] = next;
      next = (next + 1) % folds;
    }
  }
  return fold;
}

std::string to_string(AblationMode mode) {
  switch (mode) {
    case AblationMode::combined: return "combined";
    case AblationMode::content_only: return "content_only";
    case AblationMode::network_only: return "network_only";
  }
  return "?";
}

AblationMode parse_mode(const std::string& s) {
  for (const auto mode : kAllModes) {
    if (to_string(mode) == s) return mode;
  }
  throw ValidationError("unknown ablation mode '" + s + "'");
}

std::vector<int> Dataset::labels() const {
  if (records.size() != graph.size())
    throw ValidationError("dataset has " + std::to_string(records.size()) + " records for " +
                          std::to_string(graph.size()) + " graph nodes");
  std::vector<int> y(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].tweet_id != graph.nodes()[i])
      throw ValidationError("record " + records[i].tweet_id + " is out of graph order");
    if (!records[i].label) throw ValidationError("tweet " + records[i].tweet_id + " has no label");
    y[i] = *records[i].label;
  }
  return y;
}

namespace {

template <class T>
std::vector<T> pick(const std::vector<T>& v, std::span<const std::size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (const auto i : idx) out.push_back(v[i]);
  return out;
}

std::vector<std::string> ids_of(const Dataset& data, std::span<const std::size_t> idx) {
  return pick(data.graph.nodes(), idx);
}

// Columns `idx` of the adjacency, one feature row per tweet.
Eigen::SparseMatrix<double> adjacency_columns(const TweetGraph& g, std::span<const std::size_t> idx, ColumnNorm norm) {
  const auto& a = g.adjacency();
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, static_cast<Eigen::Index>(idx[k])); it; ++it)
      triplets.emplace_back(it.row(), static_cast<Eigen::Index>(k), it.value());
  }
  Eigen::SparseMatrix<double> x(a.rows(), static_cast<Eigen::Index>(idx.size()));
  x.setFromTriplets(triplets.begin(), triplets.end());
  if (norm == ColumnNorm::unit_l2) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double n = x.col(j).norm();
      if (n > 0.0) x.col(j) /= n;
    }
  }
  return x;
}

}  // namespace

ModeRun run_mode(AblationMode mode, const AblationConfig& config, const Dataset& data, const Split& split) {
  const auto y = data.labels();
  const auto y_train = pick(y, split.train);
  const auto y_test = pick(y, split.test);

  Hyperparams h = config.hyper;
  if (mode != AblationMode::combined) h.lambda_s = 0.0;

  Eigen::SparseMatrix<double> x_train, x_test, x_graph;
  FeatureGroups groups;
  std::vector<std::size_t> graph_nodes = split.train;
  if (config.transductive && mode == AblationMode::combined) {
    graph_nodes.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) graph_nodes[i] = i;
  }

  if (mode == AblationMode::network_only) {
    x_train = adjacency_columns(data.graph, split.train, config.features.norm);
    x_test = adjacency_columns(data.graph, split.test, config.features.norm);
    x_graph = x_train;
    groups = FeatureGroups::singletons(data.graph.size());
  } else {
    const auto train_ids = ids_of(data, split.train);
    const auto test_ids = ids_of(data, split.test);
    const auto train_records = pick(data.records, split.train);
    auto built = build_matrix(train_records, train_ids, nullptr, config.features);
    x_train = std::move(built.matrix.X);
    const auto test_records = pick(data.records, split.test);
    x_test = build_matrix(test_records, test_ids, &built.vocabulary, config.features).matrix.X;
    if (graph_nodes.size() == split.train.size()) {
      x_graph = x_train;
    } else {
      x_graph = build_matrix(data.records, data.graph.nodes(), &built.vocabulary, config.features).matrix.X;
    }
    groups = assign_groups(built.vocabulary);
  }

  Eigen::MatrixXd L;
  if (h.lambda_s > 0.0) {
    L = graph_laplacian(data.graph.induced(graph_nodes), config.damping).L;
  } else {
    L = Eigen::MatrixXd::Zero(x_graph.cols(), x_graph.cols());
  }

  const Problem p = make_transductive_problem(std::move(x_train), one_hot(y_train), std::move(x_graph), std::move(L),
                                              std::move(groups));
  ModeRun run;
  run.fit = fit(p, h);
  run.predicted = predict_all(x_test, run.fit.W);
  run.counts = confusion(y_test, run.predicted);
  return run;
}

std::vector<AblationRow> run_ablation(const AblationConfig& config, const Dataset& data) {
  const auto y = data.labels();
  std::vector<Split> splits;
  if (config.folds >= 2) {
    const auto fold = stratified_folds(y, config.folds, config.seed);
    for (int k = 0; k < config.folds; ++k) {
      Split s;
      for (std::size_t i = 0; i < y.size(); ++i) (fold[i] == k ? s.test : s.train).push_back(i);
      splits.push_back(std::move(s));
    }
  } else {
    splits.push_back(stratified_split(y, config.train_fraction, config.seed));
  }

  std::vector<AblationRow> rows;
  for (const auto mode : config.modes) {
    AblationRow row{mode, {}, {}};
    for (const auto& s : splits) row.counts += run_mode(mode, config, data, s).counts;
    row.metrics = metrics(row.counts);
    rows.push_back(row);
  }
  return rows;
}

std::string format_table(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << "mode\tf1\tprecision\trecall\n";
  for (const auto& r : rows) {
    out << to_string(r.mode) << '\t' << format3(r.metrics.f1) << '\t' << format3(r.metrics.precision) << '\t'
        << format3(r.metrics.recall) << '\n';
  }
  return out.str();
}

std::string format_json(const std::vector<AblationRow>& rows) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    doc.push_back({{"mode", to_string(r.mode)},
                   {"f1", r.metrics.f1},
                   {"precision", r.metrics.precision},
                   {"recall", r.metrics.recall},
                   {"tp", r.counts.tp},
                   {"fp", r.counts.fp},
                   {"tn", r.counts.tn},
                   {"fn", r.counts.fn}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace nsi
