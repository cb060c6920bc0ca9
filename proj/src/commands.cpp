#include "nsi/commands.hpp"

#include "nsi/error.hpp"
#include "nsi/graph_io.hpp"
#include "nsi/manifest.hpp"
#include "nsi/records_io.hpp"
#include "nsi/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace nsi {

namespace {

std::string num(double v) { return format_shortest(v); }
std::string flag(bool b) { return b ? "true" : "false"; }

void note(const GlobalOptions& g, const std::string& message) {
  if (!g.quiet) std::cerr << message << '\n';
}

void emit(const GlobalOptions& g, const RunManifest& m, const std::string& primary_output) {
  if (!g.manifest_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(g.manifest_dir, ec);
    if (ec) throw IoError("cannot create manifest directory " + g.manifest_dir + ": " + ec.message());
  }
  write_text_file(manifest_path(g.manifest_dir, m.command, primary_output), m.format());
}

void record_hyper(RunManifest& m, const Hyperparams& h) {
  m.set("lambda1", num(h.lambda1));
  m.set("lambda2", num(h.lambda2));
  m.set("lambda_s", num(h.lambda_s));
  m.set("epsilon", num(h.epsilon));
  m.set("tol", num(h.tol));
  m.set("max_iter", std::to_string(h.max_iter));
  m.set("refine_tol", num(h.refine_tol));
  m.set("refine_max_iter", std::to_string(h.refine_max_iter));
  m.set("init", to_string(h.init));
}

void record_features(RunManifest& m, const FeatureConfig& f) {
  m.set("order", std::to_string(f.order));
  m.set("pos_colored", flag(f.pos_colored));
  m.set("min_count", std::to_string(f.min_count));
  m.set("max_features", std::to_string(f.max_features));
  m.set("binary", flag(f.binary));
  m.set("norm", to_string(f.norm));
  m.set("tags", flag(f.tags));
  m.set("morphology", flag(f.morphology));
  m.set("entities", flag(f.entities));
  m.set("length", flag(f.length));
}

void record_text_inputs(RunManifest& m, const TextInputs& t) {
  for (const auto* path : {&t.annotations, &t.pos_lexicon, &t.gazetteer, &t.quantifiers})
    if (!path->empty()) m.add_input(*path);
}

std::vector<std::string> ids_of(const std::vector<TweetRecord>& records) {
  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (const auto& r : records) ids.push_back(r.tweet_id);
  return ids;
}

TweetGraph induced_by_ids(const TweetGraph& graph, const std::vector<std::string>& ids) {
  std::vector<std::size_t> keep;
  keep.reserve(ids.size());
  for (const auto& id : ids) {
    const auto i = graph.index_of(id);
    if (i == graph.size()) throw ValidationError("tweet " + id + " is not in the graph");
    keep.push_back(i);
  }
  return graph.induced(keep);
}

Eigen::MatrixXd laplacian_over(const TweetGraph& graph, const std::vector<std::string>& nodes, double damping) {
  if (nodes.empty()) return Eigen::MatrixXd(0, 0);
  return graph_laplacian(induced_by_ids(graph, nodes), damping).L;
}

TweetGraph load_graph(const std::string& graph_path, const std::string& edges_path, RunManifest& m) {
  if (graph_path.empty() == edges_path.empty()) throw ValidationError("give exactly one of --graph and --edges");
  if (!edges_path.empty()) {
    m.add_input(edges_path);
    return line_graph(read_edge_list_file(edges_path));
  }
  m.add_input(graph_path);
  m.add_input(node_list_path(graph_path));
  return read_tweet_graph(graph_path);
}

}  // namespace

std::vector<TweetRecord> load_records(const std::string& path, const TextInputs& text) {
  auto records = read_records(path);
  if (!text.annotations.empty()) read_annotations(text.annotations, records);
  if (!text.pos_lexicon.empty() || !text.gazetteer.empty()) {
    const auto annotator = LexiconAnnotator::load(text.pos_lexicon, text.gazetteer);
    annotate_missing(records, annotator);
  }
  return records;
}

std::vector<std::string> penalty_nodes(const TweetGraph& graph, const std::vector<TweetRecord>& records,
                                       bool transductive) {
  if (transductive) return graph.nodes();
  std::set<std::string> labeled;
  for (const auto& r : records)
    if (r.label) labeled.insert(r.tweet_id);
  std::vector<std::string> nodes;
  for (const auto& id : graph.nodes())
    if (labeled.count(id)) nodes.push_back(id);
  return nodes;
}

TrainResult train_model(const std::vector<TweetRecord>& records, const std::vector<std::string>& graph_nodes,
                        const Eigen::MatrixXd& L, const TrainSettings& settings) {
  settings.hyper.validate();
  std::vector<TweetRecord> labeled;
  for (const auto& r : records)
    if (r.label) labeled.push_back(r);
  if (labeled.empty()) throw ValidationError("no labeled records to train on");
  std::sort(labeled.begin(), labeled.end(), [](const auto& a, const auto& b) { return a.tweet_id < b.tweet_id; });
  if (L.rows() != static_cast<Eigen::Index>(graph_nodes.size()) || L.cols() != L.rows())
    throw ValidationError("Laplacian is " + std::to_string(L.rows()) + " x " + std::to_string(L.cols()) + " for " +
                          std::to_string(graph_nodes.size()) + " graph nodes");

  const auto ids = ids_of(labeled);
  auto built = build_matrix(labeled, ids, nullptr, settings.features);
  std::vector<int> y;
  y.reserve(labeled.size());
  for (const auto& r : labeled) y.push_back(*r.label);

  const auto graph_records = align_records(records, graph_nodes);
  auto x_graph = build_matrix(graph_records, graph_nodes, &built.vocabulary, settings.features).matrix.X;
  auto groups = assign_groups(built.vocabulary);
  const Problem p =
      make_transductive_problem(std::move(built.matrix.X), one_hot(y), std::move(x_graph), L, groups);

  TrainResult out;
  auto fitted = fit(p, settings.hyper);
  out.report = std::move(fitted.report);
  auto& model = out.model;
  model.hyper = settings.hyper;
  model.features = settings.features;
  model.damping = settings.damping;
  model.transductive = settings.transductive;
  model.train_size = labeled.size();
  model.vocabulary = std::move(built.vocabulary);
  model.groups = std::move(groups);
  model.W = std::move(fitted.W);
  return out;
}

std::vector<Prediction> predict_records(const Model& model, const std::vector<TweetRecord>& records) {
  const auto ids = ids_of(records);
  const auto built = build_matrix(records, ids, &model.vocabulary, model.features);
  const Eigen::MatrixXd s = scores(built.matrix.X, model.W);
  std::vector<Prediction> out;
  out.reserve(records.size());
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    out.push_back({ids[static_cast<std::size_t>(i)], argmax_row(s, i), s.row(i).transpose()});
  return out;
}

std::string format_predictions(const std::vector<Prediction>& predictions) {
  std::ostringstream out;
  for (const auto& p : predictions) {
    out << p.tweet_id << '\t' << p.label;
    for (Eigen::Index k = 0; k < p.scores.size(); ++k) out << '\t' << num(p.scores[k]);
    out << '\n';
  }
  return out.str();
}

std::string format_report(const FitReport& r) {
  std::ostringstream out;
  out << "iterations\t" << r.iterations << '\n';
  out << "converged\t" << flag(r.converged) << '\n';
  out << "refine_iterations\t" << r.refine_iterations << '\n';
  out << "refine_converged\t" << flag(r.refine_converged) << '\n';
  out << "final_objective\t" << num(r.final_objective) << '\n';
  out << "final_sparsity\t" << num(r.final_sparsity) << '\n';
  for (std::size_t i = 0; i < r.objective_trace.size(); ++i)
    out << "trace\t" << i + 1 << '\t' << num(r.objective_trace[i]) << '\t' << num(r.smooth_trace[i]) << '\n';
  return out.str();
}

void cmd_convert(const GlobalOptions& g, const ConvertArgs& a) {
  RunManifest m;
  m.command = "convert";
  const auto users = read_edge_list_file(a.edges);
  m.add_input(a.edges);
  const auto graph = line_graph(users);
  write_tweet_graph(a.out, graph);
  m.add_output(a.out);
  m.add_output(node_list_path(a.out));
  emit(g, m, a.out);
  note(g, "convert: " + std::to_string(graph.size()) + " tweets, " + std::to_string(graph.link_count()) + " links");
}

void cmd_laplacian(const GlobalOptions& g, const LaplacianArgs& a) {
  RunManifest m;
  m.command = "laplacian";
  m.set("damping", num(a.damping));
  const auto graph = read_tweet_graph(a.graph);
  m.add_input(a.graph);
  m.add_input(node_list_path(a.graph));
  std::vector<std::string> nodes = graph.nodes();
  if (!a.subset.empty()) {
    nodes = penalty_nodes(graph, read_records(a.subset), false);
    m.add_input(a.subset);
  }
  write_labeled_matrix(a.out, nodes, laplacian_over(graph, nodes, a.damping));
  m.add_output(a.out);
  m.add_output(node_list_path(a.out));
  emit(g, m, a.out);
  note(g, "laplacian: " + std::to_string(nodes.size()) + " nodes");
}

void cmd_train(const GlobalOptions& g, const TrainArgs& a) {
  RunManifest m;
  m.command = "train";
  const auto& s = a.settings;
  s.hyper.validate();
  record_hyper(m, s.hyper);
  record_features(m, s.features);
  m.set("damping", num(s.damping));
  m.set("transductive", flag(s.transductive));

  auto settings = s;
  if (!a.text.quantifiers.empty()) settings.features.quantifiers = load_word_list(a.text.quantifiers);
  const auto records = load_records(a.records, a.text);
  m.add_input(a.records);
  record_text_inputs(m, a.text);

  std::vector<std::string> nodes;
  Eigen::MatrixXd L(0, 0);
  if (!a.laplacian.empty() && !a.graph.empty()) throw ValidationError("give only one of --graph and --laplacian");
  if (!a.laplacian.empty()) {
    auto lm = read_labeled_matrix(a.laplacian);
    m.add_input(a.laplacian);
    m.add_input(node_list_path(a.laplacian));
    nodes = std::move(lm.nodes);
    L = std::move(lm.matrix);
  } else if (!a.graph.empty()) {
    const auto graph = read_tweet_graph(a.graph);
    m.add_input(a.graph);
    m.add_input(node_list_path(a.graph));
    nodes = penalty_nodes(graph, records, s.transductive);
    L = s.hyper.lambda_s > 0.0 ? laplacian_over(graph, nodes, s.damping)
                               : Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nodes.size()),
                                                       static_cast<Eigen::Index>(nodes.size()));
  } else if (s.hyper.lambda_s > 0.0) {
    throw ValidationError("train needs --graph or --laplacian when lambda_s > 0");
  }

  const auto result = train_model(records, nodes, L, settings);
  write_model(a.out, result.model);
  const auto report_path = a.report.empty() ? a.out + ".report" : a.report;
  write_text_file(report_path, format_report(result.report));
  m.add_output(a.out);
  m.add_output(report_path);
  emit(g, m, a.out);
  const auto& r = result.report;
  note(g, "train: m=" + std::to_string(result.model.W.rows()) + " n=" + std::to_string(result.model.train_size) +
              " iterations=" + std::to_string(r.iterations) + (r.converged ? "" : " (not converged)") +
              " objective=" + num(r.final_objective));
}

void cmd_predict(const GlobalOptions& g, const PredictArgs& a) {
  RunManifest m;
  m.command = "predict";
  const auto model = read_model(a.model);
  m.add_input(a.model);
  auto text = a.text;
  text.quantifiers.clear();  // the model carries its own list
  const auto records = load_records(a.records, text);
  m.add_input(a.records);
  record_text_inputs(m, text);
  write_text_file(a.out, format_predictions(predict_records(model, records)));
  m.add_output(a.out);
  emit(g, m, a.out);
  note(g, "predict: " + std::to_string(records.size()) + " tweets");
}

void cmd_evaluate(const GlobalOptions& g, const EvaluateArgs& a) {
  RunManifest m;
  m.command = "evaluate";
  std::map<std::string, std::optional<int>> truth;
  for (auto& r : read_records(a.truth)) truth.emplace(r.tweet_id, r.label);
  m.add_input(a.truth);

  const auto text = read_text_file(a.predictions);
  m.add_input(a.predictions);
  std::vector<int> y, pred;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto parts = split(line, '\t');
    if (parts.size() < 2) throw parse_error(a.predictions, lineno, "expected tweet_id<TAB>class");
    const std::string id(parts[0]);
    const auto it = truth.find(id);
    if (it == truth.end()) throw ValidationError("prediction for unknown tweet " + id);
    if (parts[1] != "0" && parts[1] != "1") throw parse_error(a.predictions, lineno, "class must be 0 or 1");
    if (!it->second) continue;
    y.push_back(*it->second);
    pred.push_back(parts[1] == "1" ? 1 : 0);
  }
  if (y.empty()) throw ValidationError("no prediction has a labeled counterpart in " + a.truth);

  const auto counts = confusion(y, pred);
  const auto met = metrics(counts);
  write_text_file(a.out, "mode\tf1\tprecision\trecall\nnsi\t" + format3(met.f1) + '\t' + format3(met.precision) + '\t' +
                             format3(met.recall) + '\n');
  m.add_output(a.out);
  if (!a.json.empty()) {
    nlohmann::ordered_json j;
    j["evaluated"] = counts.total();
    j["f1"] = met.f1;
    j["precision"] = met.precision;
    j["recall"] = met.recall;
    j["tp"] = counts.tp;
    j["fp"] = counts.fp;
    j["tn"] = counts.tn;
    j["fn"] = counts.fn;
    write_text_file(a.json, j.dump(2) + '\n');
    m.add_output(a.json);
  }
  emit(g, m, a.out);
  note(g, "evaluate: " + std::to_string(counts.total()) + " tweets, f1 " + format3(met.f1));
}

void cmd_synth(const GlobalOptions& g, const SynthArgs& a) {
  RunManifest m;
  m.command = "synth";
  auto c = a.config;
  c.seed = g.seed;
  m.set("seed", std::to_string(c.seed));
  m.set("n_users", std::to_string(c.n_users));
  m.set("n_tweets", std::to_string(c.n_tweets));
  m.set("n_communities", std::to_string(c.n_communities));
  m.set("p_intra", num(c.p_intra));
  m.set("p_inter", num(c.p_inter));
  m.set("positive_rate", num(c.positive_rate));
  m.set("homophily", num(c.homophily));
  m.set("content_signal", num(c.content_signal));
  m.set("vocab_size", std::to_string(c.vocab_size));
  m.set("min_length", std::to_string(c.min_length));
  m.set("max_length", std::to_string(c.max_length));
  m.set("mention_rate", num(c.mention_rate));
  m.set("train_fraction", num(a.train_fraction));

  const auto data = generate(c);
  const auto split = stratified_split(data.labels(), a.train_fraction, g.seed);

  std::error_code ec;
  std::filesystem::create_directories(a.out_dir, ec);
  if (ec) throw IoError("cannot create " + a.out_dir + ": " + ec.message());
  const auto dir = std::filesystem::path(a.out_dir);
  const auto edges = (dir / "edges.tsv").string();
  const auto all = (dir / "records.tsv").string();
  const auto train = (dir / "train.tsv").string();
  const auto test = (dir / "test.tsv").string();

  std::ostringstream e;
  write_edge_list(e, data.users);
  write_text_file(edges, e.str());
  write_records(all, data.records);
  auto train_records = data.records;
  std::vector<TweetRecord> test_records;
  for (const auto i : split.test) {
    test_records.push_back(data.records[i]);
    train_records[i].label.reset();
  }
  write_records(train, train_records);
  write_records(test, test_records);

  const double mean = mean_interactions(line_graph(data.users));
  m.set("users_drawn", std::to_string(data.n_users));
  m.set("tweets_drawn", std::to_string(data.records.size()));
  m.set("mean_interactions", num(mean));
  for (const auto& p : {edges, all, train, test}) m.add_output(p);
  emit(g, m, (dir / "synth").string());

  std::size_t positives = 0;
  for (const auto& r : data.records) positives += *r.label == 1;
  std::ostringstream msg;
  msg << "synth: " << data.records.size() << " tweets, " << data.n_users << " users, " << positives
      << " positive, mean interactions per tweet " << format3(mean);
  note(g, msg.str());
}

namespace {

Dataset load_dataset(const AblateArgs& a, RunManifest& m) {
  auto graph = load_graph(a.graph, a.edges, m);
  const auto records = load_records(a.records, a.text);
  m.add_input(a.records);
  record_text_inputs(m, a.text);
  auto aligned = align_records(records, graph.nodes());
  return Dataset{std::move(graph), std::move(aligned)};
}

void record_ablation(RunManifest& m, const AblationConfig& c) {
  record_hyper(m, c.hyper);
  record_features(m, c.features);
  m.set("damping", num(c.damping));
  m.set("transductive", flag(c.transductive));
  m.set("train_fraction", num(c.train_fraction));
  m.set("folds", std::to_string(c.folds));
  m.set("seed", std::to_string(c.seed));
}

AblationConfig resolved(const GlobalOptions& g, const AblateArgs& a) {
  auto c = a.config;
  c.seed = g.seed;
  if (!a.text.quantifiers.empty()) c.features.quantifiers = load_word_list(a.text.quantifiers);
  c.hyper.validate();
  return c;
}

}  // namespace

void cmd_ablate(const GlobalOptions& g, const AblateArgs& a) {
  RunManifest m;
  m.command = "ablate";
  const auto config = resolved(g, a);
  std::string modes;
  for (const auto mode : config.modes) modes += (modes.empty() ? "" : ",") + to_string(mode);
  m.set("modes", modes);
  record_ablation(m, config);
  const auto data = load_dataset(a, m);
  const auto rows = run_ablation(config, data);
  const auto table = format_table(rows);
  write_text_file(a.out, table);
  m.add_output(a.out);
  if (!a.json.empty()) {
    write_text_file(a.json, format_json(rows));
    m.add_output(a.json);
  }
  emit(g, m, a.out);
  if (!g.quiet) std::cout << table;
}

void cmd_sweep(const GlobalOptions& g, const SweepArgs& a) {
  RunManifest m;
  m.command = "sweep";
  if (a.lambda_s.empty()) throw ValidationError("sweep needs at least one lambda_s value");
  auto config = resolved(g, a.base);
  config.modes = {AblationMode::combined};
  record_ablation(m, config);
  std::string values;
  for (const double v : a.lambda_s) values += (values.empty() ? "" : ",") + num(v);
  m.set("lambda_s_values", values);
  const auto data = load_dataset(a.base, m);

  std::string table = "lambda_s\tf1\tprecision\trecall\n";
  for (const double v : a.lambda_s) {
    config.hyper.lambda_s = v;
    config.hyper.validate();
    const auto rows = run_ablation(config, data);
    const auto& met = rows.front().metrics;
    table += num(v) + '\t' + format3(met.f1) + '\t' + format3(met.precision) + '\t' + format3(met.recall) + '\n';
  }
  write_text_file(a.base.out, table);
  m.add_output(a.base.out);
  emit(g, m, a.base.out);
  if (!g.quiet) std::cout << table;
}

}  // namespace nsi
