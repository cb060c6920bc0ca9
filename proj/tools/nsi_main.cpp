#include "nsi/commands.hpp"
#include "nsi/error.hpp"
#include "nsi/manifest.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>

namespace {

void solver_flags(CLI::App* cmd, nsi::Hyperparams& h, std::string& init) {
  cmd->add_option("--lambda1", h.lambda1, "l1 weight")->capture_default_str();
  cmd->add_option("--lambda2", h.lambda2, "group (l2,1) weight")->capture_default_str();
  cmd->add_option("--lambda-s", h.lambda_s, "graph smoothness weight")->capture_default_str();
  cmd->add_option("--tol", h.tol, "relative change of the smooth objective")->capture_default_str();
  cmd->add_option("--max-iter", h.max_iter, "reweighting iteration cap")->capture_default_str();
  cmd->add_option("--epsilon", h.epsilon, "floor on group norms")->capture_default_str();
  cmd->add_option("--refine-tol", h.refine_tol, "projection stage tolerance")->capture_default_str();
  cmd->add_option("--refine-max-iter", h.refine_max_iter, "projection stage sweep cap")->capture_default_str();
  cmd->add_option("--init", init, "identity-reweighting or truncated-identity")->capture_default_str();
}

void feature_flags(CLI::App* cmd, nsi::FeatureConfig& f, std::string& norm) {
  cmd->add_option("--order", f.order, "1 = unigrams, 2 = unigrams and bigrams")->capture_default_str();
  cmd->add_flag("--pos-colored", f.pos_colored, "append part-of-speech labels to n-gram tokens");
  cmd->add_option("--min-count", f.min_count, "minimum training count of an n-gram")->capture_default_str();
  cmd->add_option("--max-features", f.max_features, "keep the most frequent n-grams (0 = all)")->capture_default_str();
  cmd->add_flag("--binary", f.binary, "presence instead of counts");
  cmd->add_option("--norm", norm, "column normalization: unit-l2 or none")->capture_default_str();
  cmd->add_flag("!--no-tags", f.tags, "drop hashtag features");
  cmd->add_flag("!--no-morphology", f.morphology, "drop morphological counts");
  cmd->add_flag("!--no-entities", f.entities, "drop entity counts");
  cmd->add_flag("!--no-length", f.length, "drop the length feature");
}

void text_flags(CLI::App* cmd, nsi::TextInputs& t, bool quantifiers = true) {
  cmd->add_option("--annotations", t.annotations, "tweet_id<TAB>index<TAB>pos<TAB>entity file")->check(CLI::ExistingFile);
  cmd->add_option("--pos-lexicon", t.pos_lexicon, "token<TAB>pos word list")->check(CLI::ExistingFile);
  cmd->add_option("--gazetteer", t.gazetteer, "token<TAB>ENTITY word list")->check(CLI::ExistingFile);
  if (quantifiers)
    cmd->add_option("--quantifiers", t.quantifiers, "quantifier word list, one per line")->check(CLI::ExistingFile);
}

std::vector<nsi::AblationMode> parse_modes(const std::vector<std::string>& names) {
  std::vector<nsi::AblationMode> modes;
  for (const auto& n : names) modes.push_back(nsi::parse_mode(n));
  return modes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Networked short-text classification"};
  app.set_version_flag("--version", std::string("nsi ") + nsi::kToolVersion);
  app.require_subcommand(1);

  nsi::GlobalOptions g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_flag("--quiet", g.quiet, "no progress output");
  app.add_option("--manifest-dir", g.manifest_dir, "directory for run manifests");

  std::function<void()> run;

  nsi::ConvertArgs convert;
  auto* c_convert = app.add_subcommand("convert", "edge list to tweet graph");
  c_convert->add_option("edges", convert.edges, "src<TAB>dst<TAB>tweet_id[<TAB>weight]")->required();
  c_convert->add_option("-o,--out", convert.out, "tweet graph file")->required();
  c_convert->callback([&] { run = [&] { nsi::cmd_convert(g, convert); }; });

  nsi::LaplacianArgs lap;
  auto* c_lap = app.add_subcommand("laplacian", "tweet graph to Laplacian");
  c_lap->add_option("graph", lap.graph, "tweet graph file")->required();
  c_lap->add_option("-o,--out", lap.out, "Laplacian file")->required();
  c_lap->add_option("--damping", lap.damping, "random-walk damping in (0, 1]")->capture_default_str();
  c_lap->add_option("--subset", lap.subset, "records file; keep its labeled tweets only")->check(CLI::ExistingFile);
  c_lap->callback([&] { run = [&] { nsi::cmd_laplacian(g, lap); }; });

  nsi::TrainArgs train;
  std::string train_init = nsi::to_string(train.settings.hyper.init);
  std::string train_norm = nsi::to_string(train.settings.features.norm);
  auto* c_train = app.add_subcommand("train", "fit a model");
  c_train->add_option("records", train.records, "tweet_id<TAB>label<TAB>text, label 0/1/?")->required();
  c_train->add_option("-o,--out", train.out, "model file")->required();
  c_train->add_option("--graph", train.graph, "tweet graph file");
  c_train->add_option("--laplacian", train.laplacian, "precomputed Laplacian file");
  c_train->add_option("--report", train.report, "fit report file (default <model>.report)");
  c_train->add_option("--damping", train.settings.damping, "random-walk damping in (0, 1]")->capture_default_str();
  c_train->add_flag("--transductive", train.settings.transductive, "graph penalty over all graph tweets");
  solver_flags(c_train, train.settings.hyper, train_init);
  feature_flags(c_train, train.settings.features, train_norm);
  text_flags(c_train, train.text);
  c_train->callback([&] {
    train.settings.hyper.init = nsi::parse_init(train_init);
    train.settings.features.norm = nsi::parse_column_norm(train_norm);
    run = [&] { nsi::cmd_train(g, train); };
  });

  nsi::PredictArgs pred;
  auto* c_pred = app.add_subcommand("predict", "score tweets with a model");
  c_pred->add_option("model", pred.model, "model file")->required();
  c_pred->add_option("records", pred.records, "records file")->required();
  c_pred->add_option("-o,--out", pred.out, "tweet_id<TAB>class<TAB>score0<TAB>score1")->required();
  text_flags(c_pred, pred.text, false);
  c_pred->callback([&] { run = [&] { nsi::cmd_predict(g, pred); }; });

  nsi::EvaluateArgs eval;
  auto* c_eval = app.add_subcommand("evaluate", "metrics of predictions against labels");
  c_eval->add_option("predictions", eval.predictions, "predict output")->required();
  c_eval->add_option("truth", eval.truth, "labeled records file")->required();
  c_eval->add_option("-o,--out", eval.out, "metrics table")->required();
  c_eval->add_option("--json", eval.json, "structured metrics file");
  c_eval->callback([&] { run = [&] { nsi::cmd_evaluate(g, eval); }; });

  nsi::SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic dataset directory");
  auto& sc = synth.config;
  c_synth->add_option("-o,--out", synth.out_dir, "output directory")->required();
  c_synth->add_option("--users", sc.n_users, "user count (0 = derive from --tweets)")->capture_default_str();
  c_synth->add_option("--tweets", sc.n_tweets, "expected tweet count")->capture_default_str();
  c_synth->add_option("--communities", sc.n_communities, "community count")->capture_default_str();
  c_synth->add_option("--p-intra", sc.p_intra, "interaction probability inside a community")->capture_default_str();
  c_synth->add_option("--p-inter", sc.p_inter, "interaction probability across communities")->capture_default_str();
  c_synth->add_option("--positive-rate", sc.positive_rate, "share of positive tweets")->capture_default_str();
  c_synth->add_option("--homophily", sc.homophily, "chance a tweet carries its community label")->capture_default_str();
  c_synth->add_option("--content-signal", sc.content_signal, "class separation of the words")->capture_default_str();
  c_synth->add_option("--vocab-size", sc.vocab_size, "vocabulary size")->capture_default_str();
  c_synth->add_option("--min-length", sc.min_length, "shortest tweet in words")->capture_default_str();
  c_synth->add_option("--max-length", sc.max_length, "longest tweet in words")->capture_default_str();
  c_synth->add_option("--mention-rate", sc.mention_rate, "chance a tweet names its target user")->capture_default_str();
  c_synth->add_option("--train-fraction", synth.train_fraction, "labeled share in train.tsv")->capture_default_str();
  c_synth->callback([&] { run = [&] { nsi::cmd_synth(g, synth); }; });

  const auto ablate_flags = [&](CLI::App* cmd, nsi::AblateArgs& a, std::string& init, std::string& norm) {
    cmd->add_option("records", a.records, "labeled records file")->required();
    cmd->add_option("-o,--out", a.out, "metrics table")->required();
    cmd->add_option("--graph", a.graph, "tweet graph file");
    cmd->add_option("--edges", a.edges, "edge list (converted in memory)");
    cmd->add_option("--damping", a.config.damping, "random-walk damping in (0, 1]")->capture_default_str();
    cmd->add_flag("--transductive", a.config.transductive, "graph penalty over train and test tweets");
    cmd->add_option("--train-fraction", a.config.train_fraction, "training share of each class")->capture_default_str();
    cmd->add_option("--folds", a.config.folds, "k-fold cross-validation with pooled counts (0 = one split)")
        ->capture_default_str();
    solver_flags(cmd, a.config.hyper, init);
    feature_flags(cmd, a.config.features, norm);
    text_flags(cmd, a.text);
  };

  nsi::AblateArgs ablate;
  std::string ablate_init = nsi::to_string(ablate.config.hyper.init);
  std::string ablate_norm = nsi::to_string(ablate.config.features.norm);
  std::vector<std::string> ablate_modes{"combined", "content_only", "network_only"};
  auto* c_ablate = app.add_subcommand("ablate", "combined vs content-only vs network-only");
  ablate_flags(c_ablate, ablate, ablate_init, ablate_norm);
  c_ablate->add_option("--modes", ablate_modes, "modes to run")->delimiter(',')->capture_default_str();
  c_ablate->add_option("--json", ablate.json, "structured metrics file");
  c_ablate->callback([&] {
    ablate.config.hyper.init = nsi::parse_init(ablate_init);
    ablate.config.features.norm = nsi::parse_column_norm(ablate_norm);
    ablate.config.modes = parse_modes(ablate_modes);
    run = [&] { nsi::cmd_ablate(g, ablate); };
  });

  nsi::SweepArgs sweep;
  std::string sweep_init = nsi::to_string(sweep.base.config.hyper.init);
  std::string sweep_norm = nsi::to_string(sweep.base.config.features.norm);
  auto* c_sweep = app.add_subcommand("sweep", "combined-mode metrics over lambda_s values");
  ablate_flags(c_sweep, sweep.base, sweep_init, sweep_norm);
  c_sweep->add_option("--values", sweep.lambda_s, "comma-separated lambda_s values")->delimiter(',')->required();
  c_sweep->callback([&] {
    sweep.base.config.hyper.init = nsi::parse_init(sweep_init);
    sweep.base.config.features.norm = nsi::parse_column_norm(sweep_norm);
    run = [&] { nsi::cmd_sweep(g, sweep); };
  });

  try {
    app.parse(argc, argv);
    run();
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(nsi::ErrorKind::validation);
  } catch (const nsi::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
