#pragma once

// The command suite behind the `nsi` tool. Every command reads files, writes
// its outputs plus one run manifest, and raises nsi::Error subclasses whose
// exit_code() the tool returns.
//
//   convert    edge list -> tweet graph
//   laplacian  tweet graph -> Laplacian over its (optionally restricted) nodes
//   train      records + graph or Laplacian -> model file and fit report
//   predict    model + records -> tweet_id<TAB>class<TAB>score0<TAB>score1
//   evaluate   predictions + labeled records -> metrics table
//   synth      synthetic dataset directory
//   ablate     combined / content-only / network-only table
//   sweep      combined-mode metrics over a list of lambda_s values

#include "nsi/evaluation.hpp"
#include "nsi/graph_core.hpp"
#include "nsi/model_io.hpp"
#include "nsi/synth.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nsi {

struct GlobalOptions {
  std::uint64_t seed = 1;
  bool quiet = false;
  std::string manifest_dir;  ///< empty: manifest next to the primary output
};

/// Optional annotation inputs shared by the commands that build features.
struct TextInputs {
  std::string annotations;  ///< sidecar file, see records_io.hpp
  std::string pos_lexicon;
  std::string gazetteer;
  std::string quantifiers;  ///< word list replacing the built-in one
};

struct TrainSettings {
  Hyperparams hyper;
  FeatureConfig features;
  double damping = kDefaultDamping;
  bool transductive = false;
};

struct TrainResult {
  Model model;
  FitReport report;
};

/// Fits on the labeled records. The graph penalty runs over `graph_nodes`
/// (each needs a record) with Laplacian `L`.
TrainResult train_model(const std::vector<TweetRecord>& records, const std::vector<std::string>& graph_nodes,
                        const Eigen::MatrixXd& L, const TrainSettings& settings);

/// Nodes the penalty covers when training from a tweet graph: the labeled
/// tweets in the graph, or every graph node when transductive.
std::vector<std::string> penalty_nodes(const TweetGraph& graph, const std::vector<TweetRecord>& records,
                                       bool transductive);

struct Prediction {
  std::string tweet_id;
  int label = 0;
  Eigen::VectorXd scores;
};
std::vector<Prediction> predict_records(const Model& model, const std::vector<TweetRecord>& records);
std::string format_predictions(const std::vector<Prediction>& predictions);

std::string format_report(const FitReport& report);

/// Loads records with their annotations applied.
std::vector<TweetRecord> load_records(const std::string& path, const TextInputs& text);

struct ConvertArgs {
  std::string edges;
  std::string out;
};
void cmd_convert(const GlobalOptions& g, const ConvertArgs& a);

struct LaplacianArgs {
  std::string graph;
  std::string out;
  double damping = kDefaultDamping;
  std::string subset;  ///< records file; restricts to its labeled tweets
};
void cmd_laplacian(const GlobalOptions& g, const LaplacianArgs& a);

struct TrainArgs {
  std::string records;
  std::string graph;      ///< one of graph / laplacian unless lambda_s == 0
  std::string laplacian;
  std::string out;
  std::string report;  ///< empty: <out>.report
  TrainSettings settings;
  TextInputs text;
};
void cmd_train(const GlobalOptions& g, const TrainArgs& a);

struct PredictArgs {
  std::string model;
  std::string records;
  std::string out;
  TextInputs text;
};
void cmd_predict(const GlobalOptions& g, const PredictArgs& a);

struct EvaluateArgs {
  std::string predictions;
  std::string truth;
  std::string out;
  std::string json;
};
void cmd_evaluate(const GlobalOptions& g, const EvaluateArgs& a);

struct SynthArgs {
  SynthConfig config;  ///< seed taken from GlobalOptions
  double train_fraction = 0.8;
  std::string out_dir;
};
void cmd_synth(const GlobalOptions& g, const SynthArgs& a);

struct AblateArgs {
  std::string records;
  std::string graph;  ///< tweet graph file, or
  std::string edges;  ///< edge list converted on the fly
  std::string out;
  std::string json;
  AblationConfig config;  ///< seed taken from GlobalOptions
  TextInputs text;
};
void cmd_ablate(const GlobalOptions& g, const AblateArgs& a);

struct SweepArgs {
  AblateArgs base;
  std::vector<double> lambda_s;
};
void cmd_sweep(const GlobalOptions& g, const SweepArgs& a);

}  // namespace nsi
