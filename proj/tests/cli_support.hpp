#pragma once

// Helpers for driving the nsi binary from tests.

#include "nsi/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace cli {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag = "nsi") {
    path = std::filesystem::temp_directory_path() / (tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

/// Runs `NSI_BINARY args` in `dir`, capturing stdout and stderr.
inline Run run(const TempDir& dir, const std::string& args) {
  const auto out = dir.file(".stdout"), err = dir.file(".stderr");
  const std::string cmd = "cd '" + dir.path.string() + "' && '" NSI_BINARY "' " + args + " >'" + out + "' 2>'" + err + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

/// synth -> convert -> laplacian -> train -> predict -> evaluate on a small
/// synthetic set. Returns the first nonzero exit code, or 0.
inline int pipeline(const TempDir& dir, const std::string& seed = "3") {
  const std::string s = "--quiet --seed " + seed + " ";
  for (const auto& args : {s + "synth -o data --tweets 300 --positive-rate 0.3 --content-signal 0.5",
                           s + "convert data/edges.tsv -o graph.mtx",
                           s + "laplacian graph.mtx -o lap.mtx --subset data/train.tsv",
                           s + "train data/train.tsv --laplacian lap.mtx -o model.txt --order 1",
                           s + "predict model.txt data/test.tsv -o pred.tsv",
                           s + "evaluate pred.tsv data/test.tsv -o metrics.tsv --json metrics.json"}) {
    const auto r = run(dir, args);
    if (r.code != 0) return r.code;
  }
  return 0;
}

/// The same pipeline through the library commands.
inline void library_pipeline(const TempDir& dir, std::uint64_t seed = 3) {
  const auto f = [&](const std::string& name) { return dir.file(name); };
  nsi::GlobalOptions g;
  g.seed = seed;
  g.quiet = true;

  nsi::SynthArgs synth;
  synth.out_dir = f("data");
  synth.config.n_tweets = 300;
  synth.config.positive_rate = 0.3;
  synth.config.content_signal = 0.5;
  nsi::cmd_synth(g, synth);
  nsi::cmd_convert(g, {f("data/edges.tsv"), f("graph.mtx")});
  nsi::LaplacianArgs lap;
  lap.graph = f("graph.mtx");
  lap.out = f("lap.mtx");
  lap.subset = f("data/train.tsv");
  nsi::cmd_laplacian(g, lap);
  nsi::TrainArgs train;
  train.records = f("data/train.tsv");
  train.laplacian = f("lap.mtx");
  train.out = f("model.txt");
  train.settings.features.order = 1;
  nsi::cmd_train(g, train);
  nsi::PredictArgs pred;
  pred.model = f("model.txt");
  pred.records = f("data/test.tsv");
  pred.out = f("pred.tsv");
  nsi::cmd_predict(g, pred);
  nsi::EvaluateArgs eval;
  eval.predictions = f("pred.tsv");
  eval.truth = f("data/test.tsv");
  eval.out = f("metrics.tsv");
  eval.json = f("metrics.json");
  nsi::cmd_evaluate(g, eval);
}

inline const char* kPipelineFiles[] = {
    "data/edges.tsv", "data/records.tsv", "data/train.tsv", "data/test.tsv", "data/synth.manifest",
    "graph.mtx",      "graph.mtx.nodes",  "lap.mtx",        "lap.mtx.nodes", "model.txt",
    "model.txt.report", "pred.tsv",       "metrics.tsv",    "metrics.json",  "model.txt.manifest",
    "pred.tsv.manifest", "metrics.tsv.manifest", "lap.mtx.manifest", "graph.mtx.manifest"};

}  // namespace cli
