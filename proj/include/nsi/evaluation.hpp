#pragma once

// Precision/recall/F1, stratified splits and the three-way ablation
// (combined, content only, network only).

#include "nsi/features.hpp"
#include "nsi/graph_core.hpp"
#include "nsi/solver.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nsi {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept;
};

/// Positive class is 1. Sizes must agree.
ConfusionCounts confusion(std::span<const int> truth, std::span<const int> predicted);

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Zero denominators give 0.
Metrics metrics(const ConfusionCounts& c);
/// F1 as the harmonic mean of a given precision and recall.
Metrics metrics_from(double precision, double recall);

/// Three decimals, as in "%.3f".
std::string format3(double v);

struct Split {
  std::vector<std::size_t> train;  ///< ascending
  std::vector<std::size_t> test;   ///< ascending
};

/// Per class, round(fraction * count) items go to training. Deterministic per
/// seed. ValidationError for a fraction outside (0, 1), a single class, or
/// an empty side.
Split stratified_split(std::span<const int> labels, double fraction, std::uint64_t seed);

/// Fold index per item; every class is dealt round-robin after a seeded shuffle.
std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed);

enum class AblationMode { combined, content_only, network_only };
inline constexpr AblationMode kAllModes[] = {AblationMode::combined, AblationMode::content_only,
                                             AblationMode::network_only};
std::string to_string(AblationMode mode);
AblationMode parse_mode(const std::string& s);

struct AblationConfig {
  std::vector<AblationMode> modes{std::begin(kAllModes), std::end(kAllModes)};
  Hyperparams hyper;
  FeatureConfig features;
  double damping = kDefaultDamping;
  bool transductive = false;
  double train_fraction = 0.8;
  std::uint64_t seed = 1;
  int folds = 0;  ///< >= 2 replaces the single split by k folds with pooled counts
};

/// Labeled tweets with their graph; records[i] belongs to graph.nodes()[i].
struct Dataset {
  TweetGraph graph;
  std::vector<TweetRecord> records;

  /// ValidationError unless records align with the graph and all are labeled.
  std::vector<int> labels() const;
};

struct AblationRow {
  AblationMode mode;
  ConfusionCounts counts;
  Metrics metrics;
};

/// One fitted mode on one split.
struct ModeRun {
  ConfusionCounts counts;
  FitResult fit;
  std::vector<int> predicted;  ///< over split.test
};

ModeRun run_mode(AblationMode mode, const AblationConfig& config, const Dataset& data, const Split& split);

std::vector<AblationRow> run_ablation(const AblationConfig& config, const Dataset& data);

/// `mode<TAB>f1<TAB>precision<TAB>recall` with a header line.
std::string format_table(const std::vector<AblationRow>& rows);
/// Structured form of the same rows, including the raw counts.
std::string format_json(const std::vector<AblationRow>& rows);

}  // namespace nsi
