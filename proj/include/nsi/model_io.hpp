#pragma once

// Fitted model files.
//
//   nsi-model<TAB>1
//   key<TAB>value               hyperparameters, feature config, shape
//   quantifier<TAB>word         one line per quantifier word
//   [vocabulary]
//   row<TAB>descriptor<TAB>group
//   [weights]
//   row<TAB>col<TAB>value       dense, %.17g

#include "nsi/features.hpp"
#include "nsi/solver.hpp"

#include <string>
#include <vector>

namespace nsi {

inline constexpr int kModelVersion = 1;

struct Model {
  Hyperparams hyper;
  FeatureConfig features;
  double damping = 0.85;
  bool transductive = false;
  std::size_t train_size = 0;  ///< n
  std::vector<std::string> class_order{"negative", "positive"};
  Vocabulary vocabulary;
  FeatureGroups groups;
  WeightMatrix W;
};

std::string format_model(const Model& model);
/// ValidationError on a bad header, version, shape or group table.
Model parse_model(const std::string& text, const std::string& name = "<model>");

void write_model(const std::string& path, const Model& model);
Model read_model(const std::string& path);

}  // namespace nsi
