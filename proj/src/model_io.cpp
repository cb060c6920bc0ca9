#include "nsi/model_io.hpp"

#include "nsi/error.hpp"
#include "nsi/graph_io.hpp"
#include "nsi/records_io.hpp"
#include "nsi/text.hpp"

#include <charconv>
#include <cstdlib>
#include <map>
#include <sstream>

namespace nsi {

namespace {

const char* flag(bool b) { return b ? "true" : "false"; }

class Reader {
 public:
  Reader(const std::string& text, std::string name) : in_(text), name_(std::move(name)) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ValidationError(name_ + ":" + std::to_string(line_no_) + ": " + message);
  }

  double real(std::string_view s) const {
    const std::string copy(s);
    char* end = nullptr;
    const double v = std::strtod(copy.c_str(), &end);
    if (copy.empty() || end != copy.c_str() + copy.size()) fail("not a number: '" + copy + "'");
    return v;
  }

  long long integer(std::string_view s) const {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail("not an integer: '" + std::string(s) + "'");
    return v;
  }

  std::size_t index(std::string_view s) const {
    const auto v = integer(s);
    if (v < 0) fail("negative index");
    return static_cast<std::size_t>(v);
  }

  bool boolean(const std::string& s) const {
    if (s == "true") return true;
    if (s == "false") return false;
    fail("expected true or false: '" + s + "'");
  }

 private:
  std::istringstream in_;
  std::string name_;
  std::size_t line_no_ = 0;
};

}  // namespace

std::string format_model(const Model& model) {
  const auto& h = model.hyper;
  const auto& f = model.features;
  std::ostringstream out;
  out << "nsi-model\t" << kModelVersion << '\n';
  out << "lambda1\t" << format_shortest(h.lambda1) << '\n';
  out << "lambda2\t" << format_shortest(h.lambda2) << '\n';
  out << "lambda_s\t" << format_shortest(h.lambda_s) << '\n';
  out << "epsilon\t" << format_shortest(h.epsilon) << '\n';
  out << "tol\t" << format_shortest(h.tol) << '\n';
  out << "max_iter\t" << h.max_iter << '\n';
  out << "refine_tol\t" << format_shortest(h.refine_tol) << '\n';
  out << "refine_max_iter\t" << h.refine_max_iter << '\n';
  out << "init\t" << to_string(h.init) << '\n';
  out << "damping\t" << format_shortest(model.damping) << '\n';
  out << "transductive\t" << flag(model.transductive) << '\n';
  out << "order\t" << f.order << '\n';
  out << "pos_colored\t" << flag(f.pos_colored) << '\n';
  out << "min_count\t" << f.min_count << '\n';
  out << "max_features\t" << f.max_features << '\n';
  out << "binary\t" << flag(f.binary) << '\n';
  out << "norm\t" << to_string(f.norm) << '\n';
  out << "tags\t" << flag(f.tags) << '\n';
  out << "morphology\t" << flag(f.morphology) << '\n';
  out << "entities\t" << flag(f.entities) << '\n';
  out << "length\t" << flag(f.length) << '\n';
  out << "m\t" << model.W.rows() << '\n';
  out << "n\t" << model.train_size << '\n';
  out << "c\t" << model.W.cols() << '\n';
  out << "class_order";
  for (const auto& c : model.class_order) out << '\t' << c;
  out << '\n';
  for (const auto& q : f.quantifiers) out << "quantifier\t" << q << '\n';
  out << "[vocabulary]\n";
  out << format_vocabulary(model.vocabulary, model.groups);
  out << "[weights]\n";
  for (Eigen::Index i = 0; i < model.W.rows(); ++i)
    for (Eigen::Index j = 0; j < model.W.cols(); ++j) out << i << '\t' << j << '\t' << format_double(model.W(i, j)) << '\n';
  return out.str();
}

Model parse_model(const std::string& text, const std::string& name) {
  Reader r(text, name);
  std::string line;
  if (!r.next(line)) r.fail("empty model file");
  {
    const auto head = split(line, '\t');
    if (head.size() != 2 || head[0] != "nsi-model") r.fail("not a model file");
    if (r.integer(head[1]) != kModelVersion) r.fail("unsupported model version " + std::string(head[1]));
  }

  Model model;
  model.features.quantifiers.clear();
  std::map<std::string, std::string> kv;
  bool have_classes = false;
  while (true) {
    if (!r.next(line)) r.fail("missing [vocabulary] section");
    if (line == "[vocabulary]") break;
    const auto parts = split(line, '\t');
    if (parts.size() < 2) r.fail("expected key<TAB>value");
    const std::string key(parts[0]);
    if (key == "quantifier") {
      model.features.quantifiers.insert(std::string(parts[1]));
    } else if (key == "class_order") {
      model.class_order.assign(parts.begin() + 1, parts.end());
      have_classes = true;
    } else {
      if (parts.size() != 2) r.fail("expected key<TAB>value");
      if (!kv.emplace(key, std::string(parts[1])).second) r.fail("duplicate key " + key);
    }
  }
  const auto take = [&](const char* key) {
    const auto it = kv.find(key);
    if (it == kv.end()) r.fail(std::string("missing key ") + key);
    auto v = it->second;
    kv.erase(it);
    return v;
  };

  auto& h = model.hyper;
  h.lambda1 = r.real(take("lambda1"));
  h.lambda2 = r.real(take("lambda2"));
  h.lambda_s = r.real(take("lambda_s"));
  h.epsilon = r.real(take("epsilon"));
  h.tol = r.real(take("tol"));
  h.max_iter = static_cast<int>(r.integer(take("max_iter")));
  h.refine_tol = r.real(take("refine_tol"));
  h.refine_max_iter = static_cast<int>(r.integer(take("refine_max_iter")));
  h.init = parse_init(take("init"));
  h.validate();
  model.damping = r.real(take("damping"));
  model.transductive = r.boolean(take("transductive"));
  auto& f = model.features;
  f.order = static_cast<int>(r.integer(take("order")));
  f.pos_colored = r.boolean(take("pos_colored"));
  f.min_count = static_cast<int>(r.integer(take("min_count")));
  f.max_features = r.index(take("max_features"));
  f.binary = r.boolean(take("binary"));
  f.norm = parse_column_norm(take("norm"));
  f.tags = r.boolean(take("tags"));
  f.morphology = r.boolean(take("morphology"));
  f.entities = r.boolean(take("entities"));
  f.length = r.boolean(take("length"));
  const auto m = r.index(take("m"));
  model.train_size = r.index(take("n"));
  const auto c = r.index(take("c"));
  if (!kv.empty()) r.fail("unknown key " + kv.begin()->first);
  if (!have_classes) r.fail("missing key class_order");
  if (model.class_order.size() != c) r.fail("class_order does not list c classes");

  std::vector<FeatureDescriptor> entries;
  std::vector<std::size_t> file_groups;
  while (true) {
    if (!r.next(line)) r.fail("missing [weights] section");
    if (line == "[weights]") break;
    const auto parts = split(line, '\t');
    if (parts.size() != 3) r.fail("expected row<TAB>descriptor<TAB>group");
    if (r.index(parts[0]) != entries.size()) r.fail("vocabulary rows out of order");
    entries.push_back(FeatureDescriptor::parse(std::string(parts[1])));
    file_groups.push_back(r.index(parts[2]));
  }
  if (entries.size() != m) r.fail("vocabulary has " + std::to_string(entries.size()) + " rows, m is " + std::to_string(m));
  model.vocabulary = Vocabulary(entries);
  if (model.vocabulary.size() != m) r.fail("duplicate vocabulary entries");
  for (std::size_t i = 0; i < m; ++i)
    if (model.vocabulary[i].text() != entries[i].text()) r.fail("vocabulary is not in canonical order");
  model.groups = assign_groups(model.vocabulary);
  if (model.groups.group_of != file_groups) r.fail("group table disagrees with the vocabulary");

  model.W = WeightMatrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c));
  std::size_t expected = 0;
  while (r.next(line)) {
    const auto parts = split(line, '\t');
    if (parts.size() != 3) r.fail("expected row<TAB>col<TAB>value");
    const auto i = r.index(parts[0]);
    const auto j = r.index(parts[1]);
    if (c == 0 || i * c + j != expected || j >= c) r.fail("weights out of order");
    model.W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r.real(parts[2]);
    ++expected;
  }
  if (expected != m * c) r.fail("weights table has " + std::to_string(expected) + " entries, expected " + std::to_string(m * c));
  return model;
}

void write_model(const std::string& path, const Model& model) { write_text_file(path, format_model(model)); }

Model read_model(const std::string& path) { return parse_model(read_text_file(path), path); }

}  // namespace nsi
