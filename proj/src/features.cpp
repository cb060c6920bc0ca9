#include "nsi/features.hpp"

#include "nsi/error.hpp"
#include "nsi/graph_io.hpp"
#include "nsi/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace nsi {

std::string to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::name: return "NAME";
    case EntityKind::location: return "LOCATION";
    case EntityKind::org: return "ORG";
    case EntityKind::time: return "TIME";
  }
  return "?";
}

std::optional<EntityKind> parse_entity(const std::string& label) {
  std::string up;
  for (const char c : label) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (up.empty() || up == "-" || up == "O") return std::nullopt;
  for (const auto kind : kEntityKinds) {
    if (to_string(kind) == up) return kind;
  }
  throw ValidationError("unknown entity label '" + label + "'");
}

TweetRecord make_record(std::string tweet_id, std::string text, std::optional<int> label) {
  TweetRecord r;
  r.tweet_id = std::move(tweet_id);
  r.tags = extract_hashtags(text);
  r.text = std::move(text);
  r.label = label;
  return r;
}

LexiconAnnotator::LexiconAnnotator(std::map<std::string, std::string> pos_lexicon,
                                   std::map<std::string, EntityKind> gazetteer, std::string default_pos)
    : pos_(std::move(pos_lexicon)), gazetteer_(std::move(gazetteer)), default_pos_(std::move(default_pos)) {}

LexiconAnnotator LexiconAnnotator::load(const std::string& pos_path, const std::string& gazetteer_path) {
  std::map<std::string, std::string> pos;
  std::map<std::string, EntityKind> gaz;
  const auto read_pairs = [](const std::string& path, auto&& sink) {
    std::istringstream in(read_text_file(path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      const auto f = split(line, '\t');
      if (f.size() != 2) throw parse_error(path, lineno, "expected token<TAB>label");
      sink(std::string(f[0]), std::string(f[1]));
    }
  };
  if (!pos_path.empty()) read_pairs(pos_path, [&](std::string tok, std::string tag) { pos[tok] = tag; });
  if (!gazetteer_path.empty()) {
    read_pairs(gazetteer_path, [&](std::string tok, std::string label) {
      if (const auto kind = parse_entity(label)) gaz[tok] = *kind;
    });
  }
  return LexiconAnnotator(std::move(pos), std::move(gaz));
}

std::vector<TokenAnnotation> LexiconAnnotator::annotate(std::span<const std::string> tokens) const {
  std::vector<TokenAnnotation> out;
  out.reserve(tokens.size());
  for (const auto& tok : tokens) {
    TokenAnnotation a;
    const auto p = pos_.find(tok);
    a.pos = p == pos_.end() ? default_pos_ : p->second;
    if (const auto g = gazetteer_.find(tok); g != gazetteer_.end()) a.entity = g->second;
    out.push_back(std::move(a));
  }
  return out;
}

void annotate_missing(std::span<TweetRecord> records, const Annotator& annotator) {
  for (auto& r : records) {
    if (!r.annotations) r.annotations = annotator.annotate(tokenize(r.text));
  }
}

std::set<std::string> default_quantifiers() {
  return {"个", "名", "位", "岁", "只", "件", "条", "张", "次", "米", "厘米", "公斤", "斤", "元", "天", "年", "月",
          "several", "many", "few", "dozen", "hundred", "thousand", "some"};
}

std::set<std::string> load_word_list(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() != '#') words.insert(line);
  }
  return words;
}

std::string to_string(ColumnNorm norm) { return norm == ColumnNorm::unit_l2 ? "unit-l2" : "none"; }

ColumnNorm parse_column_norm(const std::string& s) {
  if (s == "unit-l2") return ColumnNorm::unit_l2;
  if (s == "none") return ColumnNorm::none;
  throw ValidationError("unknown column normalization '" + s + "'");
}

// ---------------------------------------------------------------------------
// descriptors

namespace {

constexpr const char* kTagPresent = "tag:present";
constexpr const char* kTagCount = "tag:count";
constexpr const char* kMorphNumber = "morph:number";
constexpr const char* kMorphQuestion = "morph:question";
constexpr const char* kMorphExclamation = "morph:exclamation";
constexpr const char* kMorphQuantifier = "morph:quantifier";
constexpr const char* kLength = "len:tokens";

std::string entity_feature(EntityKind kind) { return "ner:" + to_string(kind); }

std::string word_unit(const std::string& token, const std::string* pos) {
  return pos ? token + "/" + *pos : token;
}

void check_pos_label(const std::string& pos) {
  if (pos.empty() || pos.find_first_of("/ \t\n") != std::string::npos)
    throw ValidationError("part-of-speech label '" + pos + "' must be nonempty without '/' or whitespace");
}

}  // namespace

std::string FeatureDescriptor::text() const {
  if (kind != FeatureKind::word) return name;
  std::string out = "w" + std::to_string(tokens.size()) + ":";
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += word_unit(tokens[i], pos.empty() ? nullptr : &pos[i]);
  }
  return out;
}

FeatureDescriptor FeatureDescriptor::parse(const std::string& text) {
  FeatureDescriptor d;
  const auto starts = [&](const char* p) { return text.rfind(p, 0) == 0; };
  if (starts("tag:")) d.kind = FeatureKind::tag;
  else if (starts("morph:")) d.kind = FeatureKind::morph;
  else if (starts("ner:")) d.kind = FeatureKind::entity;
  else if (starts("len:")) d.kind = FeatureKind::length;
  else if (text.size() > 3 && text[0] == 'w' && (text[1] == '1' || text[1] == '2') && text[2] == ':') {
    d.kind = FeatureKind::word;
    const auto units = split(std::string_view(text).substr(3), ' ');
    bool colored = false;
    for (std::size_t i = 0; i < units.size(); ++i) {
      const auto slash = units[i].rfind('/');
      const bool has_pos = slash != std::string_view::npos && slash + 1 < units[i].size();
      if (i == 0) colored = has_pos;
      if (has_pos != colored) throw ValidationError("malformed word feature '" + text + "'");
      if (has_pos) {
        d.tokens.emplace_back(units[i].substr(0, slash));
        d.pos.emplace_back(units[i].substr(slash + 1));
      } else {
        d.tokens.emplace_back(units[i]);
      }
    }
    if (d.tokens.size() != static_cast<std::size_t>(text[1] - '0') ||
        std::any_of(d.tokens.begin(), d.tokens.end(), [](const std::string& t) { return t.empty(); }))
      throw ValidationError("malformed word feature '" + text + "'");
    return d;
  } else {
    throw ValidationError("unknown feature descriptor '" + text + "'");
  }
  d.name = text;
  return d;
}

Vocabulary::Vocabulary(std::vector<FeatureDescriptor> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const FeatureDescriptor& a, const FeatureDescriptor& b) { return a.text() < b.text(); });
  for (auto& e : entries) {
    auto key = e.text();
    if (index_.emplace(key, entries_.size()).second) entries_.push_back(std::move(e));
  }
}

std::optional<std::size_t> Vocabulary::find(const std::string& descriptor) const {
  const auto it = index_.find(descriptor);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// groups

bool FeatureGroups::is_partition() const {
  std::vector<int> seen(group_of.size(), 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) return false;
    for (const auto row : groups[g]) {
      if (row >= seen.size() || group_of[row] != g) return false;
      ++seen[row];
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

FeatureGroups FeatureGroups::singletons(std::size_t rows) {
  std::vector<std::size_t> group_of(rows);
  std::vector<std::string> keys(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    group_of[i] = i;
    keys[i] = std::to_string(i);
  }
  return from_assignment(std::move(group_of), std::move(keys));
}

FeatureGroups FeatureGroups::from_assignment(std::vector<std::size_t> group_of, std::vector<std::string> keys) {
  FeatureGroups g;
  g.groups.resize(keys.size());
  for (std::size_t row = 0; row < group_of.size(); ++row) {
    if (group_of[row] >= keys.size()) throw ValidationError("group id out of range");
    g.groups[group_of[row]].push_back(row);
  }
  g.group_of = std::move(group_of);
  g.keys = std::move(keys);
  if (!g.is_partition()) throw ValidationError("feature groups do not partition the rows (empty group)");
  return g;
}

FeatureGroups assign_groups(const Vocabulary& vocab) {
  std::vector<std::string> row_keys;
  row_keys.reserve(vocab.size());
  for (const auto& d : vocab.entries()) {
    if (d.kind != FeatureKind::word) row_keys.push_back(d.text());
    else if (!d.pos.empty()) row_keys.push_back("pos:" + d.pos.front());
    else row_keys.push_back("order:" + std::to_string(d.tokens.size()));
  }
  std::vector<std::string> keys = row_keys;
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::vector<std::size_t> group_of;
  group_of.reserve(row_keys.size());
  for (const auto& k : row_keys)
    group_of.push_back(static_cast<std::size_t>(std::lower_bound(keys.begin(), keys.end(), k) - keys.begin()));
  return FeatureGroups::from_assignment(std::move(group_of), std::move(keys));
}

// ---------------------------------------------------------------------------
// extraction

FeatureCounts extract_word_features(const TweetRecord& record, int order, bool pos_colored) {
  if (order != 1 && order != 2) throw ValidationError("n-gram order must be 1 or 2");
  const auto tokens = tokenize(record.text);
  const std::vector<TokenAnnotation>* ann = nullptr;
  if (pos_colored) {
    if (!record.annotations) throw ValidationError("POS-colored features need annotations for tweet " + record.tweet_id);
    ann = &*record.annotations;
    if (ann->size() != tokens.size())
      throw ValidationError("tweet " + record.tweet_id + " has " + std::to_string(ann->size()) +
                            " annotations for " + std::to_string(tokens.size()) + " tokens");
    for (const auto& a : *ann) check_pos_label(a.pos);
  }
  const auto unit = [&](std::size_t i) { return word_unit(tokens[i], ann ? &(*ann)[i].pos : nullptr); };

  FeatureCounts counts;
  for (std::size_t i = 0; i < tokens.size(); ++i) counts["w1:" + unit(i)] += 1.0;
  if (order == 2) {
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) counts["w2:" + unit(i) + " " + unit(i + 1)] += 1.0;
  }
  return counts;
}

MorphCounts extract_morphological(const TweetRecord& record, const std::set<std::string>& quantifier_lexicon) {
  MorphCounts m;
  for (const auto& tok : tokenize(record.text)) {
    const auto cps = decode_utf8(tok);
    if (!cps.empty() && is_digit(cps.front())) m.numbers += 1;
    if (quantifier_lexicon.count(tok)) m.quantifiers += 1;
    for (const char32_t cp : cps) {
      if (cp == U'?' || cp == 0xFF1F) m.questions += 1;
      if (cp == U'!' || cp == 0xFF01) m.exclamations += 1;
    }
  }
  return m;
}

TagNerLength extract_tag_ner_length(const TweetRecord& record) {
  TagNerLength t;
  t.tag_count = static_cast<double>(record.tags.size());
  t.tag_present = record.tags.empty() ? 0.0 : 1.0;
  if (record.annotations) {
    for (const auto& a : *record.annotations) {
      if (a.entity) t.entities[static_cast<std::size_t>(*a.entity)] += 1;
    }
  }
  t.length = static_cast<double>(tokenize(record.text).size());
  return t;
}

namespace {

std::vector<std::string> fixed_features(const FeatureConfig& config) {
  std::vector<std::string> names;
  if (config.tags) {
    names.push_back(kTagPresent);
    names.push_back(kTagCount);
  }
  if (config.morphology) {
    names.push_back(kMorphNumber);
    names.push_back(kMorphQuestion);
    names.push_back(kMorphExclamation);
    names.push_back(kMorphQuantifier);
  }
  if (config.entities) {
    for (const auto kind : kEntityKinds) names.push_back(entity_feature(kind));
  }
  if (config.length) names.push_back(kLength);
  return names;
}

}  // namespace

FeatureCounts extract_features(const TweetRecord& record, const FeatureConfig& config) {
  FeatureCounts counts = extract_word_features(record, config.order, config.pos_colored);
  const auto put = [&](const std::string& key, double v) {
    if (v != 0.0) counts[key] = v;
  };
  if (config.tags || config.entities || config.length) {
    const auto t = extract_tag_ner_length(record);
    if (config.tags) {
      put(kTagPresent, t.tag_present);
      put(kTagCount, t.tag_count);
    }
    if (config.entities) {
      for (const auto kind : kEntityKinds) put(entity_feature(kind), t.entities[static_cast<std::size_t>(kind)]);
    }
    if (config.length) put(kLength, t.length);
  }
  if (config.morphology) {
    const auto m = extract_morphological(record, config.quantifiers);
    put(kMorphNumber, m.numbers);
    put(kMorphQuestion, m.questions);
    put(kMorphExclamation, m.exclamations);
    put(kMorphQuantifier, m.quantifiers);
  }
  if (config.binary) {
    for (auto& [key, v] : counts) v = v > 0.0 ? 1.0 : 0.0;
  }
  return counts;
}

BuiltFeatures build_matrix(std::span<const TweetRecord> records, std::span<const std::string> tweet_order,
                           const Vocabulary* vocab, const FeatureConfig& config) {
  if (records.size() != tweet_order.size())
    throw ValidationError("have " + std::to_string(records.size()) + " records for " +
                          std::to_string(tweet_order.size()) + " tweets");
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].tweet_id != tweet_order[i])
      throw ValidationError("record order mismatch at position " + std::to_string(i) + ": got " +
                            records[i].tweet_id + ", expected " + tweet_order[i]);
  }

  std::vector<FeatureCounts> per_tweet;
  per_tweet.reserve(records.size());
  for (const auto& r : records) per_tweet.push_back(extract_features(r, config));

  BuiltFeatures out;
  if (vocab) {
    out.vocabulary = *vocab;
  } else {
    std::map<std::string, double> totals;
    for (const auto& counts : per_tweet) {
      for (const auto& [key, v] : counts) {
        if (key.front() == 'w') totals[key] += v;
      }
    }
    std::vector<std::pair<double, std::string>> kept;
    for (const auto& [key, total] : totals) {
      if (total >= static_cast<double>(config.min_count)) kept.emplace_back(total, key);
    }
    if (config.max_features > 0 && kept.size() > config.max_features) {
      // Most frequent first; ties keep the smaller descriptor.
      std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      kept.resize(config.max_features);
    }
    std::vector<FeatureDescriptor> entries;
    for (const auto& k : kept) entries.push_back(FeatureDescriptor::parse(k.second));
    for (const auto& name : fixed_features(config)) entries.push_back(FeatureDescriptor::parse(name));
    out.vocabulary = Vocabulary(std::move(entries));
  }

  const auto m = static_cast<Eigen::Index>(out.vocabulary.size());
  const auto n = static_cast<Eigen::Index>(records.size());
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (const auto& [key, v] : per_tweet[static_cast<std::size_t>(j)]) {
      if (const auto row = out.vocabulary.find(key)) triplets.emplace_back(static_cast<Eigen::Index>(*row), j, v);
    }
  }
  auto& fm = out.matrix;
  fm.X.resize(m, n);
  fm.X.setFromTriplets(triplets.begin(), triplets.end());
  fm.X.makeCompressed();
  fm.norm = config.norm;
  fm.tweet_ids.assign(tweet_order.begin(), tweet_order.end());
  if (config.norm == ColumnNorm::unit_l2) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double norm = fm.X.col(j).norm();
      if (norm > 0.0) fm.X.col(j) /= norm;
    }
  }
  return out;
}

std::vector<TweetRecord> align_records(std::span<const TweetRecord> records, std::span<const std::string> tweet_order) {
  std::map<std::string, const TweetRecord*> by_id;
  for (const auto& r : records) {
    if (!by_id.emplace(r.tweet_id, &r).second) throw ValidationError("duplicate record for tweet " + r.tweet_id);
  }
  std::vector<TweetRecord> out;
  out.reserve(tweet_order.size());
  for (const auto& id : tweet_order) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw ValidationError("no record for tweet " + id);
    out.push_back(*it->second);
  }
  return out;
}

}  // namespace nsi
