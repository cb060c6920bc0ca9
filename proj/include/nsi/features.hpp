#pragma once

// Tweet records to the m x n feature matrix X (features x tweets).
//
// Feature families: word n-grams (optionally colored by part of speech),
// hashtag presence and count, morphological counts (numbers, question
// marks, exclamation marks, quantifiers), entity counts and tweet length.
// Part-of-speech and entity labels are inputs produced by an Annotator;
// LexiconAnnotator is the word-list fallback.

#include <Eigen/SparseCore>

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace nsi {

enum class EntityKind { name, location, org, time };
inline constexpr std::array<EntityKind, 4> kEntityKinds{EntityKind::name, EntityKind::location, EntityKind::org,
                                                        EntityKind::time};
std::string to_string(EntityKind kind);
/// Accepts NAME/LOCATION/ORG/TIME (case-insensitive); nullopt for "-", "O" or "".
std::optional<EntityKind> parse_entity(const std::string& label);

struct TokenAnnotation {
  std::string pos;
  std::optional<EntityKind> entity;
};

struct TweetRecord {
  std::string tweet_id;
  std::string text;
  std::vector<std::string> tags;
  /// One entry per token of tokenize(text) when present.
  std::optional<std::vector<TokenAnnotation>> annotations;
  /// 0 = negative, 1 = positive, nullopt = unlabeled.
  std::optional<int> label;
};

/// Builds a record, extracting hashtags from the text.
TweetRecord make_record(std::string tweet_id, std::string text, std::optional<int> label = std::nullopt);

class Annotator {
 public:
  virtual ~Annotator() = default;
  virtual std::vector<TokenAnnotation> annotate(std::span<const std::string> tokens) const = 0;
};

/// Word-list annotator: a token -> part-of-speech table (unknown tokens get
/// `default_pos`) and a token -> entity gazetteer.
class LexiconAnnotator final : public Annotator {
 public:
  LexiconAnnotator(std::map<std::string, std::string> pos_lexicon, std::map<std::string, EntityKind> gazetteer,
                   std::string default_pos = "x");

  /// Files: `token<TAB>pos` and `token<TAB>ENTITY`; either path may be empty.
  static LexiconAnnotator load(const std::string& pos_path, const std::string& gazetteer_path);

  std::vector<TokenAnnotation> annotate(std::span<const std::string> tokens) const override;

 private:
  std::map<std::string, std::string> pos_;
  std::map<std::string, EntityKind> gazetteer_;
  std::string default_pos_;
};

/// Fills in annotations for records that have none.
void annotate_missing(std::span<TweetRecord> records, const Annotator& annotator);

/// Built-in quantifier word list (Chinese measure words and a few English ones).
std::set<std::string> default_quantifiers();
std::set<std::string> load_word_list(const std::string& path);

enum class ColumnNorm { none, unit_l2 };
std::string to_string(ColumnNorm norm);
ColumnNorm parse_column_norm(const std::string& s);

struct FeatureConfig {
  int order = 2;  ///< 1 = unigrams, 2 = unigrams + bigrams
  bool pos_colored = false;
  int min_count = 2;  ///< n-grams seen fewer times in training are dropped
  std::size_t max_features = 0;  ///< cap on word n-grams, most frequent kept; 0 = no cap
  bool binary = false;  ///< presence instead of counts
  ColumnNorm norm = ColumnNorm::unit_l2;
  bool tags = true;
  bool morphology = true;
  bool entities = true;
  bool length = true;
  std::set<std::string> quantifiers = default_quantifiers();
};

/// Descriptor text -> value for one tweet.
using FeatureCounts = std::map<std::string, double>;

enum class FeatureKind { word, tag, morph, entity, length };

/// A feature row. Word n-grams read "w1:tok" / "w2:tok1 tok2", with "/POS"
/// appended to each token when POS-colored; the other kinds are fixed names
/// such as "tag:present", "morph:question", "ner:TIME", "len:tokens".
struct FeatureDescriptor {
  FeatureKind kind = FeatureKind::word;
  std::vector<std::string> tokens;
  std::vector<std::string> pos;  ///< empty unless POS-colored
  std::string name;              ///< non-word features

  std::string text() const;
  static FeatureDescriptor parse(const std::string& text);
  friend bool operator==(const FeatureDescriptor&, const FeatureDescriptor&) = default;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  /// Sorts and deduplicates by descriptor text.
  explicit Vocabulary(std::vector<FeatureDescriptor> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<FeatureDescriptor>& entries() const noexcept { return entries_; }
  const FeatureDescriptor& operator[](std::size_t i) const { return entries_[i]; }
  std::optional<std::size_t> find(const std::string& descriptor) const;

 private:
  std::vector<FeatureDescriptor> entries_;
  std::map<std::string, std::size_t> index_;
};

struct FeatureGroups {
  std::vector<std::size_t> group_of;             ///< row -> group id
  std::vector<std::vector<std::size_t>> groups;  ///< group id -> rows (ascending)
  std::vector<std::string> keys;                 ///< group id -> key, sorted

  std::size_t rows() const noexcept { return group_of.size(); }
  /// Every row in exactly one nonempty group.
  bool is_partition() const;
  static FeatureGroups singletons(std::size_t rows);
  static FeatureGroups from_assignment(std::vector<std::size_t> group_of, std::vector<std::string> keys);
};

struct FeatureMatrix {
  Eigen::SparseMatrix<double> X;  ///< m x n, columns in canonical tweet order
  ColumnNorm norm = ColumnNorm::none;
  std::vector<std::string> tweet_ids;
};

/// Unigram and (order 2) bigram counts. Throws ValidationError when
/// pos_colored is requested and the record has no annotations.
FeatureCounts extract_word_features(const TweetRecord& record, int order, bool pos_colored);

struct MorphCounts {
  double numbers = 0;
  double questions = 0;
  double exclamations = 0;
  double quantifiers = 0;
};
MorphCounts extract_morphological(const TweetRecord& record, const std::set<std::string>& quantifier_lexicon);

struct TagNerLength {
  double tag_present = 0;
  double tag_count = 0;
  std::array<double, 4> entities{};  ///< indexed like kEntityKinds
  double length = 0;                 ///< in tokens
};
TagNerLength extract_tag_ner_length(const TweetRecord& record);

/// Every enabled feature of one record.
FeatureCounts extract_features(const TweetRecord& record, const FeatureConfig& config);

/// Training mode (`vocab` empty) builds the vocabulary from the records;
/// inference mode drops features outside `vocab`. Record i must carry
/// `tweet_order[i]` (ValidationError naming the first mismatch otherwise).
struct BuiltFeatures {
  FeatureMatrix matrix;
  Vocabulary vocabulary;
};
BuiltFeatures build_matrix(std::span<const TweetRecord> records, std::span<const std::string> tweet_order,
                           const Vocabulary* vocab, const FeatureConfig& config);

/// Word n-grams grouped by the part of speech of their first token
/// (POS-colored) or by n-gram order; every other feature is a singleton.
FeatureGroups assign_groups(const Vocabulary& vocab);

/// Reorders records to `tweet_order`; ValidationError names the first id
/// with no record.
std::vector<TweetRecord> align_records(std::span<const TweetRecord> records, std::span<const std::string> tweet_order);

}  // namespace nsi
