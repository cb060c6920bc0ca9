#pragma once

// Text formats for tweet records.
//
//   records      tweet_id<TAB>label<TAB>text, label 0, 1 or "?"
//   annotations  tweet_id<TAB>token_index<TAB>pos<TAB>entity, entity "-" for none
//   vocabulary   row<TAB>descriptor<TAB>group_id

#include "nsi/features.hpp"

#include <string>
#include <vector>

namespace nsi {

std::vector<TweetRecord> read_records(const std::string& path);
void write_records(const std::string& path, const std::vector<TweetRecord>& records);

/// Attaches sidecar annotations. Tokens of an annotated tweet that the
/// sidecar skips get pos UNK and no entity; tweets absent from the sidecar
/// keep their annotations as-is.
void read_annotations(const std::string& path, std::vector<TweetRecord>& records);
void write_annotations(const std::string& path, const std::vector<TweetRecord>& records);

void write_vocabulary(const std::string& path, const Vocabulary& vocab, const FeatureGroups& groups);
std::string format_vocabulary(const Vocabulary& vocab, const FeatureGroups& groups);

}  // namespace nsi
