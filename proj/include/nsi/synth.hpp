#pragma once

// Synthetic networked tweets with planted label communities.
//
// Users fall into communities; community 0 is the positive one and is sized
// so that its share of tweets matches the positive rate. Each ordered user
// pair carries an interaction (a tweet) with probability p_intra inside a
// community and p_inter across. A tweet takes its author's community label
// with probability `homophily` and a background label otherwise, the
// background rate chosen so the overall rate stays at positive_rate.
//
// Words come from a vocabulary split into a positive half and a negative
// half: with probability content_signal a word is drawn from the half of
// the tweet's class, otherwise uniformly from the whole vocabulary. With
// probability mention_rate the tweet also names the user it answers or
// retweets, as replies and retweets do ("@user").

#include "nsi/features.hpp"
#include "nsi/graph_core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nsi {

struct SynthConfig {
  int n_users = 0;  ///< 0 chooses the count whose expected tweet total is n_tweets
  int n_tweets = 2000;
  int n_communities = 2;
  double p_intra = 0.05;
  double p_inter = 0.005;
  double positive_rate = 0.099;
  double homophily = 0.9;
  double content_signal = 0.3;
  int vocab_size = 600;
  int min_length = 8;
  int max_length = 16;
  double mention_rate = 0.0;  ///< chance a tweet names the user it replies to or retweets ("@user")
  std::uint64_t seed = 1;

  /// ValidationError on out-of-range values.
  void validate() const;
};

struct SynthData {
  UserGraph users;
  std::vector<TweetRecord> records;  ///< sorted by tweet id, all labeled
  std::vector<int> community;        ///< per user, indexed like user_ids
  std::vector<std::string> user_ids;
  int n_users = 0;
  double positive_share = 0.0;  ///< fraction of users in community 0

  std::vector<int> labels() const;
};

/// Deterministic per seed. ValidationError when no interaction is expected
/// or none was drawn.
SynthData generate(const SynthConfig& config);

/// Mean number of other tweets sharing a user with a tweet (line-graph degree).
double mean_interactions(const TweetGraph& h);

/// Users needed for an expected tweet count of `config.n_tweets`.
int auto_user_count(const SynthConfig& config);

}  // namespace nsi
