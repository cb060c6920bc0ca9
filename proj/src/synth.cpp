#include "nsi/synth.hpp"

#include "nsi/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace nsi {

void SynthConfig::validate() const {
  const auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(p_intra) || !prob(p_inter)) throw ValidationError("edge probabilities must lie in [0, 1]");
  if (!(p_intra > p_inter)) throw ValidationError("p_intra must exceed p_inter");
  if (!(positive_rate > 0.0 && positive_rate < 1.0)) throw ValidationError("positive_rate must lie in (0, 1)");
  if (!prob(homophily) || homophily == 1.0) throw ValidationError("homophily must lie in [0, 1)");
  if (!prob(mention_rate)) throw ValidationError("mention_rate must lie in [0, 1]");
  if (!prob(content_signal)) throw ValidationError("content_signal must lie in [0, 1]");
  if (n_communities < 2) throw ValidationError("need at least two communities");
  if (n_users < 0 || (n_users == 0 && n_tweets < 1)) throw ValidationError("need a positive user or tweet count");
  if (n_users != 0 && n_users < n_communities) throw ValidationError("fewer users than communities");
  if (vocab_size < 2) throw ValidationError("vocabulary needs at least two words");
  if (min_length < 1 || max_length < min_length) throw ValidationError("bad tweet length range");
}

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
}

std::vector<int> community_sizes(int n_users, int k, double positive_fraction) {
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  sizes[0] = std::clamp(static_cast<int>(std::lround(positive_fraction * n_users)), 1, n_users - (k - 1));
  const int rest = n_users - sizes[0];
  for (int c = 1; c < k; ++c) sizes[static_cast<std::size_t>(c)] = rest / (k - 1) + (c - 1 < rest % (k - 1) ? 1 : 0);
  return sizes;
}

struct Expected {
  double tweets = 0.0;
  double positive_share = 0.0;  ///< share of tweets authored in community 0
};

Expected expected_tweets(const std::vector<double>& sizes, double p_intra, double p_inter) {
  double total_users = 0.0;
  for (const double s : sizes) total_users += s;
  Expected e;
  double first = 0.0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    const double s = sizes[c];
    const double t = s * std::max(s - 1.0, 0.0) * p_intra + s * (total_users - s) * p_inter;
    e.tweets += t;
    if (c == 0) first = t;
  }
  e.positive_share = e.tweets > 0.0 ? first / e.tweets : 0.0;
  return e;
}

std::vector<double> fractional_sizes(double n_users, int k, double a) {
  std::vector<double> sizes(static_cast<std::size_t>(k), n_users * (1.0 - a) / (k - 1));
  sizes[0] = n_users * a;
  return sizes;
}

// Fraction of users in community 0 whose expected tweet share equals the
// positive rate.
double positive_fraction(const SynthConfig& c) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto e = expected_tweets(fractional_sizes(1000.0, c.n_communities, mid), c.p_intra, c.p_inter);
    (e.positive_share < c.positive_rate ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string padded(char prefix, std::size_t i, int width) {
  auto num = std::to_string(i);
  if (static_cast<int>(num.size()) < width) num.insert(0, static_cast<std::size_t>(width) - num.size(), '0');
  return prefix + num;
}

int digits(std::size_t n) { return n < 10 ? 1 : 1 + digits(n / 10); }

}  // namespace

int auto_user_count(const SynthConfig& config) {
  config.validate();
  if (config.n_users > 0) return config.n_users;
  const double a = positive_fraction(config);
  const double target = config.n_tweets;
  int best = config.n_communities;
  double best_gap = std::abs(expected_tweets(fractional_sizes(best, config.n_communities, a), config.p_intra,
                                             config.p_inter).tweets - target);
  for (int n = config.n_communities + 1; n <= 1000000; ++n) {
    const double t = expected_tweets(fractional_sizes(n, config.n_communities, a), config.p_intra, config.p_inter).tweets;
    const double gap = std::abs(t - target);
    if (gap < best_gap) {
      best = n;
      best_gap = gap;
    }
    if (t > target) break;
  }
  return best;
}

std::vector<int> SynthData::labels() const {
  std::vector<int> y;
  y.reserve(records.size());
  for (const auto& r : records) y.push_back(*r.label);
  return y;
}

SynthData generate(const SynthConfig& config) {
  config.validate();
  SynthData out;
  out.n_users = auto_user_count(config);
  out.positive_share = positive_fraction(config);
  const auto sizes = community_sizes(out.n_users, config.n_communities, out.positive_share);
  {
    std::vector<double> fs(sizes.begin(), sizes.end());
    if (expected_tweets(fs, config.p_intra, config.p_inter).tweets <= 0.0)
      throw ValidationError("configuration yields no expected interactions");
  }

  const int user_width = digits(static_cast<std::size_t>(out.n_users));
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    for (int i = 0; i < sizes[c]; ++i) {
      out.community.push_back(static_cast<int>(c));
      out.user_ids.push_back(padded('u', out.user_ids.size(), user_width));
    }
  }

  std::mt19937_64 rng(config.seed);
  struct Pair {
    std::size_t src, dst;
  };
  std::vector<Pair> pairs;
  const auto n = static_cast<std::size_t>(out.n_users);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v) continue;
      const double p = out.community[u] == out.community[v] ? config.p_intra : config.p_inter;
      if (uniform01(rng) < p) pairs.push_back({u, v});
    }
  }
  if (pairs.empty()) throw ValidationError("no interactions were drawn; raise p_intra or the user count");

  const double h = config.homophily;
  std::size_t authored = 0;
  for (const auto& p : pairs) authored += out.community[p.src] == 0;
  const double share = static_cast<double>(authored) / static_cast<double>(pairs.size());
  const double background = std::clamp((config.positive_rate - h * share) / (1.0 - h), 0.0, 1.0);
  const auto v = static_cast<std::size_t>(config.vocab_size);
  const std::size_t half = v / 2;
  const int tweet_width = digits(pairs.size());
  const int word_width = digits(v);

  for (std::size_t t = 0; t < pairs.size(); ++t) {
    const auto [src, dst] = pairs[t];
    const int label = uniform01(rng) < h ? (out.community[src] == 0 ? 1 : 0) : (uniform01(rng) < background ? 1 : 0);
    const int length =
        config.min_length + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(config.max_length - config.min_length + 1)));
    std::string text;
    const bool mention = uniform01(rng) < config.mention_rate;
    for (int k = 0; k < length; ++k) {
      std::size_t word;
      if (uniform01(rng) < config.content_signal) {
        word = label == 1 ? uniform_index(rng, half) : half + uniform_index(rng, v - half);
      } else {
        word = uniform_index(rng, v);
      }
      if (k) text.push_back(' ');
      text += padded('w', word, word_width);
    }
    if (mention) text += " @" + out.user_ids[dst];
    const auto id = padded('t', t, tweet_width);
    out.users.add({out.user_ids[src], out.user_ids[dst], id, 1.0});
    out.records.push_back(make_record(id, std::move(text), label));
  }
  return out;
}

double mean_interactions(const TweetGraph& h) {
  if (h.size() == 0) return 0.0;
  return static_cast<double>(h.adjacency().nonZeros()) / static_cast<double>(h.size());
}

}  // namespace nsi
