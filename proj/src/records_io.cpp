#include "nsi/records_io.hpp"

#include "nsi/error.hpp"
#include "nsi/graph_io.hpp"
#include "nsi/text.hpp"

#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace nsi {

namespace {

template <class Fn>
void for_each_line(const std::string& path, Fn&& fn) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    fn(line, lineno);
  }
}

}  // namespace

std::vector<TweetRecord> read_records(const std::string& path) {
  std::vector<TweetRecord> records;
  std::set<std::string> seen;
  for_each_line(path, [&](const std::string& line, std::size_t lineno) {
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) throw parse_error(path, lineno, "expected tweet_id<TAB>label<TAB>text");
    std::string id = line.substr(0, tab1);
    const std::string label = line.substr(tab1 + 1, tab2 - tab1 - 1);
    if (id.empty()) throw parse_error(path, lineno, "empty tweet id");
    std::optional<int> y;
    if (label == "0" || label == "1") y = label[0] - '0';
    else if (label != "?") throw parse_error(path, lineno, "label must be 0, 1 or ?, got '" + label + "'");
    if (!seen.insert(id).second) throw ValidationError(path + ":" + std::to_string(lineno) + ": duplicate tweet id: " + id);
    records.push_back(make_record(std::move(id), line.substr(tab2 + 1), y));
  });
  return records;
}

void write_records(const std::string& path, const std::vector<TweetRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) {
    out << r.tweet_id << '\t' << (r.label ? std::to_string(*r.label) : "?") << '\t' << r.text << '\n';
  }
  write_text_file(path, out.str());
}

void read_annotations(const std::string& path, std::vector<TweetRecord>& records) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) index[records[i].tweet_id] = i;
  std::map<std::size_t, std::map<std::size_t, TokenAnnotation>> found;
  for_each_line(path, [&](const std::string& line, std::size_t lineno) {
    const auto f = split(line, '\t');
    if (f.size() != 4) throw parse_error(path, lineno, "expected tweet_id<TAB>token_index<TAB>pos<TAB>entity");
    const auto it = index.find(std::string(f[0]));
    if (it == index.end()) throw parse_error(path, lineno, "unknown tweet id " + std::string(f[0]));
    std::size_t tok = 0;
    const auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), tok);
    if (ec != std::errc() || ptr != f[1].data() + f[1].size())
      throw parse_error(path, lineno, "bad token index '" + std::string(f[1]) + "'");
    TokenAnnotation a{std::string(f[2]), std::nullopt};
    try {
      a.entity = parse_entity(std::string(f[3]));
    } catch (const ValidationError& e) {
      throw parse_error(path, lineno, e.what());
    }
    if (!found[it->second].emplace(tok, std::move(a)).second)
      throw parse_error(path, lineno, "token annotated twice");
  });
  for (auto& [row, tokens] : found) {
    auto& r = records[row];
    const auto n = tokenize(r.text).size();
    std::vector<TokenAnnotation> ann(n, TokenAnnotation{"UNK", std::nullopt});
    for (auto& [i, a] : tokens) {
      if (i >= n)
        throw ValidationError(path + ": token index " + std::to_string(i) + " out of range for tweet " + r.tweet_id);
      ann[i] = std::move(a);
    }
    r.annotations = std::move(ann);
  }
}

void write_annotations(const std::string& path, const std::vector<TweetRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) {
    if (!r.annotations) continue;
    for (std::size_t i = 0; i < r.annotations->size(); ++i) {
      const auto& a = (*r.annotations)[i];
      out << r.tweet_id << '\t' << i << '\t' << a.pos << '\t' << (a.entity ? to_string(*a.entity) : "-") << '\n';
    }
  }
  write_text_file(path, out.str());
}

std::string format_vocabulary(const Vocabulary& vocab, const FeatureGroups& groups) {
  std::ostringstream out;
  for (std::size_t i = 0; i < vocab.size(); ++i) out << i << '\t' << vocab[i].text() << '\t' << groups.group_of[i] << '\n';
  return out.str();
}

void write_vocabulary(const std::string& path, const Vocabulary& vocab, const FeatureGroups& groups) {
  write_text_file(path, format_vocabulary(vocab, groups));
}

}  // namespace nsi
