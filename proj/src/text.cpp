#include "nsi/text.hpp"

namespace nsi {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    int extra = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      extra = 1;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      extra = 2;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      extra = 3;
    } else {
      out.push_back(U'\uFFFD');
      ++i;
      continue;
    }
    if (i + static_cast<std::size_t>(extra) >= s.size()) {
      out.push_back(U'\uFFFD');
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      const auto b = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back(U'\uFFFD');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char32_t cp : s) append_utf8(out, cp);
  return out;
}

bool is_space(char32_t cp) {
  return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
         cp == 0x3000;
}

bool is_punctuation(char32_t cp) {
  if (cp < 0x80) return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60) ||
                        (cp >= 0x7B && cp <= 0x7E);
  return (cp >= 0xA1 && cp <= 0xBF && cp != 0xAA && cp != 0xB2 && cp != 0xB3 && cp != 0xB5 && cp != 0xB9 &&
          cp != 0xBA) ||
         cp == 0xD7 || cp == 0xF7 ||                   // multiplication, division signs
         (cp >= 0x2010 && cp <= 0x2027) ||             // dashes, quotes, bullets, ellipsis
         (cp >= 0x2030 && cp <= 0x205E) ||             // per mille, primes, general punctuation
         (cp >= 0x3001 && cp <= 0x3003) ||             // 、。〃
         (cp >= 0x3008 && cp <= 0x3011) ||             // CJK brackets
         (cp >= 0x3014 && cp <= 0x301F) ||             // more CJK brackets, wave dash
         cp == 0x30FB ||                               // katakana middle dot
         (cp >= 0xFE10 && cp <= 0xFE19) ||             // vertical forms
         (cp >= 0xFE30 && cp <= 0xFE4F) ||             // CJK compatibility forms
         (cp >= 0xFE50 && cp <= 0xFE6B) ||             // small form variants
         (cp >= 0xFF01 && cp <= 0xFF0F) ||             // fullwidth ASCII punctuation
         (cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65);
}

bool is_digit(char32_t cp) { return (cp >= U'0' && cp <= U'9') || (cp >= 0xFF10 && cp <= 0xFF19); }

std::vector<std::string> tokenize(std::string_view text) {
  const std::u32string cps = decode_utf8(text);
  std::vector<std::string> tokens;
  std::u32string current;
  const auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(encode_utf8(current));
      current.clear();
    }
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    if (is_space(cp)) {
      flush();
      continue;
    }
    if (is_punctuation(cp)) {
      const bool numeric = !current.empty() && is_digit(current.front()) && is_digit(current.back());
      const bool next_digit = i + 1 < cps.size() && is_digit(cps[i + 1]);
      if (numeric && (cp == U'\'' || cp == U'"')) {
        current.push_back(cp);
        continue;
      }
      if (numeric && next_digit && (cp == U'.' || cp == U',')) {
        current.push_back(cp);
        continue;
      }
      flush();
      tokens.push_back(encode_utf8(std::u32string(1, cp)));
      continue;
    }
    current.push_back(cp);
  }
  flush();
  return tokens;
}

std::vector<std::string> extract_hashtags(std::string_view text) {
  const std::u32string cps = decode_utf8(text);
  std::vector<std::string> tags;
  std::size_t i = 0;
  const auto is_hash = [](char32_t c) { return c == U'#' || c == 0xFF03; };
  while (i < cps.size()) {
    if (!is_hash(cps[i])) {
      ++i;
      continue;
    }
    // Weibo style: #topic#
    std::size_t j = i + 1;
    while (j < cps.size() && !is_hash(cps[j]) && !is_space(cps[j])) ++j;
    if (j < cps.size() && is_hash(cps[j]) && j > i + 1) {
      tags.push_back(encode_utf8(cps.substr(i + 1, j - i - 1)));
      i = j + 1;
      continue;
    }
    // Twitter style: #tag up to whitespace or punctuation
    j = i + 1;
    while (j < cps.size() && !is_space(cps[j]) && !is_punctuation(cps[j])) ++j;
    if (j > i + 1) tags.push_back(encode_utf8(cps.substr(i + 1, j - i - 1)));
    i = j;
  }
  return tags;
}

}  // namespace nsi
