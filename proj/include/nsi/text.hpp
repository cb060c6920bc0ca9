#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nsi {

std::vector<std::string_view> split(std::string_view s, char sep);
std::vector<std::string_view> split_whitespace(std::string_view s);

/// Decodes UTF-8; malformed bytes come back as U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t cp);

bool is_space(char32_t cp);
bool is_punctuation(char32_t cp);
/// ASCII and fullwidth decimal digits.
bool is_digit(char32_t cp);

/// Splits on whitespace and punctuation. Every punctuation code point is
/// kept as its own token. Inside a token that starts with a digit, a
/// following ' or " binds to the number (5'6" stays whole) and . or ,
/// binds when digits sit on both sides (3.5, 1,000).
std::vector<std::string> tokenize(std::string_view text);

/// Hashtags in either #topic# (Weibo) or #tag form, without the marks.
std::vector<std::string> extract_hashtags(std::string_view text);

}  // namespace nsi
