#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace misinfo::unicode {

/// Decodes UTF-8 into code points. Invalid bytes decode to U+FFFD one byte at a time.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view cps);

bool is_space(char32_t c);

/// Letter or digit. ASCII is exact; outside ASCII, code points in the common
/// letter blocks (Latin, Greek, Cyrillic, Armenian, Hebrew, Arabic, Indic,
/// CJK, Hangul, ...) count, while punctuation, symbol, and emoji blocks do not.
bool is_alnum(char32_t c);

/// Simple case folding for ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic.
char32_t to_lower(char32_t c);

/// Splits on whitespace runs; no empty pieces.
std::vector<std::string_view> split_ws(std::string_view s);

/// Trims ASCII and Unicode whitespace from both ends.
std::string_view trim(std::string_view s);

/// Trims, then collapses every internal whitespace run into one ASCII space.
std::string squeeze_ws(std::string_view s);

}  // namespace misinfo::unicode
