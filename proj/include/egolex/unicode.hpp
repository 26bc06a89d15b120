#pragma once

#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 and codepoint classification used by the tokenizer. The
// classes are fixed range tables (no ICU dependency) so tokenization is
// bit-reproducible across platforms.
namespace egolex::unicode {

/// Decodes UTF-8; invalid sequences become U+FFFD.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view cps);

/// Symbol-like codepoints: So/Sk approximations, emoji blocks and emoji
/// components (ZWJ, variation selectors, keycap, tags, skin tones).
bool is_emoji_or_symbol(char32_t cp);

/// Letters, digits and combining marks. Punctuation, symbols, spaces and
/// emoji are not alphanumeric.
bool is_alnum(char32_t cp);

char32_t to_lower(char32_t cp);

bool is_space(char32_t cp);

}  // namespace egolex::unicode
