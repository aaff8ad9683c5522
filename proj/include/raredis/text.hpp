#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace raredis {

// UTF-8 <-> code point helpers. Invalid sequences decode as U+FFFD.
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);

bool is_word_char(char32_t c);
bool is_space_char(char32_t c);

std::string ascii_lower(std::string_view s);
char32_t lower_cp(char32_t c);

// Lowercase runs of letters/digits.
std::vector<std::string> word_tokens(std::string_view s);

// Collapse runs of whitespace to a single space and trim the ends.
std::string normalize_ws(std::string_view s);

// Stable 64-bit content hash (FNV-1a), hex-encoded.
std::uint64_t fnv1a64(std::string_view s);
std::string fnv1a64_hex(std::string_view s);

// Sentence count: terminators (. ! ?) followed by whitespace and an
// uppercase letter start a new sentence; a non-blank text has at least one.
std::size_t count_sentences(std::string_view text);

}  // namespace raredis
