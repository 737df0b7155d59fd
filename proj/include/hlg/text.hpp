#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace hlg {

// Byte range [begin, end) of a whitespace-delimited token in the original text.
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

// ASCII casefold; bytes outside A-Z pass through unchanged.
std::string casefold(std::string_view text);

// Trim plus collapse internal whitespace runs to a single space.
std::string collapse_whitespace(std::string_view text);

// Entity identity normalization: casefold + whitespace collapse +
// trailing-punctuation strip. Identical inputs always map to identical keys.
std::string normalize_surface(std::string_view surface);

// Whitespace tokenization; returns one span per token, in order.
std::vector<TokenSpan> whitespace_tokens(std::string_view text);

std::vector<std::string> split_whitespace(std::string_view text);

// Splits on terminal punctuation (. ! ?) followed by whitespace or end of
// text; trailing unpunctuated text forms a final sentence. Sentences are
// trimmed and empty ones dropped.
std::vector<std::string> split_sentences(std::string_view text);

bool starts_with_uppercase(std::string_view token);

std::uint64_t fnv1a64(std::string_view bytes);

} // namespace hlg
