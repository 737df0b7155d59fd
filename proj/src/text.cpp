#include "hlg/text.hpp"

#include <cctype>
#include <cstdint>

namespace hlg {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

bool is_trailing_punct(unsigned char c) {
    switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case '\'': case '"': case ')': case ']':
        return true;
    default:
        return false;
    }
}

} // namespace

std::string casefold(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (unsigned char c : text) {
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (is_space(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

std::string normalize_surface(std::string_view surface) {
    std::string out = collapse_whitespace(casefold(surface));
    while (!out.empty() && is_trailing_punct(static_cast<unsigned char>(out.back()))) {
        out.pop_back();
    }
    return out;
}

std::vector<TokenSpan> whitespace_tokens(std::string_view text) {
    std::vector<TokenSpan> spans;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && is_space(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= n) break;
        std::size_t begin = i;
        while (i < n && !is_space(static_cast<unsigned char>(text[i]))) ++i;
        spans.push_back({begin, i});
    }
    return spans;
}

std::vector<std::string> split_whitespace(std::string_view text) {
    std::vector<std::string> out;
    for (const TokenSpan& s : whitespace_tokens(text)) {
        out.emplace_back(text.substr(s.begin, s.end - s.begin));
    }
    return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    const std::size_t n = text.size();
    auto push = [&](std::size_t begin, std::size_t end) {
        while (begin < end && is_space(static_cast<unsigned char>(text[begin]))) ++begin;
        while (end > begin && is_space(static_cast<unsigned char>(text[end - 1]))) --end;
        if (end > begin) out.emplace_back(text.substr(begin, end - begin));
    };
    for (std::size_t i = 0; i < n; ++i) {
        char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            std::size_t j = i + 1;
            while (j < n && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
            if (j >= n || is_space(static_cast<unsigned char>(text[j]))) {
                push(start, j);
                start = j;
                i = j - 1;
            }
        }
    }
    push(start, n);
    return out;
}

bool starts_with_uppercase(std::string_view token) {
    if (token.empty()) return false;
    return std::isupper(static_cast<unsigned char>(token.front())) != 0;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace hlg
