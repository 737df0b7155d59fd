#include "hlg/embedding.hpp"

#include "hlg/errors.hpp"
#include "hlg/text.hpp"

#include <cctype>
#include <cmath>

namespace hlg {

double cosine_sim(const Vector& a, const Vector& b) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("cosine_sim: dimensions differ (" +
                                std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()) + ")");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double x = a.values[i];
        const double y = b.values[i];
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<Vector> Embedder::embed_batch(const std::vector<std::string>& texts) const {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const std::string& t : texts) out.push_back(embed(t));
    return out;
}

HashEmbedder::HashEmbedder(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw ConfigError("HashEmbedder: dim must be positive");
}

Vector HashEmbedder::embed(const std::string& text) const {
    Vector v;
    v.values.assign(dim_, 0.0f);

    const std::string folded = collapse_whitespace(casefold(text));
    if (folded.empty()) return v;

    std::vector<double> acc(dim_, 0.0);
    auto bump = [&](std::string_view feature) {
        acc[fnv1a64(feature) % dim_] += 1.0;
    };

    // Word unigrams over alphanumeric runs.
    std::string word;
    for (std::size_t i = 0; i <= folded.size(); ++i) {
        const bool alnum = i < folded.size() &&
                           std::isalnum(static_cast<unsigned char>(folded[i])) != 0;
        if (alnum) {
            word.push_back(folded[i]);
        } else if (!word.empty()) {
            bump("w:" + word);
            word.clear();
        }
    }

    // Character 3-grams over the collapsed text, spaces included.
    for (std::size_t i = 0; i + 3 <= folded.size(); ++i) {
        bump(std::string("g:") + std::string(folded.substr(i, 3)));
    }

    // Whole-text feature guarantees norm > 0 for any non-empty input.
    bump("t:" + folded);

    double norm = 0.0;
    for (double x : acc) norm += x * x;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < dim_; ++i) {
        v.values[i] = static_cast<float>(acc[i] / norm);
    }
    return v;
}

} // namespace hlg
