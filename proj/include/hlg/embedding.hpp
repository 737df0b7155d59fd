#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hlg {

// Fixed-length 32-bit float embedding. Dimension is carried by the vector
// itself and must match the graph manifest dimension wherever one exists.
struct Vector {
    std::vector<float> values;

    std::size_t dim() const { return values.size(); }
    bool operator==(const Vector&) const = default;
};

// Standard cosine similarity in [-1, 1]. Zero-norm operands yield 0 so that
// degenerate embeddings never propagate NaN into downstream scores.
// Throws DimensionMismatch when dimensions differ.
double cosine_sim(const Vector& a, const Vector& b);

class Embedder {
public:
    virtual ~Embedder() = default;

    // Same text must produce the identical vector for deterministic
    // implementations; output dimension is constant and equals dim().
    virtual Vector embed(const std::string& text) const = 0;
    virtual std::size_t dim() const = 0;

    // Batched convenience; remote implementations override to batch requests.
    virtual std::vector<Vector> embed_batch(const std::vector<std::string>& texts) const;
};

// Deterministic offline embedder: feature-hashed bag of character 3-grams
// and word unigrams over the casefolded text, accumulated into `dim` buckets
// and l2-normalized. Non-empty text always yields a nonzero vector; empty
// text yields the zero vector (cosine 0 by convention).
class HashEmbedder final : public Embedder {
public:
    static constexpr std::size_t kDefaultDim = 256;

    explicit HashEmbedder(std::size_t dim = kDefaultDim);

    Vector embed(const std::string& text) const override;
    std::size_t dim() const override { return dim_; }

private:
    std::size_t dim_;
};

} // namespace hlg
