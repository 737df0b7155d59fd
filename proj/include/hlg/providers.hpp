#pragma once

#include "hlg/embedding.hpp"
#include "hlg/ingest.hpp"
#include "hlg/postprocess.hpp"
#include "hlg/synthgen.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace hlg {

// Transport settings shared by all remote providers.
struct HttpOptions {
    std::string endpoint;     // e.g. http://127.0.0.1:8080/embed
    int timeout_ms = 10000;
    int retries = 2;          // attempts = retries + 1
    std::size_t batch_size = 32;
};

// POST {"texts": [text]} -> {"vectors": [[real]]}
// The declared dimension is validated against the first response;
// ProviderShapeError on disagreement.
class RemoteEmbedder final : public Embedder {
public:
    RemoteEmbedder(HttpOptions options, std::size_t expected_dim);

    Vector embed(const std::string& text) const override;
    std::vector<Vector> embed_batch(const std::vector<std::string>& texts) const override;
    std::size_t dim() const override { return expected_dim_; }

private:
    HttpOptions options_;
    std::size_t expected_dim_;
};

// POST {"query": text, "candidates": [text]} -> {"scores": [real]}
class RemoteReranker final : public Reranker {
public:
    explicit RemoteReranker(HttpOptions options) : options_(std::move(options)) {}

    std::vector<double> score(const std::string& query,
                              const std::vector<std::string>& candidates) const override;

private:
    HttpOptions options_;
};

// POST {"chunk": text, "hints": {...}} -> ExtractionResult shape:
//   {"topics":[{"label","statements":[int]}], "statements":[text],
//    "facts":[{"subject","predicate","object","statement"}],
//    "entities":[{"surface","category"}]}
class RemoteExtractor final : public Extractor {
public:
    explicit RemoteExtractor(HttpOptions options) : options_(std::move(options)) {}

    ExtractionResult extract(const std::string& chunk_text,
                             const DomainHints& hints) const override;

private:
    HttpOptions options_;
};

// POST {"chunks":[text], "mode":"generate", "relation": name} -> {"text": q\na}
// POST {"chunks":[text], "mode":"critique", "question", "answer"}
//   -> {"text": q\na} or {"reject": reason}
class RemoteGenerator final : public Generator {
public:
    explicit RemoteGenerator(HttpOptions options) : options_(std::move(options)) {}

    GeneratedQa generate(const std::vector<std::string>& chunk_texts,
                         RelationKind kind) const override;
    CritiqueResult critique(const std::string& question, const std::string& answer,
                            const std::vector<std::string>& chunk_texts) const override;

private:
    HttpOptions options_;
};

const char* to_string(RelationKind kind);

} // namespace hlg
