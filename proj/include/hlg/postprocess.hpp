#pragma once

#include "hlg/embedding.hpp"
#include "hlg/scored.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

namespace hlg {

using StopwordSet = std::unordered_set<std::string>;

// Bundled ~120-word English stopword list; overridable wherever a
// StopwordSet pointer is accepted.
const StopwordSet& default_stopwords();

// One word per line; '#' comments and blank lines ignored.
StopwordSet load_stopwords(const std::filesystem::path& path);

// Statement normalization for redundancy detection:
// casefold -> tokenize on non-alphanumerics (numeric tokens keep embedded
// separators) -> drop stopwords -> canonicalize numbers (strip thousands
// separators and currency, shortest decimal form) -> suffix-strip
// lemmatization with length guards. Empty output is allowed.
std::vector<std::string> preprocess_statement(const std::string& text,
                                              const StopwordSet* stopwords = nullptr);

// TF-IDF over a candidate set: tf = raw count, idf = ln((1+N)/(1+df)) + 1.
struct TfidfModel {
    std::map<std::string, std::size_t> vocabulary;
    std::vector<double> idf;
    std::size_t document_count = 0;

    static TfidfModel fit(const std::vector<std::vector<std::string>>& term_lists);
};

// Cosine over TF-IDF vectors of two term lists; zero-vector operand -> 0.
double tfidf_cosine(const std::vector<std::string>& a, const std::vector<std::string>& b,
                    const TfidfModel& model);

// Near-duplicate suppression. Candidates are scanned greedily by descending
// score (ties by ascending id); a candidate is retained iff its TF-IDF cosine
// to every already-retained candidate is <= 1 - tau. Within any group of
// mutually similar statements exactly the highest-scoring member survives.
// Returns retained positions in input order.
std::vector<std::size_t> diversity_filter_indices(const std::vector<std::string>& texts,
                                                  const std::vector<double>& scores,
                                                  const std::vector<NodeId>& ids,
                                                  double tau,
                                                  const StopwordSet* stopwords = nullptr);

// Statement-level convenience wrapper; texts[i] belongs to candidates[i].
// Output preserves input rank order.
std::vector<ScoredStatement> diversity_filter(const std::vector<ScoredStatement>& candidates,
                                              const std::vector<std::string>& texts,
                                              double tau,
                                              const StopwordSet* stopwords = nullptr);

class Reranker {
public:
    virtual ~Reranker() = default;

    // One score per candidate, same order. Deterministic for the bundled
    // default.
    virtual std::vector<double> score(const std::string& query,
                                      const std::vector<std::string>& candidates) const = 0;
};

// Bundled default: cosine between embedder vectors of query and candidate.
// Its ordering over a set of texts equals the vector-search ordering.
class EmbeddingReranker final : public Reranker {
public:
    explicit EmbeddingReranker(const Embedder& embedder) : embedder_(embedder) {}

    std::vector<double> score(const std::string& query,
                              const std::vector<std::string>& candidates) const override;

private:
    const Embedder& embedder_;
};

// Overwrites rank_score with reranker output and sorts descending,
// ties by ascending NodeId. texts[i] belongs to candidates[i].
std::vector<ScoredStatement> rerank(const std::string& query,
                                    std::vector<ScoredStatement> candidates,
                                    const std::vector<std::string>& texts,
                                    const Reranker& reranker);

} // namespace hlg
