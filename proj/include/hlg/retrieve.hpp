#pragma once

#include "hlg/graph.hpp"
#include "hlg/index.hpp"
#include "hlg/postprocess.hpp"
#include "hlg/scored.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hlg {

// All retrieval tunables. Defaults follow the reference configuration:
// 100-statement keyword/vector budgets, 50 topics, beam width 50 and depth 3,
// diversity threshold 0.005, 10-chunk output cap. top_k of 30 statements
// stays inside a 10-chunk generation context at typical statement density.
struct RetrievalConfig {
    std::uint32_t k_keyword = 100;
    std::uint32_t k_vss = 100;
    std::uint32_t k_topics = 50;
    std::uint32_t beam_width = 50;   // B
    std::uint32_t max_depth = 3;     // D_max
    std::uint32_t top_k = 30;
    std::uint32_t neighbor_cap = 200;
    std::uint32_t max_chunks = 10;
    double tau = 0.005;              // 0 disables diversity filtering

    void validate() const;
};

// Synonym table: canonical term -> variant phrasings. A query n-gram that
// matches a variant contributes the canonical term.
using SynonymMap = std::map<std::string, std::set<std::string>>;

// Pluggable pieces threaded through the pipelines.
struct Providers {
    const Embedder* embedder = nullptr;        // required
    const Reranker* reranker = nullptr;        // nullptr: embedding-cosine default
    const SynonymMap* synonyms = nullptr;      // optional
    const StopwordSet* stopwords = nullptr;    // optional, diversity filtering
};

struct Query {
    std::string text;
    Vector embedding;                 // e_Q
    std::set<std::string> keywords;   // K, normalized like entity surfaces
};

// Ordered statement walk with its attention-weighted score.
struct Path {
    std::vector<NodeId> statements;   // s_1..s_n, no repeats
    double score = 0.0;               // cosine(e_Q, path embedding)
};

struct Indexes {
    const VectorIndex* statements = nullptr;
    const VectorIndex* topics = nullptr;
};

// Stage-by-stage candidate sets for diagnostics and tests.
struct RetrievalTrace {
    std::set<NodeId> keyword_ids;
    std::set<NodeId> vss_ids;
    std::set<NodeId> topic_ids;             // topic pipeline stage 1 topics
    std::set<NodeId> topic_statement_ids;   // their statements
    std::set<NodeId> init_ids;              // S_init
    std::set<NodeId> beam_ids;              // S_beam
    std::set<NodeId> final_ids;             // S_final (pre-rerank pool)
};

// Normalized query terms (and synonym canonicals) that match entity surfaces
// in the graph. Matching is longest-span-first over query token n-grams of
// up to four tokens; consumed tokens are not re-matched.
std::set<std::string> extract_keywords(const std::string& query_text, const HlgGraph& graph,
                                       const SynonymMap* synonyms = nullptr);

Query make_query(const std::string& text, const HlgGraph& graph, const Embedder& embedder,
                 const SynonymMap* synonyms = nullptr);

// Statements mentioning at least one entity matching K, ranked by matched
// keyword count, ties by query-embedding cosine then ascending id.
std::vector<ScoredStatement> keyword_retrieve(const Query& query, const HlgGraph& graph,
                                              std::uint32_t k);

// Exact top-k vector similarity search over the statement index.
std::vector<ScoredStatement> vss_retrieve(const Query& query, const VectorIndex& index,
                                          std::uint32_t k);

// Attention-weighted path embedding: weights are the softmax over each
// member's query similarity and sum to 1; a single-member path returns that
// member's embedding unchanged. Optionally reports the weights.
Vector path_embedding(const Path& path, const Query& query,
                      const std::map<NodeId, Vector>& embeddings,
                      std::vector<double>* weights_out = nullptr);

// Frontier-limited expansion over entity-sharing neighbors. Each path stops
// when no child strictly improves its score or its depth reaches max_depth;
// at every depth only the beam_width best paths (all seeds pooled) continue.
// Returns statements on surviving paths, excluding the seeds themselves.
std::set<NodeId> beam_search(const std::vector<NodeId>& seeds, const Query& query,
                             const HlgGraph& graph, const RetrievalConfig& cfg);

// Keyword + vector retrieval, beam expansion, rerank, diversity filter,
// truncate. Results carry lineage and are ordered by rank_score descending.
std::vector<ScoredStatement> statement_graph_rag(const std::string& query_text,
                                                 const HlgGraph& graph, const Indexes& indexes,
                                                 const Providers& providers,
                                                 const RetrievalConfig& cfg,
                                                 RetrievalTrace* trace = nullptr);

// Top-down topic discovery merged with bottom-up keyword retrieval, then
// beam expansion and the same final rerank/filter/truncate.
std::vector<ScoredStatement> topic_graph_rag(const std::string& query_text,
                                             const HlgGraph& graph, const Indexes& indexes,
                                             const Providers& providers,
                                             const RetrievalConfig& cfg,
                                             RetrievalTrace* trace = nullptr);

// Chunk-as-generation-unit variant: walks reranked statements, collects their
// parent chunks first-appearance order, dedups, applies the chunk-level
// diversity filter, and stops at max_chunks.
std::vector<ChunkNode> map_to_chunks(const std::vector<ScoredStatement>& results,
                                     const HlgGraph& graph, std::uint32_t max_chunks,
                                     double tau, const StopwordSet* stopwords = nullptr);

} // namespace hlg
