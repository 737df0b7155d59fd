#pragma once

// Shared fixtures and oracles for the test suites. Oracles here are
// independent implementations built from public primitives only; they never
// call the engine code paths they are used to check.

#include "hlg/evalharness.hpp"
#include "hlg/index.hpp"
#include "hlg/ingest.hpp"
#include "hlg/retrieve.hpp"

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace hlg::testsupport {

// ── Vector helpers ──

Vector random_unit_vector(std::mt19937& rng, std::size_t dim);

// Exhaustive-scan reference for knn.
std::vector<Scored> knn_oracle(const VectorIndex& index, const Vector& query, std::size_t k);

// ── Beam-search oracle ──

// Exhaustive path enumeration under the attention-weighted path score and the
// strict-improvement stopping rule, without any frontier limit. Also reports
// the largest frontier the enumeration ever held, so callers can pick a beam
// width that guarantees no pruning.
struct BeamOracleResult {
    std::set<NodeId> surviving;        // statements on surviving paths, minus seeds
    std::size_t max_frontier = 0;      // paths alive at the widest depth
    std::size_t total_paths = 0;       // every path ever materialized
};

BeamOracleResult beam_oracle(const std::vector<NodeId>& seeds, const Query& query,
                             const HlgGraph& graph, std::uint32_t max_depth,
                             std::uint32_t neighbor_cap);

// ── Random statement graphs (beam / neighbor tests) ──

struct RandomGraph {
    HlgGraph graph;
    std::vector<NodeId> statement_ids;
    std::vector<NodeId> entity_ids;
};

// One source/chunk/topic, up to `max_entities` entities and `max_statements`
// statements with random entity subsets and random unit embeddings.
RandomGraph make_random_statement_graph(std::mt19937& rng, std::size_t max_statements,
                                        std::size_t max_entities, std::size_t dim);

// ── Adversarial two-hop fixture ──

// Per query: gold pair (X, Y) in different documents sharing a bridging
// entity; Y has low direct similarity to the query and sits below the vector
// search budget, while a block of duplicated distractors crowds the naive
// top-k. Reaching Y requires the entity-graph expansion.
struct MultihopFixture {
    struct QueryCase {
        std::string text;
        std::string x_text;
        std::string y_text;
        NodeId x;
        NodeId y;
    };

    std::vector<Document> corpus;
    std::vector<QueryCase> queries;
    HlgGraph graph;
    VectorIndex statement_index;
    VectorIndex topic_index;
    HashEmbedder embedder{256};
    RetrievalConfig cfg;

    Indexes indexes() const { return {&statement_index, &topic_index}; }
    Providers providers() const {
        Providers p;
        p.embedder = &embedder;
        return p;
    }
    std::vector<GoldRecord> gold_records() const;
};

MultihopFixture make_multihop_fixture(std::uint32_t query_count = 20);

// Rebuilds fixture state from an already-built copy of the graph (used by
// the persistence round-trip checks).
void rebind_multihop_fixture(MultihopFixture& fixture, HlgGraph graph);

// ── Synthetic-dataset fixture ──

// Ten documents in three themes; themes share vocabulary so topic collection
// crosses documents, and every document carries enough unique answer terms
// that deleting it breaks validation coverage for candidates that used it.
struct SynthFixture {
    std::vector<Document> corpus;
    HlgGraph graph;
    VectorIndex statement_index;
    VectorIndex topic_index;
    HashEmbedder embedder{256};
    RetrievalConfig cfg;

    Indexes indexes() const { return {&statement_index, &topic_index}; }
    Providers providers() const {
        Providers p;
        p.embedder = &embedder;
        return p;
    }
};

SynthFixture make_synth_fixture();

// The same fixture with one document removed, rebuilt from scratch.
SynthFixture make_synth_fixture_without(const std::string& doc_id);

// ── Diversity fixture ──

struct DiversityFixture {
    std::vector<ScoredStatement> candidates;  // 100 statements, rank-ordered
    std::vector<std::string> texts;
    std::vector<std::size_t> cluster_of;      // cluster index per candidate
    std::vector<NodeId> expected_survivors;   // max-score member per cluster
};

// 20 clusters of 5 identical texts each, disjoint vocabulary across clusters.
DiversityFixture make_diversity_fixture();

// Deterministic nonsense word of the given length.
std::string nonce_word(std::mt19937& rng, std::size_t length);

} // namespace hlg::testsupport
