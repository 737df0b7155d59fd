#pragma once

#include "hlg/embedding.hpp"
#include "hlg/graph.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace hlg {

enum class IndexKind { StatementIndex, TopicIndex };

// Exact k-nearest-neighbor index. Immutable after build; concurrent queries
// are safe. Scan-based: results always equal the exhaustive oracle.
struct VectorIndex {
    IndexKind kind = IndexKind::StatementIndex;
    std::vector<std::pair<NodeId, Vector>> entries;  // ascending NodeId

    std::size_t dim() const { return entries.empty() ? 0 : entries.front().second.dim(); }
};

struct Scored {
    NodeId id;
    double score = 0.0;
};

// Top-k by cosine similarity descending, ties broken by ascending NodeId.
// Returns fewer than k results when the index is smaller. k must be > 0.
std::vector<Scored> knn(const VectorIndex& index, const Vector& query, std::size_t k);

// Topic embedding input is the label plus the topic's statement texts,
// newline-joined; order-sensitive by contract.
Vector embed_topic(const TopicNode& topic, const std::vector<std::string>& statement_texts,
                   const Embedder& embedder);

// Indexing step: computes and stores embeddings for every statement and topic.
void embed_graph(HlgGraph& graph, const Embedder& embedder);

VectorIndex build_statement_index(const HlgGraph& graph);
VectorIndex build_topic_index(const HlgGraph& graph);

} // namespace hlg
