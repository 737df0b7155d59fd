#pragma once

#include "hlg/embedding.hpp"
#include "hlg/errors.hpp"
#include "hlg/ids.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hlg {

// ─── Three-tier lexical graph ────────────────────────────────────────────
//
// Lineage tier:            SourceNode ──SOURCE_OF──▶ ChunkNode ──NEXT──▶ ...
// Summarization tier:      TopicNode ◀──BELONGS_TO_TOPIC── StatementNode
//                          StatementNode ──ASSERTS_FACT──▶ FactNode
// Entity-relationship tier: StatementNode ──MENTIONS_ENTITY──▶ EntityNode,
//                          EntityNode ──RELATES──▶ EntityNode (via a fact)
//
// Statements are the retrieval unit; every statement resolves to exactly one
// chunk and one source through its lineage, and to exactly one topic.

struct SourceNode {
    NodeId id;
    std::string uri;
    std::map<std::string, std::string> metadata;
};

struct ChunkNode {
    NodeId id;
    NodeId source;
    std::uint32_t ordinal = 0;       // position within the source, contiguous from 0
    std::string text;
    std::uint32_t token_count = 0;
};

struct TopicNode {
    NodeId id;
    std::string label;
    std::vector<NodeId> statements;  // insertion order, unique
    std::optional<Vector> embedding;
};

struct StatementNode {
    NodeId id;
    std::string text;
    NodeId chunk;
    NodeId topic;
    std::set<NodeId> entities;
    std::optional<Vector> embedding;
};

struct FactNode {
    NodeId id;
    NodeId subject;                  // entity
    std::string predicate;
    NodeId object;                   // entity
    std::set<NodeId> supporting_statements;
};

struct EntityNode {
    NodeId id;
    std::string surface;
    std::string normalized;          // derived: normalize_surface(surface)
    std::string category;
};

// Derived view of an entity-entity edge with its provenance fact.
struct RelationshipEdge {
    NodeId src;
    std::string predicate;
    NodeId dst;
    NodeId provenance;               // the fact it derives from
};

// Result of inserting an entity: when (normalized, category) already exists
// the existing id is returned and `deduplicated` is set.
struct EntityInsert {
    NodeId id;
    bool deduplicated = false;
};

// In-memory property graph store with typed adjacency in both directions.
//
// Build phase is exclusive single-writer; freeze() makes the graph immutable
// and safe for unlimited concurrent readers. thaw() re-enters exclusive
// build mode for incremental ingestion.
class HlgGraph {
public:
    // ── Mutation (build phase only) ──
    // Each insert validates referenced ids (DanglingReference otherwise),
    // assigns a fresh NodeId, and maintains the implied typed edges.
    NodeId add_node(SourceNode node);
    NodeId add_node(ChunkNode node);       // links SOURCE_OF and NEXT
    NodeId add_node(TopicNode node);       // statements list must be empty; filled by statement inserts
    NodeId add_node(StatementNode node);   // links chunk, topic, entities
    NodeId add_node(FactNode node);        // links ASSERTS_FACT and RELATES
    EntityInsert add_node(EntityNode node); // dedup on (normalized, category)

    // Records one more supporting statement on an existing fact.
    void add_fact_support(NodeId fact_id, NodeId statement_id);

    void set_statement_embedding(NodeId id, Vector v);
    void set_topic_embedding(NodeId id, Vector v);

    void freeze() { frozen_ = true; }
    void thaw() { frozen_ = false; }
    bool frozen() const { return frozen_; }

    // ── Typed lookup ──
    bool contains(NodeId id) const;
    NodeKind kind(NodeId id) const;        // throws Error when absent
    const SourceNode& source(NodeId id) const;
    const ChunkNode& chunk(NodeId id) const;
    const TopicNode& topic(NodeId id) const;
    const StatementNode& statement(NodeId id) const;
    const FactNode& fact(NodeId id) const;
    const EntityNode& entity(NodeId id) const;

    // Ascending-id iteration; maps are ordered so traversal is deterministic.
    const std::map<NodeId, SourceNode>& sources() const { return sources_; }
    const std::map<NodeId, ChunkNode>& chunks() const { return chunks_; }
    const std::map<NodeId, TopicNode>& topics() const { return topics_; }
    const std::map<NodeId, StatementNode>& statements() const { return statements_; }
    const std::map<NodeId, FactNode>& facts() const { return facts_; }
    const std::map<NodeId, EntityNode>& entities() const { return entities_; }

    // Entity ids matching a normalized surface, any category, ascending id.
    std::vector<NodeId> entities_by_normalized(const std::string& normalized) const;
    // Exact (normalized, category) lookup; invalid id when absent.
    NodeId entity_by_key(const std::string& normalized, const std::string& category) const;

    const std::vector<NodeId>& out_edges(EdgeKind kind, NodeId src) const;
    const std::vector<NodeId>& in_edges(EdgeKind kind, NodeId dst) const;

    // All RELATES edges with fact provenance, ascending fact id.
    std::vector<RelationshipEdge> relationship_edges() const;

    // ── Statement-graph operations ──

    // All statements sharing at least one entity with `s`, ordered by shared
    // entity count descending then ascending id, truncated to `cap`. The cap
    // bounds fan-out on highly connected entities.
    std::vector<std::pair<NodeId, std::uint32_t>>
    neighbors_by_shared_entities(NodeId s, std::uint32_t cap) const;

    // Statement provenance: (chunk, source).
    std::pair<NodeId, NodeId> lineage(NodeId s) const;

    // Topic members in insertion order.
    const std::vector<NodeId>& statements_of_topic(NodeId t) const;

    std::uint64_t next_id_value() const { return next_id_; }

    bool operator==(const HlgGraph& other) const;

private:
    friend class GraphCodec;  // persistence reconstructs internals directly

    NodeId allocate_id();
    void require_mutable() const;
    void require_exists(NodeId id, const char* what) const;
    void add_edge(EdgeKind kind, NodeId src, NodeId dst);

    std::uint64_t next_id_ = 1;
    bool frozen_ = false;

    std::map<NodeId, SourceNode> sources_;
    std::map<NodeId, ChunkNode> chunks_;
    std::map<NodeId, TopicNode> topics_;
    std::map<NodeId, StatementNode> statements_;
    std::map<NodeId, FactNode> facts_;
    std::map<NodeId, EntityNode> entities_;
    std::map<NodeId, NodeKind> kinds_;

    // normalized surface -> category -> entity id
    std::map<std::string, std::map<std::string, NodeId>> entity_index_;

    // chunk bookkeeping: source id -> last chunk id (NEXT linking)
    std::map<NodeId, NodeId> last_chunk_of_source_;
    std::map<NodeId, std::uint32_t> chunk_count_of_source_;

    struct Adjacency {
        std::map<NodeId, std::vector<NodeId>> fwd;
        std::map<NodeId, std::vector<NodeId>> rev;
    };
    Adjacency edges_[7];

    Adjacency& adj(EdgeKind kind) { return edges_[static_cast<std::size_t>(kind)]; }
    const Adjacency& adj(EdgeKind kind) const { return edges_[static_cast<std::size_t>(kind)]; }
};

} // namespace hlg
