#include "hlg/graph.hpp"

#include "hlg/text.hpp"

#include <algorithm>
#include <unordered_map>

namespace hlg {

const char* to_string(NodeKind kind) {
    switch (kind) {
    case NodeKind::Source: return "source";
    case NodeKind::Chunk: return "chunk";
    case NodeKind::Topic: return "topic";
    case NodeKind::Statement: return "statement";
    case NodeKind::Fact: return "fact";
    case NodeKind::Entity: return "entity";
    }
    return "?";
}

const char* to_string(EdgeKind kind) {
    switch (kind) {
    case EdgeKind::SourceOf: return "source_of";
    case EdgeKind::Next: return "next";
    case EdgeKind::ExtractedFrom: return "extracted_from";
    case EdgeKind::BelongsToTopic: return "belongs_to_topic";
    case EdgeKind::AssertsFact: return "asserts_fact";
    case EdgeKind::MentionsEntity: return "mentions_entity";
    case EdgeKind::Relates: return "relates";
    }
    return "?";
}

namespace {
const std::vector<NodeId> kNoEdges;
}

NodeId HlgGraph::allocate_id() {
    return NodeId{next_id_++};
}

void HlgGraph::require_mutable() const {
    if (frozen_) throw FrozenGraph("graph is frozen; thaw() before mutating");
}

void HlgGraph::require_exists(NodeId id, const char* what) const {
    if (!contains(id)) {
        throw DanglingReference(std::string(what) + " references absent node " +
                                std::to_string(id.value));
    }
}

void HlgGraph::add_edge(EdgeKind kind, NodeId src, NodeId dst) {
    adj(kind).fwd[src].push_back(dst);
    adj(kind).rev[dst].push_back(src);
}

NodeId HlgGraph::add_node(SourceNode node) {
    require_mutable();
    if (node.uri.empty()) throw Error("source uri must be non-empty");
    node.id = allocate_id();
    kinds_[node.id] = NodeKind::Source;
    NodeId id = node.id;
    sources_.emplace(id, std::move(node));
    return id;
}

NodeId HlgGraph::add_node(ChunkNode node) {
    require_mutable();
    require_exists(node.source, "chunk");
    if (kind(node.source) != NodeKind::Source) {
        throw DanglingReference("chunk.source is not a SourceNode");
    }
    const std::uint32_t expected = chunk_count_of_source_.count(node.source)
                                       ? chunk_count_of_source_[node.source]
                                       : 0;
    if (node.ordinal != expected) {
        throw Error("chunk ordinals must be contiguous from 0 (expected " +
                    std::to_string(expected) + ", got " + std::to_string(node.ordinal) + ")");
    }
    node.id = allocate_id();
    kinds_[node.id] = NodeKind::Chunk;
    add_edge(EdgeKind::SourceOf, node.source, node.id);
    if (auto it = last_chunk_of_source_.find(node.source); it != last_chunk_of_source_.end()) {
        add_edge(EdgeKind::Next, it->second, node.id);
    }
    last_chunk_of_source_[node.source] = node.id;
    chunk_count_of_source_[node.source] = expected + 1;
    NodeId id = node.id;
    chunks_.emplace(id, std::move(node));
    return id;
}

NodeId HlgGraph::add_node(TopicNode node) {
    require_mutable();
    if (!node.statements.empty()) {
        throw Error("topic statements are filled by statement inserts");
    }
    node.id = allocate_id();
    kinds_[node.id] = NodeKind::Topic;
    NodeId id = node.id;
    topics_.emplace(id, std::move(node));
    return id;
}

NodeId HlgGraph::add_node(StatementNode node) {
    require_mutable();
    if (node.text.empty()) throw Error("statement text must be non-empty");
    require_exists(node.chunk, "statement");
    if (kind(node.chunk) != NodeKind::Chunk) {
        throw DanglingReference("statement.chunk is not a ChunkNode");
    }
    require_exists(node.topic, "statement");
    if (kind(node.topic) != NodeKind::Topic) {
        throw DanglingReference("statement.topic is not a TopicNode");
    }
    for (NodeId e : node.entities) {
        require_exists(e, "statement");
        if (kind(e) != NodeKind::Entity) {
            throw DanglingReference("statement.entities member is not an EntityNode");
        }
    }
    node.id = allocate_id();
    kinds_[node.id] = NodeKind::Statement;
    add_edge(EdgeKind::ExtractedFrom, node.id, node.chunk);
    add_edge(EdgeKind::BelongsToTopic, node.id, node.topic);
    for (NodeId e : node.entities) {
        add_edge(EdgeKind::MentionsEntity, node.id, e);
    }
    topics_.at(node.topic).statements.push_back(node.id);
    NodeId id = node.id;
    statements_.emplace(id, std::move(node));
    return id;
}

NodeId HlgGraph::add_node(FactNode node) {
    require_mutable();
    require_exists(node.subject, "fact");
    require_exists(node.object, "fact");
    if (kind(node.subject) != NodeKind::Entity || kind(node.object) != NodeKind::Entity) {
        throw DanglingReference("fact endpoints must be EntityNodes");
    }
    if (node.supporting_statements.empty()) {
        throw Error("fact requires at least one supporting statement");
    }
    for (NodeId s : node.supporting_statements) {
        require_exists(s, "fact");
        if (kind(s) != NodeKind::Statement) {
            throw DanglingReference("fact supporting member is not a StatementNode");
        }
    }
    node.id = allocate_id();
    kinds_[node.id] = NodeKind::Fact;
    for (NodeId s : node.supporting_statements) {
        add_edge(EdgeKind::AssertsFact, s, node.id);
    }
    add_edge(EdgeKind::Relates, node.subject, node.object);
    NodeId id = node.id;
    facts_.emplace(id, std::move(node));
    return id;
}

EntityInsert HlgGraph::add_node(EntityNode node) {
    require_mutable();
    if (node.surface.empty()) throw Error("entity surface must be non-empty");
    node.normalized = normalize_surface(node.surface);
    auto& by_category = entity_index_[node.normalized];
    if (auto it = by_category.find(node.category); it != by_category.end()) {
        return {it->second, true};
    }
    node.id = allocate_id();
    kinds_[node.id] = NodeKind::Entity;
    by_category[node.category] = node.id;
    NodeId id = node.id;
    entities_.emplace(id, std::move(node));
    return {id, false};
}

void HlgGraph::add_fact_support(NodeId fact_id, NodeId statement_id) {
    require_mutable();
    auto it = facts_.find(fact_id);
    if (it == facts_.end()) throw Error("not a fact: " + std::to_string(fact_id.value));
    if (statements_.find(statement_id) == statements_.end()) {
        throw NotAStatement("add_fact_support: not a statement");
    }
    if (it->second.supporting_statements.insert(statement_id).second) {
        add_edge(EdgeKind::AssertsFact, statement_id, fact_id);
    }
}

void HlgGraph::set_statement_embedding(NodeId id, Vector v) {
    require_mutable();
    auto it = statements_.find(id);
    if (it == statements_.end()) throw NotAStatement("set_statement_embedding: not a statement");
    it->second.embedding = std::move(v);
}

void HlgGraph::set_topic_embedding(NodeId id, Vector v) {
    require_mutable();
    auto it = topics_.find(id);
    if (it == topics_.end()) throw NotATopic("set_topic_embedding: not a topic");
    it->second.embedding = std::move(v);
}

bool HlgGraph::contains(NodeId id) const {
    return kinds_.count(id) != 0;
}

NodeKind HlgGraph::kind(NodeId id) const {
    auto it = kinds_.find(id);
    if (it == kinds_.end()) throw Error("no node with id " + std::to_string(id.value));
    return it->second;
}

const SourceNode& HlgGraph::source(NodeId id) const {
    auto it = sources_.find(id);
    if (it == sources_.end()) throw Error("not a source: " + std::to_string(id.value));
    return it->second;
}

const ChunkNode& HlgGraph::chunk(NodeId id) const {
    auto it = chunks_.find(id);
    if (it == chunks_.end()) throw Error("not a chunk: " + std::to_string(id.value));
    return it->second;
}

const TopicNode& HlgGraph::topic(NodeId id) const {
    auto it = topics_.find(id);
    if (it == topics_.end()) throw NotATopic("not a topic: " + std::to_string(id.value));
    return it->second;
}

const StatementNode& HlgGraph::statement(NodeId id) const {
    auto it = statements_.find(id);
    if (it == statements_.end()) throw NotAStatement("not a statement: " + std::to_string(id.value));
    return it->second;
}

const FactNode& HlgGraph::fact(NodeId id) const {
    auto it = facts_.find(id);
    if (it == facts_.end()) throw Error("not a fact: " + std::to_string(id.value));
    return it->second;
}

const EntityNode& HlgGraph::entity(NodeId id) const {
    auto it = entities_.find(id);
    if (it == entities_.end()) throw Error("not an entity: " + std::to_string(id.value));
    return it->second;
}

std::vector<NodeId> HlgGraph::entities_by_normalized(const std::string& normalized) const {
    std::vector<NodeId> out;
    auto it = entity_index_.find(normalized);
    if (it == entity_index_.end()) return out;
    for (const auto& [category, id] : it->second) out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
}

NodeId HlgGraph::entity_by_key(const std::string& normalized, const std::string& category) const {
    auto it = entity_index_.find(normalized);
    if (it == entity_index_.end()) return {};
    auto jt = it->second.find(category);
    if (jt == it->second.end()) return {};
    return jt->second;
}

const std::vector<NodeId>& HlgGraph::out_edges(EdgeKind kind, NodeId src) const {
    const auto& fwd = adj(kind).fwd;
    auto it = fwd.find(src);
    return it == fwd.end() ? kNoEdges : it->second;
}

const std::vector<NodeId>& HlgGraph::in_edges(EdgeKind kind, NodeId dst) const {
    const auto& rev = adj(kind).rev;
    auto it = rev.find(dst);
    return it == rev.end() ? kNoEdges : it->second;
}

std::vector<RelationshipEdge> HlgGraph::relationship_edges() const {
    std::vector<RelationshipEdge> out;
    out.reserve(facts_.size());
    for (const auto& [id, f] : facts_) {
        out.push_back({f.subject, f.predicate, f.object, id});
    }
    return out;
}

std::vector<std::pair<NodeId, std::uint32_t>>
HlgGraph::neighbors_by_shared_entities(NodeId s, std::uint32_t cap) const {
    const StatementNode& stmt = statement(s);  // NotAStatement otherwise
    std::unordered_map<NodeId, std::uint32_t> overlap;
    for (NodeId e : stmt.entities) {
        for (NodeId other : in_edges(EdgeKind::MentionsEntity, e)) {
            if (other != s) ++overlap[other];
        }
    }
    std::vector<std::pair<NodeId, std::uint32_t>> out(overlap.begin(), overlap.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (out.size() > cap) out.resize(cap);
    return out;
}

std::pair<NodeId, NodeId> HlgGraph::lineage(NodeId s) const {
    const StatementNode& stmt = statement(s);
    const ChunkNode& c = chunk(stmt.chunk);
    return {c.id, c.source};
}

const std::vector<NodeId>& HlgGraph::statements_of_topic(NodeId t) const {
    return topic(t).statements;
}

bool HlgGraph::operator==(const HlgGraph& other) const {
    auto node_eq = [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return false;
        auto it = a.begin();
        auto jt = b.begin();
        for (; it != a.end(); ++it, ++jt) {
            if (it->first != jt->first) return false;
        }
        return true;
    };
    if (!node_eq(sources_, other.sources_) || !node_eq(chunks_, other.chunks_) ||
        !node_eq(topics_, other.topics_) || !node_eq(statements_, other.statements_) ||
        !node_eq(facts_, other.facts_) || !node_eq(entities_, other.entities_)) {
        return false;
    }
    for (const auto& [id, n] : sources_) {
        const auto& m = other.sources_.at(id);
        if (n.uri != m.uri || n.metadata != m.metadata) return false;
    }
    for (const auto& [id, n] : chunks_) {
        const auto& m = other.chunks_.at(id);
        if (n.source != m.source || n.ordinal != m.ordinal || n.text != m.text ||
            n.token_count != m.token_count) return false;
    }
    for (const auto& [id, n] : topics_) {
        const auto& m = other.topics_.at(id);
        if (n.label != m.label || n.statements != m.statements ||
            n.embedding != m.embedding) return false;
    }
    for (const auto& [id, n] : statements_) {
        const auto& m = other.statements_.at(id);
        if (n.text != m.text || n.chunk != m.chunk || n.topic != m.topic ||
            n.entities != m.entities || n.embedding != m.embedding) return false;
    }
    for (const auto& [id, n] : facts_) {
        const auto& m = other.facts_.at(id);
        if (n.subject != m.subject || n.predicate != m.predicate ||
            n.object != m.object ||
            n.supporting_statements != m.supporting_statements) return false;
    }
    for (const auto& [id, n] : entities_) {
        const auto& m = other.entities_.at(id);
        if (n.surface != m.surface || n.normalized != m.normalized ||
            n.category != m.category) return false;
    }
    for (EdgeKind k : kAllEdgeKinds) {
        if (adj(k).fwd != other.adj(k).fwd) return false;
    }
    return true;
}

} // namespace hlg
