#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace hlg {

// Opaque 64-bit node identifier, unique per graph across all node kinds.
// Value 0 is reserved as "invalid". Ids are allocated sequentially and
// never reused, so they are stable across persistence round-trips.
struct NodeId {
    std::uint64_t value = 0;

    constexpr bool valid() const { return value != 0; }
    constexpr auto operator<=>(const NodeId&) const = default;
};

enum class NodeKind : std::uint8_t {
    Source,
    Chunk,
    Topic,
    Statement,
    Fact,
    Entity,
};

enum class EdgeKind : std::uint8_t {
    SourceOf,        // source -> chunk
    Next,            // chunk -> following chunk of same source
    ExtractedFrom,   // statement -> chunk
    BelongsToTopic,  // statement -> topic
    AssertsFact,     // statement -> fact
    MentionsEntity,  // statement -> entity
    Relates,         // entity -> entity, derived from a fact
};

inline constexpr EdgeKind kAllEdgeKinds[] = {
    EdgeKind::SourceOf,     EdgeKind::Next,          EdgeKind::ExtractedFrom,
    EdgeKind::BelongsToTopic, EdgeKind::AssertsFact, EdgeKind::MentionsEntity,
    EdgeKind::Relates,
};

const char* to_string(NodeKind kind);
const char* to_string(EdgeKind kind);

} // namespace hlg

template <>
struct std::hash<hlg::NodeId> {
    std::size_t operator()(const hlg::NodeId& id) const noexcept {
        return std::hash<std::uint64_t>{}(id.value);
    }
};
