#pragma once

#include "hlg/ids.hpp"

#include <cstdint>

namespace hlg {

// Which retrieval stage first produced a candidate; diagnostics only.
enum class Origin : std::uint8_t {
    Keyword,
    Vss,
    Beam,
    Topic,
};

const char* to_string(Origin origin);

struct ScoredStatement {
    NodeId id;
    std::uint32_t kw_score = 0;  // matched keyword count, <= |K|
    double sim = 0.0;            // cosine(query, statement embedding)
    double rank_score = 0.0;     // reranker output; final ordering key
    Origin origin = Origin::Vss;

    // Lineage, filled by the pipelines for result reporting.
    NodeId chunk;
    NodeId source;
};

} // namespace hlg
