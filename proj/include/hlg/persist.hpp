#pragma once

#include "hlg/graph.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace hlg {

// Durable store layout inside the graph directory:
//   manifest          single JSON document: format version, counts, dim,
//                     embedding row count, next id, per-file checksums
//   nodes.jsonl       one node per line: {"id","kind", kind-specific fields}
//   edges.jsonl       one edge per line: {"src","kind","dst"}
//   embeddings.bin    little-endian f32, row-major; rows are the embedded
//                     statement/topic nodes in ascending NodeId order
struct PersistManifest {
    int format_version = 1;
    std::size_t dim = 0;
    std::string embedder;  // informational tag for the embedding provider
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t embedding_rows = 0;
    std::uint64_t next_id = 1;
    std::map<std::string, std::string> checksums;
};

inline constexpr int kPersistFormatVersion = 1;

// Writes the graph to `dir` (created if absent) and returns the manifest.
// Output bytes are a pure function of graph content.
PersistManifest persist(const HlgGraph& graph, const std::filesystem::path& dir,
                        const std::string& embedder_tag = {});

// Loads a persisted graph; the result is frozen and structurally identical
// to the graph that was persisted, embeddings bit-exact.
// Throws VersionMismatch on format skew and CorruptFile on checksum or
// integrity failures.
HlgGraph load(const std::filesystem::path& dir);

PersistManifest read_manifest(const std::filesystem::path& dir);

} // namespace hlg
