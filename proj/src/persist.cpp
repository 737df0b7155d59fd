#include "hlg/persist.hpp"

#include "hlg/text.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <sstream>

namespace hlg {

using nlohmann::json;

namespace {

constexpr const char* kManifestFile = "manifest";
constexpr const char* kNodesFile = "nodes.jsonl";
constexpr const char* kEdgesFile = "edges.jsonl";
constexpr const char* kEmbeddingsFile = "embeddings.bin";

std::string checksum_hex(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorruptFile("missing file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void append_f32_le(std::string& out, float value) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, &value, sizeof(bits));
    out.push_back(static_cast<char>(bits & 0xFF));
    out.push_back(static_cast<char>((bits >> 8) & 0xFF));
    out.push_back(static_cast<char>((bits >> 16) & 0xFF));
    out.push_back(static_cast<char>((bits >> 24) & 0xFF));
}

float read_f32_le(const std::string& bytes, std::size_t offset) {
    std::uint32_t bits = static_cast<std::uint8_t>(bytes[offset]) |
                         (static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[offset + 1])) << 8) |
                         (static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[offset + 2])) << 16) |
                         (static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[offset + 3])) << 24);
    float value = 0.0f;
    std::memcpy(&value, &bits, sizeof(value));
    return value;
}

json id_list(const std::vector<NodeId>& ids) {
    json arr = json::array();
    for (NodeId id : ids) arr.push_back(id.value);
    return arr;
}

json id_list(const std::set<NodeId>& ids) {
    json arr = json::array();
    for (NodeId id : ids) arr.push_back(id.value);
    return arr;
}

} // namespace

// Reaches into HlgGraph internals to serialize and reconstruct state without
// replaying build-phase validation.
class GraphCodec {
public:
    static std::string encode_nodes(const HlgGraph& g) {
        std::ostringstream out;
        for (const auto& [id, kind] : g.kinds_) {
            json row;
            row["id"] = id.value;
            row["kind"] = to_string(kind);
            switch (kind) {
            case NodeKind::Source: {
                const SourceNode& n = g.sources_.at(id);
                row["uri"] = n.uri;
                row["metadata"] = n.metadata;
                break;
            }
            case NodeKind::Chunk: {
                const ChunkNode& n = g.chunks_.at(id);
                row["source"] = n.source.value;
                row["ordinal"] = n.ordinal;
                row["text"] = n.text;
                row["token_count"] = n.token_count;
                break;
            }
            case NodeKind::Topic: {
                const TopicNode& n = g.topics_.at(id);
                row["label"] = n.label;
                row["statements"] = id_list(n.statements);
                row["embedded"] = n.embedding.has_value();
                break;
            }
            case NodeKind::Statement: {
                const StatementNode& n = g.statements_.at(id);
                row["text"] = n.text;
                row["chunk"] = n.chunk.value;
                row["topic"] = n.topic.value;
                row["entities"] = id_list(n.entities);
                row["embedded"] = n.embedding.has_value();
                break;
            }
            case NodeKind::Fact: {
                const FactNode& n = g.facts_.at(id);
                row["subject"] = n.subject.value;
                row["predicate"] = n.predicate;
                row["object"] = n.object.value;
                row["statements"] = id_list(n.supporting_statements);
                break;
            }
            case NodeKind::Entity: {
                const EntityNode& n = g.entities_.at(id);
                row["surface"] = n.surface;
                row["normalized"] = n.normalized;
                row["category"] = n.category;
                break;
            }
            }
            out << row.dump() << '\n';
        }
        return out.str();
    }

    static std::string encode_edges(const HlgGraph& g) {
        std::ostringstream out;
        for (EdgeKind kind : kAllEdgeKinds) {
            for (const auto& [src, dsts] : g.adj(kind).fwd) {
                for (NodeId dst : dsts) {
                    json row;
                    row["src"] = src.value;
                    row["kind"] = to_string(kind);
                    row["dst"] = dst.value;
                    out << row.dump() << '\n';
                }
            }
        }
        return out.str();
    }

    // Embedded statement/topic ids in ascending order; row order of the file.
    static std::vector<NodeId> embedded_ids(const HlgGraph& g) {
        std::vector<NodeId> ids;
        for (const auto& [id, n] : g.statements_) {
            if (n.embedding) ids.push_back(id);
        }
        for (const auto& [id, n] : g.topics_) {
            if (n.embedding) ids.push_back(id);
        }
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    static const Vector& embedding_of(const HlgGraph& g, NodeId id) {
        if (auto it = g.statements_.find(id); it != g.statements_.end()) {
            return *it->second.embedding;
        }
        return *g.topics_.at(id).embedding;
    }

    static void decode_nodes(HlgGraph& g, const std::string& bytes,
                             std::vector<NodeId>& embedded_out) {
        std::istringstream in(bytes);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            json row;
            try {
                row = json::parse(line);
            } catch (const json::exception& e) {
                throw CorruptFile("nodes.jsonl line " + std::to_string(lineno) +
                                  ": " + e.what());
            }
            try {
                decode_node(g, row, embedded_out);
            } catch (const json::exception& e) {
                throw CorruptFile("nodes.jsonl line " + std::to_string(lineno) +
                                  ": " + e.what());
            }
        }
    }

    static void decode_node(HlgGraph& g, const json& row,
                            std::vector<NodeId>& embedded_out) {
        const NodeId id{row.at("id").get<std::uint64_t>()};
        const std::string kind = row.at("kind").get<std::string>();
        if (g.contains(id)) throw CorruptFile("duplicate node id " + std::to_string(id.value));
        if (kind == "source") {
            SourceNode n;
            n.id = id;
            n.uri = row.at("uri").get<std::string>();
            n.metadata = row.at("metadata").get<std::map<std::string, std::string>>();
            g.kinds_[id] = NodeKind::Source;
            g.sources_.emplace(id, std::move(n));
        } else if (kind == "chunk") {
            ChunkNode n;
            n.id = id;
            n.source = NodeId{row.at("source").get<std::uint64_t>()};
            n.ordinal = row.at("ordinal").get<std::uint32_t>();
            n.text = row.at("text").get<std::string>();
            n.token_count = row.at("token_count").get<std::uint32_t>();
            g.kinds_[id] = NodeKind::Chunk;
            g.chunks_.emplace(id, std::move(n));
        } else if (kind == "topic") {
            TopicNode n;
            n.id = id;
            n.label = row.at("label").get<std::string>();
            for (const auto& v : row.at("statements")) {
                n.statements.push_back(NodeId{v.get<std::uint64_t>()});
            }
            if (row.at("embedded").get<bool>()) embedded_out.push_back(id);
            g.kinds_[id] = NodeKind::Topic;
            g.topics_.emplace(id, std::move(n));
        } else if (kind == "statement") {
            StatementNode n;
            n.id = id;
            n.text = row.at("text").get<std::string>();
            n.chunk = NodeId{row.at("chunk").get<std::uint64_t>()};
            n.topic = NodeId{row.at("topic").get<std::uint64_t>()};
            for (const auto& v : row.at("entities")) {
                n.entities.insert(NodeId{v.get<std::uint64_t>()});
            }
            if (row.at("embedded").get<bool>()) embedded_out.push_back(id);
            g.kinds_[id] = NodeKind::Statement;
            g.statements_.emplace(id, std::move(n));
        } else if (kind == "fact") {
            FactNode n;
            n.id = id;
            n.subject = NodeId{row.at("subject").get<std::uint64_t>()};
            n.predicate = row.at("predicate").get<std::string>();
            n.object = NodeId{row.at("object").get<std::uint64_t>()};
            for (const auto& v : row.at("statements")) {
                n.supporting_statements.insert(NodeId{v.get<std::uint64_t>()});
            }
            g.kinds_[id] = NodeKind::Fact;
            g.facts_.emplace(id, std::move(n));
        } else if (kind == "entity") {
            EntityNode n;
            n.id = id;
            n.surface = row.at("surface").get<std::string>();
            n.normalized = row.at("normalized").get<std::string>();
            n.category = row.at("category").get<std::string>();
            g.entity_index_[n.normalized][n.category] = id;
            g.kinds_[id] = NodeKind::Entity;
            g.entities_.emplace(id, std::move(n));
        } else {
            throw CorruptFile("unknown node kind: " + kind);
        }
    }

    static void decode_edges(HlgGraph& g, const std::string& bytes) {
        std::istringstream in(bytes);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            json row;
            try {
                row = json::parse(line);
            } catch (const json::exception& e) {
                throw CorruptFile("edges.jsonl line " + std::to_string(lineno) +
                                  ": " + e.what());
            }
            const NodeId src{row.at("src").get<std::uint64_t>()};
            const NodeId dst{row.at("dst").get<std::uint64_t>()};
            const std::string kind_name = row.at("kind").get<std::string>();
            bool found = false;
            for (EdgeKind kind : kAllEdgeKinds) {
                if (kind_name == to_string(kind)) {
                    if (!g.contains(src) || !g.contains(dst)) {
                        throw CorruptFile("edge endpoint missing at line " +
                                          std::to_string(lineno));
                    }
                    g.add_edge(kind, src, dst);
                    found = true;
                    break;
                }
            }
            if (!found) throw CorruptFile("unknown edge kind: " + kind_name);
        }
    }

    static void rebuild_bookkeeping(HlgGraph& g) {
        for (const auto& [id, c] : g.chunks_) {
            auto& count = g.chunk_count_of_source_[c.source];
            count = std::max(count, c.ordinal + 1);
            auto it = g.last_chunk_of_source_.find(c.source);
            if (it == g.last_chunk_of_source_.end() ||
                g.chunks_.at(it->second).ordinal < c.ordinal) {
                g.last_chunk_of_source_[c.source] = id;
            }
        }
    }

    static void set_embedding_row(HlgGraph& g, NodeId id, Vector v) {
        if (auto it = g.statements_.find(id); it != g.statements_.end()) {
            it->second.embedding = std::move(v);
        } else if (auto jt = g.topics_.find(id); jt != g.topics_.end()) {
            jt->second.embedding = std::move(v);
        } else {
            throw CorruptFile("embedded id is neither statement nor topic");
        }
    }

    static void finish_load(HlgGraph& g, std::uint64_t next_id) {
        g.next_id_ = next_id;
        g.frozen_ = true;
    }
};

PersistManifest persist(const HlgGraph& graph, const std::filesystem::path& dir,
                        const std::string& embedder_tag) {
    std::filesystem::create_directories(dir);

    const std::string nodes = GraphCodec::encode_nodes(graph);
    const std::string edges = GraphCodec::encode_edges(graph);

    const std::vector<NodeId> embedded = GraphCodec::embedded_ids(graph);
    std::size_t dim = 0;
    std::string blob;
    for (NodeId id : embedded) {
        const Vector& v = GraphCodec::embedding_of(graph, id);
        if (dim == 0) {
            dim = v.dim();
            blob.reserve(embedded.size() * dim * 4);
        }
        if (v.dim() != dim) {
            throw DimensionMismatch("persist: embeddings have mixed dimensions");
        }
        for (float x : v.values) append_f32_le(blob, x);
    }

    PersistManifest m;
    m.format_version = kPersistFormatVersion;
    m.dim = dim;
    m.embedder = embedder_tag;
    m.counts = {
        {"source", graph.sources().size()},   {"chunk", graph.chunks().size()},
        {"topic", graph.topics().size()},     {"statement", graph.statements().size()},
        {"fact", graph.facts().size()},       {"entity", graph.entities().size()},
    };
    m.embedding_rows = embedded.size();
    m.next_id = graph.next_id_value();
    m.checksums = {
        {kNodesFile, checksum_hex(nodes)},
        {kEdgesFile, checksum_hex(edges)},
        {kEmbeddingsFile, checksum_hex(blob)},
    };

    json mj;
    mj["format_version"] = m.format_version;
    mj["dim"] = m.dim;
    mj["embedder"] = m.embedder;
    mj["counts"] = m.counts;
    mj["embedding_rows"] = m.embedding_rows;
    mj["next_id"] = m.next_id;
    mj["checksums"] = m.checksums;
    mj["encoding"] = "f32le";

    write_file(dir / kNodesFile, nodes);
    write_file(dir / kEdgesFile, edges);
    write_file(dir / kEmbeddingsFile, blob);
    write_file(dir / kManifestFile, mj.dump(2) + "\n");
    return m;
}

PersistManifest read_manifest(const std::filesystem::path& dir) {
    const std::string bytes = read_file(dir / kManifestFile);
    json mj;
    try {
        mj = json::parse(bytes);
    } catch (const json::exception& e) {
        throw CorruptFile(std::string("manifest: ") + e.what());
    }
    PersistManifest m;
    try {
        m.format_version = mj.at("format_version").get<int>();
        if (m.format_version != kPersistFormatVersion) {
            throw VersionMismatch("unsupported format version " +
                                  std::to_string(m.format_version));
        }
        m.dim = mj.at("dim").get<std::size_t>();
        m.embedder = mj.value("embedder", std::string{});
        m.counts = mj.at("counts").get<std::map<std::string, std::uint64_t>>();
        m.embedding_rows = mj.at("embedding_rows").get<std::uint64_t>();
        m.next_id = mj.at("next_id").get<std::uint64_t>();
        m.checksums = mj.at("checksums").get<std::map<std::string, std::string>>();
    } catch (const json::exception& e) {
        throw CorruptFile(std::string("manifest: ") + e.what());
    }
    return m;
}

HlgGraph load(const std::filesystem::path& dir) {
    const PersistManifest m = read_manifest(dir);

    const std::string nodes = read_file(dir / kNodesFile);
    const std::string edges = read_file(dir / kEdgesFile);
    const std::string blob = read_file(dir / kEmbeddingsFile);

    auto check = [&](const char* name, const std::string& bytes) {
        auto it = m.checksums.find(name);
        if (it == m.checksums.end() || it->second != checksum_hex(bytes)) {
            throw CorruptFile(std::string("checksum mismatch for ") + name);
        }
    };
    check(kNodesFile, nodes);
    check(kEdgesFile, edges);
    check(kEmbeddingsFile, blob);

    HlgGraph g;
    std::vector<NodeId> embedded;
    GraphCodec::decode_nodes(g, nodes, embedded);
    GraphCodec::decode_edges(g, edges);
    GraphCodec::rebuild_bookkeeping(g);

    std::sort(embedded.begin(), embedded.end());
    if (embedded.size() != m.embedding_rows) {
        throw CorruptFile("embedding row count disagrees with manifest");
    }
    if (blob.size() != embedded.size() * m.dim * 4) {
        throw CorruptFile("embeddings.bin size disagrees with manifest");
    }
    std::size_t offset = 0;
    for (NodeId id : embedded) {
        Vector v;
        v.values.resize(m.dim);
        for (std::size_t i = 0; i < m.dim; ++i, offset += 4) {
            v.values[i] = read_f32_le(blob, offset);
        }
        GraphCodec::set_embedding_row(g, id, std::move(v));
    }

    // Referential integrity over node references.
    for (const auto& [id, c] : g.chunks()) {
        if (!g.contains(c.source)) throw CorruptFile("chunk with missing source");
    }
    for (const auto& [id, s] : g.statements()) {
        if (!g.contains(s.chunk) || !g.contains(s.topic)) {
            throw CorruptFile("statement with missing chunk or topic");
        }
        for (NodeId e : s.entities) {
            if (!g.contains(e)) throw CorruptFile("statement with missing entity");
        }
    }
    for (const auto& [id, f] : g.facts()) {
        if (!g.contains(f.subject) || !g.contains(f.object)) {
            throw CorruptFile("fact with missing endpoint");
        }
        for (NodeId s : f.supporting_statements) {
            if (!g.contains(s)) throw CorruptFile("fact with missing statement");
        }
    }

    GraphCodec::finish_load(g, m.next_id);
    return g;
}

} // namespace hlg
