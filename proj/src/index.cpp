#include "hlg/index.hpp"

#include "hlg/errors.hpp"

#include <algorithm>

namespace hlg {

std::vector<Scored> knn(const VectorIndex& index, const Vector& query, std::size_t k) {
    if (k == 0) throw ConfigError("knn: k must be positive");
    std::vector<Scored> scored;
    scored.reserve(index.entries.size());
    for (const auto& [id, v] : index.entries) {
        scored.push_back({id, cosine_sim(query, v)});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

Vector embed_topic(const TopicNode& topic, const std::vector<std::string>& statement_texts,
                   const Embedder& embedder) {
    if (statement_texts.empty()) return embedder.embed(topic.label);
    std::string input = topic.label;
    for (const std::string& t : statement_texts) {
        input.push_back('\n');
        input.append(t);
    }
    return embedder.embed(input);
}

void embed_graph(HlgGraph& graph, const Embedder& embedder) {
    std::vector<NodeId> statement_ids;
    std::vector<std::string> statement_texts;
    for (const auto& [id, s] : graph.statements()) {
        statement_ids.push_back(id);
        statement_texts.push_back(s.text);
    }
    std::vector<Vector> vs = embedder.embed_batch(statement_texts);
    for (std::size_t i = 0; i < statement_ids.size(); ++i) {
        graph.set_statement_embedding(statement_ids[i], std::move(vs[i]));
    }
    for (const auto& [id, t] : graph.topics()) {
        std::vector<std::string> texts;
        texts.reserve(t.statements.size());
        for (NodeId s : t.statements) texts.push_back(graph.statement(s).text);
        graph.set_topic_embedding(id, embed_topic(t, texts, embedder));
    }
}

VectorIndex build_statement_index(const HlgGraph& graph) {
    VectorIndex index;
    index.kind = IndexKind::StatementIndex;
    for (const auto& [id, s] : graph.statements()) {
        if (!s.embedding) {
            throw MissingEmbedding("statement " + std::to_string(id.value) +
                                   " has no embedding; run embed_graph first");
        }
        index.entries.emplace_back(id, *s.embedding);
    }
    return index;
}

VectorIndex build_topic_index(const HlgGraph& graph) {
    VectorIndex index;
    index.kind = IndexKind::TopicIndex;
    for (const auto& [id, t] : graph.topics()) {
        if (!t.embedding) {
            throw MissingEmbedding("topic " + std::to_string(id.value) +
                                   " has no embedding; run embed_graph first");
        }
        index.entries.emplace_back(id, *t.embedding);
    }
    return index;
}

} // namespace hlg
