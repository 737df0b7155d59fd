#include "hlg/retrieve.hpp"

#include "hlg/errors.hpp"
#include "hlg/text.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace hlg {

void RetrievalConfig::validate() const {
    auto positive = [](std::uint32_t v, const char* name) {
        if (v == 0) throw ConfigError(std::string(name) + " must be positive");
    };
    positive(k_keyword, "k_keyword");
    positive(k_vss, "k_vss");
    positive(k_topics, "k_topics");
    positive(beam_width, "beam_width");
    positive(max_depth, "max_depth");
    positive(top_k, "top_k");
    positive(neighbor_cap, "neighbor_cap");
    positive(max_chunks, "max_chunks");
    if (tau < 0.0 || tau >= 1.0) throw ConfigError("tau must be in [0, 1)");
}

std::set<std::string> extract_keywords(const std::string& query_text, const HlgGraph& graph,
                                       const SynonymMap* synonyms) {
    std::set<std::string> keywords;
    const std::vector<std::string> tokens = split_whitespace(query_text);
    if (tokens.empty()) return keywords;

    std::unordered_map<std::string, std::string> variant_to_canonical;
    if (synonyms) {
        for (const auto& [canonical, variants] : *synonyms) {
            const std::string canon = normalize_surface(canonical);
            for (const std::string& v : variants) {
                variant_to_canonical.emplace(normalize_surface(v), canon);
            }
        }
    }

    auto matches_entity = [&](const std::string& key) {
        return !key.empty() && !graph.entities_by_normalized(key).empty();
    };

    std::vector<bool> consumed(tokens.size(), false);
    const std::size_t max_n = 4;
    for (std::size_t n = std::min(max_n, tokens.size()); n >= 1; --n) {
        for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
            bool free = true;
            for (std::size_t j = i; j < i + n; ++j) {
                if (consumed[j]) { free = false; break; }
            }
            if (!free) continue;
            std::string span = tokens[i];
            for (std::size_t j = i + 1; j < i + n; ++j) {
                span.push_back(' ');
                span += tokens[j];
            }
            const std::string key = normalize_surface(span);
            std::string matched;
            if (matches_entity(key)) {
                matched = key;
            } else if (auto it = variant_to_canonical.find(key);
                       it != variant_to_canonical.end() && matches_entity(it->second)) {
                matched = it->second;
            }
            if (!matched.empty()) {
                keywords.insert(matched);
                for (std::size_t j = i; j < i + n; ++j) consumed[j] = true;
            }
        }
        if (n == 1) break;
    }
    return keywords;
}

Query make_query(const std::string& text, const HlgGraph& graph, const Embedder& embedder,
                 const SynonymMap* synonyms) {
    Query q;
    q.text = text;
    q.embedding = embedder.embed(text);
    q.keywords = extract_keywords(text, graph, synonyms);
    return q;
}

namespace {

const Vector& statement_embedding(const HlgGraph& graph, NodeId id) {
    const StatementNode& s = graph.statement(id);
    if (!s.embedding) {
        throw MissingEmbedding("statement " + std::to_string(id.value) +
                               " has no embedding");
    }
    return *s.embedding;
}

std::uint32_t matched_keywords(const HlgGraph& graph, const StatementNode& stmt,
                               const std::set<std::string>& keywords) {
    if (keywords.empty()) return 0;
    std::uint32_t count = 0;
    std::set<std::string> seen;
    for (NodeId e : stmt.entities) {
        const std::string& normalized = graph.entity(e).normalized;
        if (keywords.count(normalized) && seen.insert(normalized).second) ++count;
    }
    return count;
}

// Shared softmax-blend core; members and sims are parallel. Accumulates in
// double and casts once so engine scores match the public path_embedding
// bit for bit.
Vector blend_members(const std::vector<const Vector*>& members,
                     const std::vector<double>& sims,
                     std::vector<double>* weights_out) {
    if (members.size() == 1) {
        if (weights_out) *weights_out = {1.0};
        return *members.front();
    }
    double max_sim = sims.front();
    for (double s : sims) max_sim = std::max(max_sim, s);
    std::vector<double> weights(sims.size());
    double z = 0.0;
    for (std::size_t i = 0; i < sims.size(); ++i) {
        weights[i] = std::exp(sims[i] - max_sim);
        z += weights[i];
    }
    for (double& w : weights) w /= z;

    const std::size_t dim = members.front()->dim();
    std::vector<double> acc(dim, 0.0);
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (members[i]->dim() != dim) {
            throw DimensionMismatch("path members have mixed dimensions");
        }
        for (std::size_t d = 0; d < dim; ++d) {
            acc[d] += weights[i] * members[i]->values[d];
        }
    }
    Vector out;
    out.values.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) out.values[d] = static_cast<float>(acc[d]);
    if (weights_out) *weights_out = std::move(weights);
    return out;
}

// Per-query scoring context caching statement similarities.
struct ScoreContext {
    const HlgGraph& graph;
    const Query& query;
    mutable std::unordered_map<NodeId, double> sim_cache;

    double sim(NodeId id) const {
        auto it = sim_cache.find(id);
        if (it != sim_cache.end()) return it->second;
        const double s = cosine_sim(query.embedding, statement_embedding(graph, id));
        sim_cache.emplace(id, s);
        return s;
    }

    double path_score(const std::vector<NodeId>& members) const {
        if (members.size() == 1) return sim(members.front());
        std::vector<const Vector*> vecs;
        std::vector<double> sims;
        vecs.reserve(members.size());
        sims.reserve(members.size());
        for (NodeId id : members) {
            vecs.push_back(&statement_embedding(graph, id));
            sims.push_back(sim(id));
        }
        const Vector blended = blend_members(vecs, sims, nullptr);
        return cosine_sim(query.embedding, blended);
    }
};

} // namespace

std::vector<ScoredStatement> keyword_retrieve(const Query& query, const HlgGraph& graph,
                                              std::uint32_t k) {
    if (k == 0) throw ConfigError("keyword_retrieve: k must be positive");
    std::vector<ScoredStatement> out;
    if (query.keywords.empty()) return out;

    std::unordered_set<NodeId> candidates;
    for (const std::string& keyword : query.keywords) {
        for (NodeId e : graph.entities_by_normalized(keyword)) {
            for (NodeId s : graph.in_edges(EdgeKind::MentionsEntity, e)) {
                candidates.insert(s);
            }
        }
    }

    out.reserve(candidates.size());
    for (NodeId id : candidates) {
        const StatementNode& stmt = graph.statement(id);
        ScoredStatement scored;
        scored.id = id;
        scored.kw_score = matched_keywords(graph, stmt, query.keywords);
        scored.sim = cosine_sim(query.embedding, statement_embedding(graph, id));
        scored.rank_score = scored.sim;
        scored.origin = Origin::Keyword;
        out.push_back(scored);
    }
    std::sort(out.begin(), out.end(), [](const ScoredStatement& a, const ScoredStatement& b) {
        if (a.kw_score != b.kw_score) return a.kw_score > b.kw_score;
        if (a.sim != b.sim) return a.sim > b.sim;
        return a.id < b.id;
    });
    if (out.size() > k) out.resize(k);
    return out;
}

std::vector<ScoredStatement> vss_retrieve(const Query& query, const VectorIndex& index,
                                          std::uint32_t k) {
    if (k == 0) throw ConfigError("vss_retrieve: k must be positive");
    std::vector<ScoredStatement> out;
    for (const Scored& hit : knn(index, query.embedding, k)) {
        ScoredStatement scored;
        scored.id = hit.id;
        scored.sim = hit.score;
        scored.rank_score = hit.score;
        scored.origin = Origin::Vss;
        out.push_back(scored);
    }
    return out;
}

Vector path_embedding(const Path& path, const Query& query,
                      const std::map<NodeId, Vector>& embeddings,
                      std::vector<double>* weights_out) {
    if (path.statements.empty()) throw ConfigError("path_embedding: empty path");
    std::vector<const Vector*> members;
    std::vector<double> sims;
    members.reserve(path.statements.size());
    sims.reserve(path.statements.size());
    for (NodeId id : path.statements) {
        auto it = embeddings.find(id);
        if (it == embeddings.end()) {
            throw MissingEmbedding("path member " + std::to_string(id.value) +
                                   " has no embedding");
        }
        members.push_back(&it->second);
        sims.push_back(cosine_sim(query.embedding, it->second));
    }
    return blend_members(members, sims, weights_out);
}

std::set<NodeId> beam_search(const std::vector<NodeId>& seeds, const Query& query,
                             const HlgGraph& graph, const RetrievalConfig& cfg) {
    cfg.validate();
    std::set<NodeId> surviving;
    if (seeds.empty()) return surviving;

    const ScoreContext ctx{graph, query, {}};

    struct BeamPath {
        std::vector<NodeId> statements;
        double score = 0.0;
    };
    auto path_less = [](const BeamPath& a, const BeamPath& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.statements < b.statements;
    };

    std::set<NodeId> seed_set(seeds.begin(), seeds.end());
    std::vector<BeamPath> active;
    active.reserve(seed_set.size());
    for (NodeId s : seed_set) {
        active.push_back({{s}, ctx.sim(s)});
    }

    const std::size_t max_len = static_cast<std::size_t>(cfg.max_depth) + 1;
    auto finalize = [&](const BeamPath& p) {
        for (NodeId id : p.statements) surviving.insert(id);
    };

    while (!active.empty()) {
        std::sort(active.begin(), active.end(), path_less);
        if (active.size() > cfg.beam_width) active.resize(cfg.beam_width);

        std::vector<BeamPath> next_active;
        for (const BeamPath& path : active) {
            if (path.statements.size() >= max_len) {
                finalize(path);
                continue;
            }
            const NodeId tail = path.statements.back();
            std::vector<BeamPath> children;
            for (const auto& [neighbor, overlap] :
                 graph.neighbors_by_shared_entities(tail, cfg.neighbor_cap)) {
                if (std::find(path.statements.begin(), path.statements.end(), neighbor) !=
                    path.statements.end()) {
                    continue;
                }
                BeamPath child;
                child.statements = path.statements;
                child.statements.push_back(neighbor);
                child.score = ctx.path_score(child.statements);
                children.push_back(std::move(child));
            }
            double best_child = -2.0;
            for (const BeamPath& c : children) best_child = std::max(best_child, c.score);
            if (children.empty() || best_child <= path.score) {
                finalize(path);
                continue;
            }
            for (BeamPath& c : children) next_active.push_back(std::move(c));
        }
        active = std::move(next_active);
    }

    for (NodeId s : seed_set) surviving.erase(s);
    return surviving;
}

namespace {

ScoredStatement make_scored(const HlgGraph& graph, const ScoreContext& ctx,
                            const Query& query, NodeId id, Origin origin) {
    ScoredStatement scored;
    scored.id = id;
    scored.kw_score = matched_keywords(graph, graph.statement(id), query.keywords);
    scored.sim = ctx.sim(id);
    scored.rank_score = scored.sim;
    scored.origin = origin;
    return scored;
}

// Shared final stage: rerank, diversity-filter at tau, truncate, attach
// lineage.
std::vector<ScoredStatement> finish_pipeline(const Query& query, const HlgGraph& graph,
                                             const Providers& providers,
                                             const RetrievalConfig& cfg,
                                             std::vector<ScoredStatement> pool) {
    std::vector<std::string> texts;
    texts.reserve(pool.size());
    for (const ScoredStatement& s : pool) texts.push_back(graph.statement(s.id).text);

    const EmbeddingReranker fallback{*providers.embedder};
    const Reranker& reranker = providers.reranker ? *providers.reranker : fallback;
    std::vector<ScoredStatement> ranked = rerank(query.text, std::move(pool), texts, reranker);

    if (cfg.tau > 0.0) {
        std::vector<std::string> ranked_texts;
        ranked_texts.reserve(ranked.size());
        for (const ScoredStatement& s : ranked) {
            ranked_texts.push_back(graph.statement(s.id).text);
        }
        ranked = diversity_filter(ranked, ranked_texts, cfg.tau, providers.stopwords);
    }
    if (ranked.size() > cfg.top_k) ranked.resize(cfg.top_k);

    for (ScoredStatement& s : ranked) {
        const auto [chunk, source] = graph.lineage(s.id);
        s.chunk = chunk;
        s.source = source;
    }
    return ranked;
}

void require_providers(const Providers& providers, const Indexes& indexes,
                       bool need_topics) {
    if (!providers.embedder) throw ConfigError("providers.embedder is required");
    if (!indexes.statements) throw ConfigError("statement index is required");
    if (need_topics && !indexes.topics) throw ConfigError("topic index is required");
}

} // namespace

std::vector<ScoredStatement> statement_graph_rag(const std::string& query_text,
                                                 const HlgGraph& graph, const Indexes& indexes,
                                                 const Providers& providers,
                                                 const RetrievalConfig& cfg,
                                                 RetrievalTrace* trace) {
    cfg.validate();
    require_providers(providers, indexes, false);
    const Query query = make_query(query_text, graph, *providers.embedder, providers.synonyms);
    const ScoreContext ctx{graph, query, {}};

    std::map<NodeId, ScoredStatement> pool;
    for (ScoredStatement& s : keyword_retrieve(query, graph, cfg.k_keyword)) {
        if (trace) trace->keyword_ids.insert(s.id);
        pool.emplace(s.id, s);
    }
    for (ScoredStatement& s : vss_retrieve(query, *indexes.statements, cfg.k_vss)) {
        if (trace) trace->vss_ids.insert(s.id);
        ScoredStatement entry = s;
        entry.kw_score = matched_keywords(graph, graph.statement(s.id), query.keywords);
        pool.emplace(s.id, entry);  // keyword entry wins when present in both
    }

    std::vector<NodeId> seeds;
    seeds.reserve(pool.size());
    for (const auto& [id, s] : pool) seeds.push_back(id);
    if (trace) trace->init_ids.insert(seeds.begin(), seeds.end());

    const std::set<NodeId> beam = beam_search(seeds, query, graph, cfg);
    for (NodeId id : beam) {
        if (trace) trace->beam_ids.insert(id);
        pool.emplace(id, make_scored(graph, ctx, query, id, Origin::Beam));
    }

    std::vector<ScoredStatement> final_pool;
    final_pool.reserve(pool.size());
    for (auto& [id, s] : pool) {
        if (trace) trace->final_ids.insert(id);
        final_pool.push_back(s);
    }
    return finish_pipeline(query, graph, providers, cfg, std::move(final_pool));
}

std::vector<ScoredStatement> topic_graph_rag(const std::string& query_text,
                                             const HlgGraph& graph, const Indexes& indexes,
                                             const Providers& providers,
                                             const RetrievalConfig& cfg,
                                             RetrievalTrace* trace) {
    cfg.validate();
    require_providers(providers, indexes, true);
    const Query query = make_query(query_text, graph, *providers.embedder, providers.synonyms);
    const ScoreContext ctx{graph, query, {}};

    std::map<NodeId, ScoredStatement> pool;

    // Stage 1, top-down: topic discovery expanded to member statements.
    for (const Scored& hit : knn(*indexes.topics, query.embedding, cfg.k_topics)) {
        if (trace) trace->topic_ids.insert(hit.id);
        for (NodeId s : graph.statements_of_topic(hit.id)) {
            if (trace) trace->topic_statement_ids.insert(s);
            pool.emplace(s, make_scored(graph, ctx, query, s, Origin::Topic));
        }
    }

    // Stage 2, bottom-up: keyword-matched statements.
    for (ScoredStatement& s : keyword_retrieve(query, graph, cfg.k_keyword)) {
        if (trace) trace->keyword_ids.insert(s.id);
        pool.emplace(s.id, s);
    }

    std::vector<NodeId> seeds;
    seeds.reserve(pool.size());
    for (const auto& [id, s] : pool) seeds.push_back(id);
    if (trace) trace->init_ids.insert(seeds.begin(), seeds.end());

    // Stage 3: beam expansion over the merged set.
    const std::set<NodeId> beam = beam_search(seeds, query, graph, cfg);
    for (NodeId id : beam) {
        if (trace) trace->beam_ids.insert(id);
        pool.emplace(id, make_scored(graph, ctx, query, id, Origin::Beam));
    }

    // Stage 4: rerank and truncate.
    std::vector<ScoredStatement> final_pool;
    final_pool.reserve(pool.size());
    for (auto& [id, s] : pool) {
        if (trace) trace->final_ids.insert(id);
        final_pool.push_back(s);
    }
    return finish_pipeline(query, graph, providers, cfg, std::move(final_pool));
}

std::vector<ChunkNode> map_to_chunks(const std::vector<ScoredStatement>& results,
                                     const HlgGraph& graph, std::uint32_t max_chunks,
                                     double tau, const StopwordSet* stopwords) {
    if (max_chunks == 0) throw ConfigError("map_to_chunks: max_chunks must be positive");

    std::vector<NodeId> chunk_ids;      // first-appearance rank order
    std::vector<std::string> texts;
    std::vector<double> scores;
    std::unordered_set<NodeId> seen;
    for (const ScoredStatement& s : results) {
        const NodeId chunk_id = graph.statement(s.id).chunk;
        if (!seen.insert(chunk_id).second) continue;
        chunk_ids.push_back(chunk_id);
        texts.push_back(graph.chunk(chunk_id).text);
        scores.push_back(s.rank_score);  // results are rank-ordered
    }

    std::vector<ChunkNode> out;
    for (std::size_t idx : diversity_filter_indices(texts, scores, chunk_ids, tau, stopwords)) {
        if (out.size() >= max_chunks) break;
        out.push_back(graph.chunk(chunk_ids[idx]));
    }
    return out;
}

} // namespace hlg
