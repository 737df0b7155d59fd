#include "support/fixtures.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

namespace hlg::testsupport {

Vector random_unit_vector(std::mt19937& rng, std::size_t dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> raw(dim);
    double norm = 0.0;
    for (double& x : raw) {
        x = normal(rng);
        norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) norm = 1.0;
    Vector v;
    v.values.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        v.values[i] = static_cast<float>(raw[i] / norm);
    }
    return v;
}

std::vector<Scored> knn_oracle(const VectorIndex& index, const Vector& query, std::size_t k) {
    std::vector<Scored> all;
    for (const auto& [id, v] : index.entries) {
        all.push_back({id, cosine_sim(query, v)});
    }
    std::stable_sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

namespace {

struct OracleState {
    const HlgGraph& graph;
    const Query& query;
    std::map<NodeId, Vector> embeddings;
    std::uint32_t max_depth;
    std::uint32_t neighbor_cap;
    std::set<NodeId> surviving;
    std::map<std::size_t, std::size_t> alive_at_length;
    std::size_t total_paths = 0;

    double score_of(const std::vector<NodeId>& members) const {
        Path path;
        path.statements = members;
        const Vector blended = path_embedding(path, query, embeddings);
        return cosine_sim(query.embedding, blended);
    }

    void visit(const std::vector<NodeId>& members, double score) {
        ++total_paths;
        ++alive_at_length[members.size()];
        if (members.size() >= static_cast<std::size_t>(max_depth) + 1) {
            surviving.insert(members.begin(), members.end());
            return;
        }
        struct Child {
            std::vector<NodeId> members;
            double score;
        };
        std::vector<Child> children;
        for (const auto& [neighbor, overlap] :
             graph.neighbors_by_shared_entities(members.back(), neighbor_cap)) {
            if (std::find(members.begin(), members.end(), neighbor) != members.end()) {
                continue;
            }
            Child child;
            child.members = members;
            child.members.push_back(neighbor);
            child.score = score_of(child.members);
            children.push_back(std::move(child));
        }
        double best = -2.0;
        for (const Child& c : children) best = std::max(best, c.score);
        if (children.empty() || best <= score) {
            surviving.insert(members.begin(), members.end());
            return;
        }
        for (const Child& c : children) visit(c.members, c.score);
    }
};

} // namespace

BeamOracleResult beam_oracle(const std::vector<NodeId>& seeds, const Query& query,
                             const HlgGraph& graph, std::uint32_t max_depth,
                             std::uint32_t neighbor_cap) {
    OracleState state{graph, query, {}, max_depth, neighbor_cap, {}, {}, 0};
    for (const auto& [id, s] : graph.statements()) {
        if (s.embedding) state.embeddings.emplace(id, *s.embedding);
    }
    std::set<NodeId> seed_set(seeds.begin(), seeds.end());
    for (NodeId s : seed_set) {
        state.visit({s}, state.score_of({s}));
    }
    BeamOracleResult result;
    for (NodeId s : seed_set) state.surviving.erase(s);
    result.surviving = std::move(state.surviving);
    for (const auto& [len, count] : state.alive_at_length) {
        result.max_frontier = std::max(result.max_frontier, count);
    }
    result.total_paths = state.total_paths;
    return result;
}

RandomGraph make_random_statement_graph(std::mt19937& rng, std::size_t max_statements,
                                        std::size_t max_entities, std::size_t dim) {
    RandomGraph out;
    HlgGraph& g = out.graph;

    SourceNode source;
    source.uri = "fixture://random";
    const NodeId source_id = g.add_node(std::move(source));
    ChunkNode chunk;
    chunk.source = source_id;
    chunk.ordinal = 0;
    chunk.text = "random fixture chunk";
    chunk.token_count = 3;
    const NodeId chunk_id = g.add_node(std::move(chunk));
    TopicNode topic;
    topic.label = "random fixture";
    const NodeId topic_id = g.add_node(std::move(topic));

    std::uniform_int_distribution<std::size_t> entity_count_dist(1, max_entities);
    const std::size_t entity_count = entity_count_dist(rng);
    for (std::size_t i = 0; i < entity_count; ++i) {
        EntityNode e;
        e.surface = "Entity" + std::to_string(i);
        e.category = "Term";
        out.entity_ids.push_back(g.add_node(std::move(e)).id);
    }

    std::uniform_int_distribution<std::size_t> statement_count_dist(2, max_statements);
    const std::size_t statement_count = statement_count_dist(rng);
    std::uniform_int_distribution<std::size_t> picks_dist(1, std::min<std::size_t>(3, entity_count));
    std::uniform_int_distribution<std::size_t> entity_pick(0, entity_count - 1);
    for (std::size_t i = 0; i < statement_count; ++i) {
        StatementNode s;
        s.text = "statement " + std::to_string(i);
        s.chunk = chunk_id;
        s.topic = topic_id;
        const std::size_t picks = picks_dist(rng);
        for (std::size_t p = 0; p < picks; ++p) {
            s.entities.insert(out.entity_ids[entity_pick(rng)]);
        }
        const NodeId id = g.add_node(std::move(s));
        g.set_statement_embedding(id, random_unit_vector(rng, dim));
        out.statement_ids.push_back(id);
    }
    return out;
}

std::string nonce_word(std::mt19937& rng, std::size_t length) {
    static const char letters[] = "abcdefghijklmnopqrstuvwxyz";
    std::uniform_int_distribution<std::size_t> pick(0, sizeof(letters) - 2);
    std::string out;
    out.reserve(length);
    for (std::size_t i = 0; i < length; ++i) out.push_back(letters[pick(rng)]);
    return out;
}

namespace {

std::string join(const std::vector<std::string>& words, std::size_t begin, std::size_t end,
                 const std::string& sep = " ") {
    std::string out;
    for (std::size_t i = begin; i < end && i < words.size(); ++i) {
        if (!out.empty()) out += sep;
        out += words[i];
    }
    return out;
}

NodeId find_statement_by_text(const HlgGraph& graph, const std::string& text) {
    for (const auto& [id, s] : graph.statements()) {
        if (s.text == text) return id;
    }
    return {};
}

void build_fixture_indexes(HlgGraph& graph, const HashEmbedder& embedder,
                           VectorIndex& statements, VectorIndex& topics) {
    embed_graph(graph, embedder);
    graph.freeze();
    statements = build_statement_index(graph);
    topics = build_topic_index(graph);
}

} // namespace

std::vector<GoldRecord> MultihopFixture::gold_records() const {
    std::vector<GoldRecord> out;
    for (const QueryCase& q : queries) {
        GoldRecord gold;
        gold.question = q.text;
        gold.gold_statement_ids = {q.x, q.y};
        out.push_back(std::move(gold));
    }
    return out;
}

MultihopFixture make_multihop_fixture(std::uint32_t query_count) {
    MultihopFixture fixture;
    std::mt19937 rng(20240817);

    struct Plan {
        std::string entity;
        std::vector<std::string> aspect_a;  // 6 words, query-side heavy
        std::vector<std::string> aspect_b;  // 3 words, the distant hop
        std::vector<std::string> junk;      // distractor-only filler
        std::string x_text;
        std::string y_text;
        std::string distractor;
        std::string query;
    };
    std::vector<Plan> plans;

    for (std::uint32_t qi = 0; qi < query_count; ++qi) {
        Plan plan;
        std::string entity = nonce_word(rng, 9);
        entity[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(entity[0])));
        plan.entity = entity;
        for (int i = 0; i < 6; ++i) plan.aspect_a.push_back(nonce_word(rng, 8));
        for (int i = 0; i < 3; ++i) plan.aspect_b.push_back(nonce_word(rng, 8));
        for (int i = 0; i < 3; ++i) plan.junk.push_back(nonce_word(rng, 8));

        plan.x_text = plan.entity + " " + join(plan.aspect_a, 0, 6) + ".";
        plan.y_text = plan.entity + " " + join(plan.aspect_b, 0, 3) + ".";
        plan.distractor = join(plan.aspect_a, 0, 3) + " " + join(plan.junk, 0, 3) + ".";
        plan.query = "how did " + join(plan.aspect_a, 0, 6) + " relate to " +
                     join(plan.aspect_b, 0, 3) + "?";

        Document doc_x;
        doc_x.id = "docx" + std::to_string(qi);
        doc_x.text = plan.x_text;
        fixture.corpus.push_back(doc_x);

        Document doc_y;
        doc_y.id = "docy" + std::to_string(qi);
        doc_y.text = plan.y_text;
        fixture.corpus.push_back(doc_y);

        Document doc_d;
        doc_d.id = "docd" + std::to_string(qi);
        std::string filler;
        for (int copy = 0; copy < 25; ++copy) {
            if (!filler.empty()) filler.push_back(' ');
            filler += plan.distractor;
        }
        doc_d.text = filler;
        fixture.corpus.push_back(doc_d);

        plans.push_back(std::move(plan));
    }

    const RuleBasedExtractor extractor;
    fixture.graph = build_graph(fixture.corpus, extractor, ChunkingConfig{});
    build_fixture_indexes(fixture.graph, fixture.embedder, fixture.statement_index,
                          fixture.topic_index);

    for (const Plan& plan : plans) {
        MultihopFixture::QueryCase qc;
        qc.text = plan.query;
        qc.x_text = plan.x_text;
        qc.y_text = plan.y_text;
        qc.x = find_statement_by_text(fixture.graph, plan.x_text);
        qc.y = find_statement_by_text(fixture.graph, plan.y_text);
        fixture.queries.push_back(std::move(qc));
    }

    fixture.cfg.k_keyword = 20;
    fixture.cfg.k_vss = 20;
    fixture.cfg.k_topics = 10;
    fixture.cfg.beam_width = 50;
    fixture.cfg.max_depth = 3;
    fixture.cfg.top_k = 10;
    fixture.cfg.tau = 0.005;
    return fixture;
}

void rebind_multihop_fixture(MultihopFixture& fixture, HlgGraph graph) {
    fixture.graph = std::move(graph);
    fixture.statement_index = build_statement_index(fixture.graph);
    fixture.topic_index = build_topic_index(fixture.graph);
    for (MultihopFixture::QueryCase& qc : fixture.queries) {
        qc.x = find_statement_by_text(fixture.graph, qc.x_text);
        qc.y = find_statement_by_text(fixture.graph, qc.y_text);
    }
}

SynthFixture make_synth_fixture() {
    SynthFixture fixture;
    std::mt19937 rng(20240818);

    // Three themes; documents in the same theme share the theme vocabulary,
    // every document adds its own unique terms.
    const std::size_t theme_of_doc[10] = {0, 0, 0, 0, 1, 1, 1, 2, 2, 2};
    std::vector<std::vector<std::string>> theme_words(3);
    for (auto& words : theme_words) {
        for (int i = 0; i < 3; ++i) words.push_back(nonce_word(rng, 8));
    }

    for (std::size_t d = 0; d < 10; ++d) {
        const std::size_t theme = theme_of_doc[d];
        std::string anchor = nonce_word(rng, 9);
        anchor[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(anchor[0])));
        std::vector<std::string> unique;
        for (int i = 0; i < 4; ++i) unique.push_back(nonce_word(rng, 8));

        Document doc;
        doc.id = "doc" + std::to_string(d);
        doc.text = anchor + " " + join(theme_words[theme], 0, 3) + " " +
                   join(unique, 0, 2) + ". " + anchor + " " + join(unique, 2, 4) + " " +
                   theme_words[theme][0] + ".";
        fixture.corpus.push_back(std::move(doc));
    }

    const RuleBasedExtractor extractor;
    fixture.graph = build_graph(fixture.corpus, extractor, ChunkingConfig{});
    build_fixture_indexes(fixture.graph, fixture.embedder, fixture.statement_index,
                          fixture.topic_index);

    fixture.cfg.k_keyword = 50;
    fixture.cfg.k_vss = 50;
    fixture.cfg.k_topics = 10;
    fixture.cfg.top_k = 20;
    fixture.cfg.tau = 0.0;  // validation wants raw coverage, not deduplication
    return fixture;
}

SynthFixture make_synth_fixture_without(const std::string& doc_id) {
    SynthFixture base = make_synth_fixture();
    SynthFixture fixture;
    for (const Document& doc : base.corpus) {
        if (doc.id != doc_id) fixture.corpus.push_back(doc);
    }
    const RuleBasedExtractor extractor;
    fixture.graph = build_graph(fixture.corpus, extractor, ChunkingConfig{});
    build_fixture_indexes(fixture.graph, fixture.embedder, fixture.statement_index,
                          fixture.topic_index);
    fixture.cfg = base.cfg;
    return fixture;
}

DiversityFixture make_diversity_fixture() {
    DiversityFixture fixture;
    std::mt19937 rng(20240819);
    std::uint64_t next_id = 1;
    for (std::size_t cluster = 0; cluster < 20; ++cluster) {
        std::vector<std::string> words;
        for (int i = 0; i < 6; ++i) words.push_back(nonce_word(rng, 8));
        const std::string text = join(words, 0, 6) + ".";
        NodeId best_id;
        double best_score = -1.0;
        for (std::size_t member = 0; member < 5; ++member) {
            ScoredStatement s;
            s.id = NodeId{next_id++};
            s.rank_score = 1.0 - 0.002 * static_cast<double>(fixture.candidates.size()) -
                           0.0001 * static_cast<double>(member);
            fixture.candidates.push_back(s);
            fixture.texts.push_back(text);
            fixture.cluster_of.push_back(cluster);
            if (s.rank_score > best_score) {
                best_score = s.rank_score;
                best_id = s.id;
            }
        }
        fixture.expected_survivors.push_back(best_id);
    }
    return fixture;
}

} // namespace hlg::testsupport
