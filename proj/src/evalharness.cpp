#include "hlg/evalharness.hpp"

#include "hlg/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <unordered_set>

namespace hlg {

using nlohmann::json;

namespace {

void require_gold(const GoldRecord& gold) {
    if (gold.empty()) throw EmptyGold("gold record has no gold units: " + gold.question);
}

std::set<NodeId> retrieved_chunk_ids(const std::vector<ScoredStatement>& retrieved,
                                     const HlgGraph& graph) {
    std::set<NodeId> ids;
    for (const ScoredStatement& s : retrieved) {
        ids.insert(graph.statement(s.id).chunk);
    }
    return ids;
}

std::unordered_set<std::string> retrieved_terms(const std::vector<ScoredStatement>& retrieved,
                                                const HlgGraph& graph) {
    std::unordered_set<std::string> terms;
    for (const ScoredStatement& s : retrieved) {
        for (std::string& t : preprocess_statement(graph.statement(s.id).text)) {
            terms.insert(std::move(t));
        }
    }
    return terms;
}

double ratio(std::size_t hits, std::size_t total) {
    return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

} // namespace

double evidence_recall(const std::vector<ScoredStatement>& retrieved, const GoldRecord& gold,
                       const HlgGraph& graph) {
    require_gold(gold);
    if (!gold.gold_statement_ids.empty()) {
        std::size_t hits = 0;
        std::set<NodeId> ids;
        for (const ScoredStatement& s : retrieved) ids.insert(s.id);
        for (NodeId g : gold.gold_statement_ids) hits += ids.count(g);
        return ratio(hits, gold.gold_statement_ids.size());
    }
    if (!gold.gold_chunk_ids.empty()) {
        const std::set<NodeId> ids = retrieved_chunk_ids(retrieved, graph);
        std::size_t hits = 0;
        for (NodeId g : gold.gold_chunk_ids) hits += ids.count(g);
        return ratio(hits, gold.gold_chunk_ids.size());
    }
    const auto terms = retrieved_terms(retrieved, graph);
    std::size_t hits = 0;
    for (const std::string& t : gold.gold_terms) hits += terms.count(t);
    return ratio(hits, gold.gold_terms.size());
}

double evidence_precision(const std::vector<ScoredStatement>& retrieved, const GoldRecord& gold,
                          const HlgGraph& graph) {
    require_gold(gold);
    if (retrieved.empty()) return 0.0;
    if (!gold.gold_statement_ids.empty()) {
        std::size_t hits = 0;
        for (const ScoredStatement& s : retrieved) {
            hits += gold.gold_statement_ids.count(s.id);
        }
        return ratio(hits, retrieved.size());
    }
    if (!gold.gold_chunk_ids.empty()) {
        const std::set<NodeId> ids = retrieved_chunk_ids(retrieved, graph);
        std::size_t hits = 0;
        for (NodeId c : ids) hits += gold.gold_chunk_ids.count(c);
        return ratio(hits, ids.size());
    }
    // Term gold: fraction of retrieved statements containing a gold term.
    std::size_t hits = 0;
    for (const ScoredStatement& s : retrieved) {
        for (const std::string& t : preprocess_statement(graph.statement(s.id).text)) {
            if (gold.gold_terms.count(t)) {
                ++hits;
                break;
            }
        }
    }
    return ratio(hits, retrieved.size());
}

double evidence_recall_chunks(const std::vector<ChunkNode>& retrieved, const GoldRecord& gold) {
    require_gold(gold);
    if (gold.gold_chunk_ids.empty()) {
        throw EmptyGold("chunk pipeline requires gold_chunk_ids: " + gold.question);
    }
    std::set<NodeId> ids;
    for (const ChunkNode& c : retrieved) ids.insert(c.id);
    std::size_t hits = 0;
    for (NodeId g : gold.gold_chunk_ids) hits += ids.count(g);
    return ratio(hits, gold.gold_chunk_ids.size());
}

double evidence_precision_chunks(const std::vector<ChunkNode>& retrieved,
                                 const GoldRecord& gold) {
    require_gold(gold);
    if (gold.gold_chunk_ids.empty()) {
        throw EmptyGold("chunk pipeline requires gold_chunk_ids: " + gold.question);
    }
    if (retrieved.empty()) return 0.0;
    std::size_t hits = 0;
    for (const ChunkNode& c : retrieved) hits += gold.gold_chunk_ids.count(c.id);
    return ratio(hits, retrieved.size());
}

bool is_known_pipeline(const std::string& name) {
    return name == "statement" || name == "topic" || name == "chunk-statement" ||
           name == "chunk-topic" || name == "vss";
}

PipelineResult run_pipeline(const std::string& name, const std::string& query_text,
                            const HlgGraph& graph, const Indexes& indexes,
                            const Providers& providers, const RetrievalConfig& cfg) {
    PipelineResult result;
    if (name == "statement") {
        result.statements = statement_graph_rag(query_text, graph, indexes, providers, cfg);
    } else if (name == "topic") {
        result.statements = topic_graph_rag(query_text, graph, indexes, providers, cfg);
    } else if (name == "chunk-statement" || name == "chunk-topic") {
        result.statements =
            name == "chunk-statement"
                ? statement_graph_rag(query_text, graph, indexes, providers, cfg)
                : topic_graph_rag(query_text, graph, indexes, providers, cfg);
        result.chunks =
            map_to_chunks(result.statements, graph, cfg.max_chunks, cfg.tau, providers.stopwords);
        result.chunk_mode = true;
    } else if (name == "vss") {
        // Plain vector search at the same final budget: the naive baseline.
        if (!providers.embedder) throw ConfigError("providers.embedder is required");
        if (!indexes.statements) throw ConfigError("statement index is required");
        const Query query =
            make_query(query_text, graph, *providers.embedder, providers.synonyms);
        result.statements = vss_retrieve(query, *indexes.statements, cfg.top_k);
        for (ScoredStatement& s : result.statements) {
            const auto [chunk, source] = graph.lineage(s.id);
            s.chunk = chunk;
            s.source = source;
        }
    } else {
        throw ConfigError("unknown pipeline: " + name);
    }
    return result;
}

EvalReport run_benchmark(const HlgGraph& graph, const std::vector<GoldRecord>& queries,
                         const std::vector<std::string>& pipelines, const Indexes& indexes,
                         const Providers& providers, const RetrievalConfig& cfg) {
    for (const std::string& name : pipelines) {
        if (!is_known_pipeline(name)) throw ConfigError("unknown pipeline: " + name);
    }
    EvalReport report;
    report.query_count = static_cast<std::uint32_t>(queries.size());

    for (const std::string& name : pipelines) {
        PipelineScore score;
        score.name = name;
        for (const GoldRecord& gold : queries) {
            const PipelineResult result =
                run_pipeline(name, gold.question, graph, indexes, providers, cfg);
            double recall = 0.0, precision = 0.0;
            if (result.chunk_mode) {
                recall = evidence_recall_chunks(result.chunks, gold);
                precision = evidence_precision_chunks(result.chunks, gold);
            } else {
                recall = evidence_recall(result.statements, gold, graph);
                precision = evidence_precision(result.statements, gold, graph);
            }
            score.recalls.push_back(recall);
            score.precisions.push_back(precision);
        }
        double recall_sum = 0.0, precision_sum = 0.0;
        for (double r : score.recalls) recall_sum += r;
        for (double p : score.precisions) precision_sum += p;
        if (!queries.empty()) {
            score.mean_recall = recall_sum / static_cast<double>(queries.size());
            score.mean_precision = precision_sum / static_cast<double>(queries.size());
        }
        report.pipelines.push_back(std::move(score));
    }

    for (std::size_t i = 0; i < report.pipelines.size(); ++i) {
        for (std::size_t j = i + 1; j < report.pipelines.size(); ++j) {
            PairwiseCount pc;
            pc.first = report.pipelines[i].name;
            pc.second = report.pipelines[j].name;
            for (std::size_t q = 0; q < queries.size(); ++q) {
                const double a = report.pipelines[i].recalls[q];
                const double b = report.pipelines[j].recalls[q];
                if (a > b) {
                    ++pc.first_wins;
                } else if (b > a) {
                    ++pc.second_wins;
                } else {
                    ++pc.ties;
                }
            }
            report.pairwise.push_back(pc);
        }
    }
    return report;
}

std::string report_to_json(const EvalReport& report) {
    json j;
    j["query_count"] = report.query_count;
    json pipelines = json::array();
    for (const PipelineScore& p : report.pipelines) {
        json row;
        row["name"] = p.name;
        row["mean_recall"] = p.mean_recall;
        row["mean_precision"] = p.mean_precision;
        row["recalls"] = p.recalls;
        row["precisions"] = p.precisions;
        pipelines.push_back(row);
    }
    j["pipelines"] = pipelines;
    json pairwise = json::array();
    for (const PairwiseCount& pc : report.pairwise) {
        pairwise.push_back({{"first", pc.first},
                            {"second", pc.second},
                            {"first_wins", pc.first_wins},
                            {"second_wins", pc.second_wins},
                            {"ties", pc.ties}});
    }
    j["pairwise"] = pairwise;
    return j.dump(2);
}

void print_report_table(const EvalReport& report, std::ostream& out) {
    out << std::left << std::setw(18) << "pipeline" << std::right << std::setw(12)
        << "mean recall" << std::setw(16) << "mean precision" << "\n";
    for (const PipelineScore& p : report.pipelines) {
        out << std::left << std::setw(18) << p.name << std::right << std::setw(12)
            << std::fixed << std::setprecision(4) << p.mean_recall << std::setw(16)
            << p.mean_precision << "\n";
    }
    if (!report.pairwise.empty()) {
        out << "\n" << std::left << std::setw(30) << "pair" << std::right << std::setw(8)
            << "win" << std::setw(8) << "loss" << std::setw(8) << "tie" << "\n";
        for (const PairwiseCount& pc : report.pairwise) {
            out << std::left << std::setw(30) << (pc.first + " vs " + pc.second)
                << std::right << std::setw(8) << pc.first_wins << std::setw(8)
                << pc.second_wins << std::setw(8) << pc.ties << "\n";
        }
    }
}

std::vector<GoldRecord> read_gold_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read gold file: " + path.string());
    std::vector<GoldRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json row = json::parse(line);
            GoldRecord gold;
            gold.question = row.at("question").get<std::string>();
            if (row.contains("gold_chunks")) {
                for (const auto& v : row.at("gold_chunks")) {
                    gold.gold_chunk_ids.insert(NodeId{v.get<std::uint64_t>()});
                }
            }
            if (row.contains("gold_terms")) {
                for (const auto& v : row.at("gold_terms")) {
                    gold.gold_terms.insert(v.get<std::string>());
                }
            }
            if (row.contains("gold_statements")) {
                for (const auto& v : row.at("gold_statements")) {
                    gold.gold_statement_ids.insert(NodeId{v.get<std::uint64_t>()});
                }
            }
            if (gold.empty()) {
                throw EmptyGold("gold line " + std::to_string(lineno) + " has no gold units");
            }
            out.push_back(std::move(gold));
        } catch (const json::exception& e) {
            throw ConfigError("gold line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

} // namespace hlg
