#pragma once

#include "hlg/retrieve.hpp"

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace hlg {

// Gold evidence for one query. At least one gold unit must be present:
// statement ids (internal fixtures), chunk ids, or key terms.
struct GoldRecord {
    std::string question;
    std::set<NodeId> gold_statement_ids;
    std::set<NodeId> gold_chunk_ids;
    std::set<std::string> gold_terms;

    bool empty() const {
        return gold_statement_ids.empty() && gold_chunk_ids.empty() && gold_terms.empty();
    }
};

// Fraction of gold units present in the retrieved set. Resolution order:
// statement ids; else chunk ids via statement lineage; else key terms over
// retrieved statement texts. Throws EmptyGold when no gold unit exists.
double evidence_recall(const std::vector<ScoredStatement>& retrieved, const GoldRecord& gold,
                       const HlgGraph& graph);

// Fraction of retrieved units that are gold (the precision analogue).
double evidence_precision(const std::vector<ScoredStatement>& retrieved, const GoldRecord& gold,
                          const HlgGraph& graph);

// Chunk-pipeline variants, over chunk ids.
double evidence_recall_chunks(const std::vector<ChunkNode>& retrieved, const GoldRecord& gold);
double evidence_precision_chunks(const std::vector<ChunkNode>& retrieved, const GoldRecord& gold);

// Named pipelines the harness and CLI can run.
//   statement        StatementGraphRAG
//   topic            TopicGraphRAG
//   chunk-statement  StatementGraphRAG mapped to parent chunks
//   chunk-topic      TopicGraphRAG mapped to parent chunks
//   vss              plain vector search at the same final budget
struct PipelineResult {
    std::vector<ScoredStatement> statements;
    std::vector<ChunkNode> chunks;  // chunk pipelines only
    bool chunk_mode = false;
};

PipelineResult run_pipeline(const std::string& name, const std::string& query_text,
                            const HlgGraph& graph, const Indexes& indexes,
                            const Providers& providers, const RetrievalConfig& cfg);

bool is_known_pipeline(const std::string& name);

struct PipelineScore {
    std::string name;
    std::vector<double> recalls;     // one per query
    std::vector<double> precisions;
    double mean_recall = 0.0;
    double mean_precision = 0.0;
};

struct PairwiseCount {
    std::string first;
    std::string second;
    std::uint32_t first_wins = 0;   // higher recall
    std::uint32_t second_wins = 0;
    std::uint32_t ties = 0;
};

struct EvalReport {
    std::uint32_t query_count = 0;
    std::vector<PipelineScore> pipelines;
    std::vector<PairwiseCount> pairwise;  // each unordered pipeline pair
};

// Runs every named pipeline on every query and scores it against gold.
// Pairwise comparison awards the win to the pipeline with higher recall,
// tie on equality. Throws ConfigError on an unknown pipeline name.
EvalReport run_benchmark(const HlgGraph& graph, const std::vector<GoldRecord>& queries,
                         const std::vector<std::string>& pipelines, const Indexes& indexes,
                         const Providers& providers, const RetrievalConfig& cfg);

std::string report_to_json(const EvalReport& report);
void print_report_table(const EvalReport& report, std::ostream& out);

// Gold file: JSON Lines {"question", "gold_chunks":[ids], "gold_terms":[text]}
std::vector<GoldRecord> read_gold_jsonl(const std::filesystem::path& path);

} // namespace hlg
