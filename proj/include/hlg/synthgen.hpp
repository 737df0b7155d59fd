#pragma once

#include "hlg/retrieve.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hlg {

enum class CandidateStatus : std::uint8_t { Draft, Refined, Accepted, Rejected };

const char* to_string(CandidateStatus status);

// A synthetic multi-hop question/answer pair. Accepted candidates always
// span at least three distinct sources and passed retrieval validation.
struct QaCandidate {
    std::string question;
    std::string answer;
    std::vector<std::pair<NodeId, NodeId>> evidence_chunks;  // (source, chunk)
    std::uint32_t hop_count = 0;  // distinct evidence sources
    CandidateStatus status = CandidateStatus::Draft;
    std::optional<std::string> rejection_reason;

    std::uint32_t distinct_sources() const;
};

// The three relation archetypes question generation cycles through.
enum class RelationKind : std::uint8_t { CauseEffect, Contrast, Complementary };

struct GeneratedQa {
    std::string question;
    std::string answer;
};

struct CritiqueResult {
    bool rejected = false;
    std::string reason;
    std::string question;
    std::string answer;
};

class Generator {
public:
    virtual ~Generator() = default;
    virtual GeneratedQa generate(const std::vector<std::string>& chunk_texts,
                                 RelationKind kind) const = 0;
    virtual CritiqueResult critique(const std::string& question, const std::string& answer,
                                    const std::vector<std::string>& chunk_texts) const = 0;
};

// Deterministic template generator: the question names one salient term per
// chunk, the answer concatenates each chunk's first sentence. Critique trims
// whitespace, guarantees a trailing question mark and rejects empty output.
class TemplateGenerator final : public Generator {
public:
    GeneratedQa generate(const std::vector<std::string>& chunk_texts,
                         RelationKind kind) const override;
    CritiqueResult critique(const std::string& question, const std::string& answer,
                            const std::vector<std::string>& chunk_texts) const override;
};

struct SynthConfig {
    std::uint32_t topics_per_seed = 5;      // m for collect_topics
    double coverage_threshold = 0.8;        // answer key-term coverage gate
    std::uint32_t max_candidates = 0;       // 0: every feasible seed produces one
};

// Top-m topics by embedding similarity to the seed topic, the seed first.
// Topics whose statements all live in the seed's source are excluded from
// the expansion. Throws InsufficientDiversity when fewer than two distinct
// sources are represented.
std::vector<NodeId> collect_topics(NodeId seed_topic, const HlgGraph& graph,
                                   const VectorIndex& topic_index, std::uint32_t m);

// One representative chunk per topic: the chunk backing the topic's
// highest-entity-degree statement (ties by ascending id). Stops before a
// sixth distinct source would be added; throws InsufficientSources when the
// selection spans fewer than three.
std::vector<ChunkNode> select_chunks(const std::vector<NodeId>& topics, const HlgGraph& graph);

// Draft candidate from the selected chunks; `sequence` cycles the relation
// archetype deterministically.
QaCandidate generate_candidate(const std::vector<ChunkNode>& chunks, const Generator& generator,
                               std::uint32_t sequence = 0);

// Two-stage quality gate. Stage 1 lets the generator refine or reject the
// pair. Stage 2 requires at least three evidence sources, then reruns
// retrieval on the refined question and accepts only when the retrieved
// statements cover at least coverage_threshold of the answer's key terms.
// Rejection is a value, not an error.
QaCandidate critique_and_validate(QaCandidate candidate, const HlgGraph& graph,
                                  const Indexes& indexes, const Providers& providers,
                                  const RetrievalConfig& cfg, const Generator& generator,
                                  const SynthConfig& synth);

// Full pipeline over every feasible seed topic in ascending id order.
// Returns all candidates, accepted and rejected, in seed order.
std::vector<QaCandidate> synthesize_dataset(const HlgGraph& graph, const Indexes& indexes,
                                            const Providers& providers,
                                            const RetrievalConfig& cfg,
                                            const SynthConfig& synth,
                                            const Generator& generator);

// Accepted candidates as JSON Lines:
//   {"question","answer","evidence":[{"source","chunk"}],"hops"}
void write_dataset_jsonl(const std::filesystem::path& path,
                         const std::vector<QaCandidate>& candidates);

} // namespace hlg
