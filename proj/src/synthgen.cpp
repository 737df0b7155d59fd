#include "hlg/synthgen.hpp"

#include "hlg/errors.hpp"
#include "hlg/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <unordered_set>

namespace hlg {

using nlohmann::json;

const char* to_string(CandidateStatus status) {
    switch (status) {
    case CandidateStatus::Draft: return "draft";
    case CandidateStatus::Refined: return "refined";
    case CandidateStatus::Accepted: return "accepted";
    case CandidateStatus::Rejected: return "rejected";
    }
    return "?";
}

std::uint32_t QaCandidate::distinct_sources() const {
    std::set<NodeId> sources;
    for (const auto& [source, chunk] : evidence_chunks) sources.insert(source);
    return static_cast<std::uint32_t>(sources.size());
}

namespace {

// Sources reached by a topic's statements through lineage.
std::set<NodeId> topic_sources(const HlgGraph& graph, NodeId topic_id) {
    std::set<NodeId> sources;
    for (NodeId s : graph.statements_of_topic(topic_id)) {
        sources.insert(graph.lineage(s).second);
    }
    return sources;
}

std::string salient_term(const std::string& chunk_text) {
    // First capitalized run, mirroring the rule-based entity heuristic.
    const std::vector<std::string> tokens = split_whitespace(chunk_text);
    std::string run;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (starts_with_uppercase(tokens[i])) {
            if (!run.empty()) run.push_back(' ');
            std::string t = tokens[i];
            while (!t.empty() && !std::isalnum(static_cast<unsigned char>(t.back()))) {
                t.pop_back();
            }
            run += t;
            const bool run_continues =
                i + 1 < tokens.size() && starts_with_uppercase(tokens[i + 1]);
            if (!run_continues && !normalize_surface(run).empty()) return run;
        } else if (!run.empty()) {
            break;
        }
    }
    // Fallback: first non-stopword token.
    for (const std::string& t : tokens) {
        const std::string n = normalize_surface(t);
        if (!n.empty() && !default_stopwords().count(n)) return t;
    }
    return tokens.empty() ? std::string{"this"} : tokens.front();
}

std::string join_terms(const std::vector<std::string>& terms, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i) out += sep;
        out += terms[i];
    }
    return out;
}

std::string first_sentence(const std::string& text) {
    const std::vector<std::string> sentences = split_sentences(text);
    return sentences.empty() ? std::string{} : sentences.front();
}

} // namespace

GeneratedQa TemplateGenerator::generate(const std::vector<std::string>& chunk_texts,
                                        RelationKind kind) const {
    if (chunk_texts.empty()) throw ConfigError("generate: chunk list must be non-empty");
    std::vector<std::string> terms;
    terms.reserve(chunk_texts.size());
    for (const std::string& text : chunk_texts) terms.push_back(salient_term(text));

    GeneratedQa qa;
    switch (kind) {
    case RelationKind::CauseEffect:
        qa.question = "How did developments around " + terms.front() +
                      " affect " + join_terms({terms.begin() + 1, terms.end()}, " and ") + "?";
        break;
    case RelationKind::Contrast:
        qa.question = "How do accounts of " + join_terms(terms, " versus ") + " differ?";
        break;
    case RelationKind::Complementary:
        qa.question = "What overall picture emerges when combining reporting on " +
                      join_terms(terms, ", ") + "?";
        break;
    }
    std::string answer;
    for (const std::string& text : chunk_texts) {
        const std::string sentence = first_sentence(text);
        if (sentence.empty()) continue;
        if (!answer.empty()) answer.push_back(' ');
        answer += sentence;
    }
    qa.answer = answer;
    return qa;
}

CritiqueResult TemplateGenerator::critique(const std::string& question,
                                           const std::string& answer,
                                           const std::vector<std::string>& chunk_texts) const {
    (void)chunk_texts;
    CritiqueResult result;
    result.question = collapse_whitespace(question);
    result.answer = collapse_whitespace(answer);
    if (result.question.empty() || result.answer.empty()) {
        result.rejected = true;
        result.reason = "empty question or answer";
        return result;
    }
    if (result.question.back() != '?') result.question.push_back('?');
    return result;
}

std::vector<NodeId> collect_topics(NodeId seed_topic, const HlgGraph& graph,
                                   const VectorIndex& topic_index, std::uint32_t m) {
    if (m == 0) throw ConfigError("collect_topics: m must be positive");
    const TopicNode& seed = graph.topic(seed_topic);
    if (!seed.embedding) {
        throw MissingEmbedding("seed topic has no embedding");
    }
    const std::set<NodeId> seed_sources = topic_sources(graph, seed_topic);

    std::vector<NodeId> collected{seed_topic};
    // Rank every topic by similarity to the seed, then keep the ones that
    // reach beyond the seed's source.
    for (const Scored& hit : knn(topic_index, *seed.embedding, topic_index.entries.size())) {
        if (collected.size() >= m) break;
        if (hit.id == seed_topic) continue;
        const std::set<NodeId> sources = topic_sources(graph, hit.id);
        const bool all_in_seed_sources =
            std::all_of(sources.begin(), sources.end(),
                        [&](NodeId s) { return seed_sources.count(s) != 0; });
        if (all_in_seed_sources) continue;
        collected.push_back(hit.id);
    }

    std::set<NodeId> distinct;
    for (NodeId t : collected) {
        const std::set<NodeId> sources = topic_sources(graph, t);
        distinct.insert(sources.begin(), sources.end());
    }
    if (distinct.size() < 2) {
        throw InsufficientDiversity("seed topic " + std::to_string(seed_topic.value) +
                                    " cannot reach a second source");
    }
    return collected;
}

std::vector<ChunkNode> select_chunks(const std::vector<NodeId>& topics, const HlgGraph& graph) {
    std::vector<ChunkNode> chunks;
    std::set<NodeId> chunk_seen;
    std::set<NodeId> sources;
    for (NodeId topic_id : topics) {
        // Representative statement: highest entity degree, ties by id.
        NodeId best;
        std::size_t best_degree = 0;
        for (NodeId s : graph.statements_of_topic(topic_id)) {
            const std::size_t degree = graph.statement(s).entities.size();
            if (!best.valid() || degree > best_degree ||
                (degree == best_degree && s < best)) {
                best = s;
                best_degree = degree;
            }
        }
        if (!best.valid()) continue;
        const auto [chunk_id, source_id] = graph.lineage(best);
        if (chunk_seen.count(chunk_id)) continue;
        if (!sources.count(source_id) && sources.size() >= 5) break;
        chunk_seen.insert(chunk_id);
        sources.insert(source_id);
        chunks.push_back(graph.chunk(chunk_id));
    }
    if (sources.size() < 3) {
        throw InsufficientSources("selected chunks span " + std::to_string(sources.size()) +
                                  " sources; need at least 3");
    }
    return chunks;
}

QaCandidate generate_candidate(const std::vector<ChunkNode>& chunks, const Generator& generator,
                               std::uint32_t sequence) {
    if (chunks.empty()) throw ConfigError("generate_candidate: chunk list must be non-empty");
    std::vector<std::string> texts;
    texts.reserve(chunks.size());
    for (const ChunkNode& c : chunks) texts.push_back(c.text);

    const RelationKind kind = static_cast<RelationKind>(sequence % 3);
    const GeneratedQa qa = generator.generate(texts, kind);

    QaCandidate candidate;
    candidate.question = qa.question;
    candidate.answer = qa.answer;
    for (const ChunkNode& c : chunks) {
        candidate.evidence_chunks.emplace_back(c.source, c.id);
    }
    candidate.hop_count = candidate.distinct_sources();
    candidate.status = CandidateStatus::Draft;
    return candidate;
}

QaCandidate critique_and_validate(QaCandidate candidate, const HlgGraph& graph,
                                  const Indexes& indexes, const Providers& providers,
                                  const RetrievalConfig& cfg, const Generator& generator,
                                  const SynthConfig& synth) {
    if (candidate.status != CandidateStatus::Draft) {
        throw ConfigError("critique_and_validate requires a draft candidate");
    }

    // Stage 1: refinement. Evidence chunks may have vanished from the graph
    // (document removal); critique works with what is still present.
    std::vector<std::string> texts;
    for (const auto& [source, chunk] : candidate.evidence_chunks) {
        if (graph.contains(chunk) && graph.kind(chunk) == NodeKind::Chunk) {
            texts.push_back(graph.chunk(chunk).text);
        }
    }
    const CritiqueResult refined =
        generator.critique(candidate.question, candidate.answer, texts);
    if (refined.rejected) {
        candidate.status = CandidateStatus::Rejected;
        candidate.rejection_reason = "critique: " + refined.reason;
        return candidate;
    }
    candidate.question = refined.question;
    candidate.answer = refined.answer;
    candidate.status = CandidateStatus::Refined;

    // Stage 2a: multi-source gate.
    if (candidate.distinct_sources() < 3) {
        candidate.status = CandidateStatus::Rejected;
        candidate.rejection_reason = "source-count";
        return candidate;
    }

    // Stage 2b: retrieval coverage of the answer's key terms.
    const std::vector<ScoredStatement> retrieved =
        statement_graph_rag(candidate.question, graph, indexes, providers, cfg);
    std::unordered_set<std::string> retrieved_terms;
    for (const ScoredStatement& s : retrieved) {
        for (std::string& term :
             preprocess_statement(graph.statement(s.id).text, providers.stopwords)) {
            retrieved_terms.insert(std::move(term));
        }
    }
    std::set<std::string> answer_terms;
    for (std::string& term : preprocess_statement(candidate.answer, providers.stopwords)) {
        answer_terms.insert(std::move(term));
    }
    double coverage = 0.0;
    if (!answer_terms.empty()) {
        std::size_t covered = 0;
        for (const std::string& term : answer_terms) {
            if (retrieved_terms.count(term)) ++covered;
        }
        coverage = static_cast<double>(covered) / static_cast<double>(answer_terms.size());
    }
    if (coverage < synth.coverage_threshold) {
        candidate.status = CandidateStatus::Rejected;
        candidate.rejection_reason = "validation-coverage";
        return candidate;
    }
    candidate.status = CandidateStatus::Accepted;
    candidate.rejection_reason.reset();
    return candidate;
}

std::vector<QaCandidate> synthesize_dataset(const HlgGraph& graph, const Indexes& indexes,
                                            const Providers& providers,
                                            const RetrievalConfig& cfg,
                                            const SynthConfig& synth,
                                            const Generator& generator) {
    if (!indexes.topics) throw ConfigError("synthesize_dataset: topic index is required");
    std::vector<QaCandidate> out;
    std::uint32_t sequence = 0;
    for (const auto& [seed_id, topic] : graph.topics()) {
        if (synth.max_candidates && out.size() >= synth.max_candidates) break;
        std::vector<ChunkNode> chunks;
        try {
            const std::vector<NodeId> topics =
                collect_topics(seed_id, graph, *indexes.topics, synth.topics_per_seed);
            chunks = select_chunks(topics, graph);
        } catch (const InsufficientDiversity&) {
            continue;  // seed cannot produce a multi-document question
        } catch (const InsufficientSources&) {
            continue;
        }
        QaCandidate candidate = generate_candidate(chunks, generator, sequence++);
        out.push_back(critique_and_validate(std::move(candidate), graph, indexes, providers,
                                            cfg, generator, synth));
    }
    return out;
}

void write_dataset_jsonl(const std::filesystem::path& path,
                         const std::vector<QaCandidate>& candidates) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot write dataset file: " + path.string());
    for (const QaCandidate& c : candidates) {
        if (c.status != CandidateStatus::Accepted) continue;
        json row;
        row["question"] = c.question;
        row["answer"] = c.answer;
        json evidence = json::array();
        for (const auto& [source, chunk] : c.evidence_chunks) {
            evidence.push_back({{"source", source.value}, {"chunk", chunk.value}});
        }
        row["evidence"] = evidence;
        row["hops"] = c.hop_count;
        out << row.dump() << '\n';
    }
}

} // namespace hlg
