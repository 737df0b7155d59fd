#pragma once

#include "hlg/graph.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace hlg {

struct Document {
    std::string id;                  // unique within a corpus
    std::string text;
    std::map<std::string, std::string> metadata;
};

struct ChunkingConfig {
    std::uint32_t chunk_tokens = 300;
    double overlap_fraction = 0.20;  // must be < 1

    std::uint32_t stride() const;
    void validate() const;
};

// One chunk: original text slice plus its token span [begin, end).
struct ChunkPiece {
    std::string text;
    std::size_t token_begin = 0;
    std::size_t token_end = 0;

    std::size_t token_count() const { return token_end - token_begin; }
};

// Sliding-window chunking over whitespace tokens. Consecutive chunks overlap
// by floor(chunk_tokens * overlap_fraction) tokens; spans tile the document.
// Throws EmptyDocument when the document has no tokens.
std::vector<ChunkPiece> chunk_document(const Document& doc, const ChunkingConfig& cfg);

// Domain adaptation hints handed to the extractor: an entity lexicon
// (surface -> category) and preferred topic vocabulary.
struct DomainHints {
    std::map<std::string, std::string> entity_lexicon;
    std::vector<std::string> topic_vocabulary;
};

// What an extractor produces for one chunk. Statement indices refer to the
// `statements` list of the same result.
struct ExtractionResult {
    struct Topic {
        std::string label;
        std::vector<std::size_t> statement_indices;
    };
    struct Fact {
        std::string subject;
        std::string predicate;
        std::string object;
        std::size_t statement_index = 0;
    };
    struct Entity {
        std::string surface;
        std::string category;
    };

    std::vector<Topic> topics;
    std::vector<std::string> statements;
    std::vector<Fact> facts;
    std::vector<Entity> entities;
};

class Extractor {
public:
    virtual ~Extractor() = default;
    virtual ExtractionResult extract(const std::string& chunk_text,
                                     const DomainHints& hints) const = 0;
};

// Deterministic extraction without a model:
//  - statements: sentences split on terminal punctuation
//  - entities: capitalized token runs, plus lexicon matches with categories
//  - topic: head phrase of the chunk's first sentence (or a topic-vocabulary
//    term that occurs in the chunk), covering all its statements
//  - facts: (first entity, RELATED_TO, second entity) per statement that
//    mentions at least two entities
class RuleBasedExtractor final : public Extractor {
public:
    RuleBasedExtractor() = default;
    explicit RuleBasedExtractor(std::map<std::string, std::string> lexicon)
        : lexicon_(std::move(lexicon)) {}

    ExtractionResult extract(const std::string& chunk_text,
                             const DomainHints& hints) const override;

    static constexpr const char* kDefaultCategory = "Term";
    static constexpr const char* kDefaultPredicate = "RELATED_TO";

private:
    std::map<std::string, std::string> lexicon_;
};

// Lines that look like table headers: at least two column separators (a tab
// or a run of two-plus spaces) or a trailing colon. Returned trimmed with
// inner whitespace collapsed.
std::vector<std::string> extract_table_headers(const std::string& chunk_text);

// Appends deduplicated header context to a statement; identity when headers
// are empty. The original statement is always a verbatim prefix of the output.
std::string enhance_tabular_statement(const std::string& statement,
                                      const std::vector<std::string>& headers);

// Appends a corpus into an existing (thawed) graph: one source per document,
// chunks linked in order, extraction output wired into topics, statements,
// facts and corpus-wide deduplicated entities. With tabular_mode, statement
// texts are enhanced with table-header context from their chunk.
void ingest_corpus(HlgGraph& graph, const std::vector<Document>& corpus,
                   const Extractor& extractor, const ChunkingConfig& cfg,
                   bool tabular_mode = false, const DomainHints& hints = {});

// Fresh graph from a corpus; the result is left unfrozen so the caller can
// run the embedding step.
HlgGraph build_graph(const std::vector<Document>& corpus, const Extractor& extractor,
                     const ChunkingConfig& cfg, bool tabular_mode = false,
                     const DomainHints& hints = {});

// Samples five evenly spaced chunks across the corpus and mines them for
// lexicon entries and topic vocabulary.
DomainHints sample_domain_hints(const std::vector<Document>& corpus,
                                const ChunkingConfig& cfg);

// Corpus file: JSON Lines, one document per line:
//   {"id": text, "text": text, "metadata": {string: string}}
std::vector<Document> read_corpus_jsonl(const std::filesystem::path& path);
void write_corpus_jsonl(const std::filesystem::path& path,
                        const std::vector<Document>& corpus);

} // namespace hlg
