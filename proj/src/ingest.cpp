#include "hlg/ingest.hpp"

#include "hlg/errors.hpp"
#include "hlg/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hlg {

using nlohmann::json;

std::uint32_t ChunkingConfig::stride() const {
    const auto overlap = static_cast<std::uint32_t>(
        std::floor(static_cast<double>(chunk_tokens) * overlap_fraction));
    return chunk_tokens - overlap;
}

void ChunkingConfig::validate() const {
    if (chunk_tokens == 0) throw ConfigError("chunk_tokens must be positive");
    if (overlap_fraction < 0.0 || overlap_fraction >= 1.0) {
        throw ConfigError("overlap_fraction must be in [0, 1)");
    }
}

std::vector<ChunkPiece> chunk_document(const Document& doc, const ChunkingConfig& cfg) {
    cfg.validate();
    const std::vector<TokenSpan> tokens = whitespace_tokens(doc.text);
    if (tokens.empty()) {
        throw EmptyDocument("document has no tokens" +
                            (doc.id.empty() ? std::string{} : ": " + doc.id));
    }
    const std::size_t total = tokens.size();
    const std::size_t width = cfg.chunk_tokens;
    const std::size_t stride = cfg.stride();

    std::vector<ChunkPiece> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t end = std::min(start + width, total);
        ChunkPiece piece;
        piece.token_begin = start;
        piece.token_end = end;
        piece.text = doc.text.substr(tokens[start].begin,
                                     tokens[end - 1].end - tokens[start].begin);
        out.push_back(std::move(piece));
        if (end == total) break;
        start += stride;
    }
    return out;
}

namespace {

std::string strip_trailing_punct(std::string s) {
    while (!s.empty()) {
        switch (s.back()) {
        case '.': case ',': case ';': case ':': case '!': case '?':
        case '\'': case '"': case ')': case ']':
            s.pop_back();
            continue;
        default:
            return s;
        }
    }
    return s;
}

std::string head_phrase(const std::string& sentence, std::size_t max_tokens = 6) {
    const std::vector<std::string> tokens = split_whitespace(sentence);
    std::string out;
    for (std::size_t i = 0; i < tokens.size() && i < max_tokens; ++i) {
        if (!out.empty()) out.push_back(' ');
        out += tokens[i];
    }
    return strip_trailing_punct(out);
}

// Positions of normalized token-sequence matches of `needle_tokens` within
// `hay_tokens`; both sides already normalized per-token.
bool contains_token_seq(const std::vector<std::string>& hay_tokens,
                        const std::vector<std::string>& needle_tokens,
                        std::size_t* first_pos = nullptr) {
    if (needle_tokens.empty() || hay_tokens.size() < needle_tokens.size()) return false;
    for (std::size_t i = 0; i + needle_tokens.size() <= hay_tokens.size(); ++i) {
        bool match = true;
        for (std::size_t j = 0; j < needle_tokens.size(); ++j) {
            if (hay_tokens[i + j] != needle_tokens[j]) {
                match = false;
                break;
            }
        }
        if (match) {
            if (first_pos) *first_pos = i;
            return true;
        }
    }
    return false;
}

std::vector<std::string> normalized_tokens(const std::string& text) {
    std::vector<std::string> out;
    for (const std::string& t : split_whitespace(text)) {
        std::string n = normalize_surface(t);
        if (!n.empty()) out.push_back(std::move(n));
    }
    return out;
}

struct EntityMention {
    std::size_t position = 0;  // token index of first mention
    std::string surface;
    std::string category;
};

// Lexicon matches (longest surface first) plus capitalized token runs over
// the remaining tokens.
std::vector<EntityMention> find_mentions(const std::string& sentence,
                                         const std::map<std::string, std::string>& lexicon) {
    const std::vector<std::string> raw = split_whitespace(sentence);
    // Per-token normalization can drop pure-punctuation tokens, so keep an
    // explicit alignment back to raw token positions.
    std::vector<std::string> aligned;
    std::vector<std::size_t> raw_pos;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        std::string n = normalize_surface(raw[i]);
        if (!n.empty()) {
            aligned.push_back(std::move(n));
            raw_pos.push_back(i);
        }
    }

    std::vector<bool> consumed(aligned.size(), false);
    std::vector<EntityMention> mentions;

    // Lexicon entries, longest token span first for greedy matching.
    std::vector<std::pair<std::vector<std::string>, const std::pair<const std::string, std::string>*>>
        needles;
    for (const auto& entry : lexicon) {
        std::vector<std::string> toks = normalized_tokens(entry.first);
        if (!toks.empty()) needles.emplace_back(std::move(toks), &entry);
    }
    std::sort(needles.begin(), needles.end(), [](const auto& a, const auto& b) {
        if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
        return a.second->first < b.second->first;
    });
    for (const auto& [toks, entry] : needles) {
        for (std::size_t i = 0; i + toks.size() <= aligned.size(); ++i) {
            bool match = true;
            for (std::size_t j = 0; j < toks.size(); ++j) {
                if (consumed[i + j] || aligned[i + j] != toks[j]) {
                    match = false;
                    break;
                }
            }
            if (match) {
                for (std::size_t j = 0; j < toks.size(); ++j) consumed[i + j] = true;
                mentions.push_back({raw_pos[i], entry->first, entry->second});
            }
        }
    }

    // Capitalized runs over unconsumed tokens.
    std::size_t i = 0;
    while (i < aligned.size()) {
        if (consumed[i] || !starts_with_uppercase(raw[raw_pos[i]])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        std::string surface;
        while (j < aligned.size() && !consumed[j] &&
               starts_with_uppercase(raw[raw_pos[j]]) &&
               (j == i || raw_pos[j] == raw_pos[j - 1] + 1)) {
            if (!surface.empty()) surface.push_back(' ');
            surface += raw[raw_pos[j]];
            ++j;
        }
        surface = strip_trailing_punct(surface);
        if (!normalize_surface(surface).empty()) {
            mentions.push_back({raw_pos[i], surface, RuleBasedExtractor::kDefaultCategory});
        }
        i = j;
    }

    std::sort(mentions.begin(), mentions.end(),
              [](const EntityMention& a, const EntityMention& b) {
                  return a.position < b.position;
              });
    return mentions;
}

} // namespace

ExtractionResult RuleBasedExtractor::extract(const std::string& chunk_text,
                                             const DomainHints& hints) const {
    ExtractionResult result;
    result.statements = split_sentences(chunk_text);
    if (result.statements.empty()) return result;

    std::map<std::string, std::string> lexicon = lexicon_;
    for (const auto& [surface, category] : hints.entity_lexicon) {
        lexicon[surface] = category;
    }

    std::set<std::pair<std::string, std::string>> seen;  // (normalized, category)
    for (std::size_t idx = 0; idx < result.statements.size(); ++idx) {
        const std::vector<EntityMention> mentions =
            find_mentions(result.statements[idx], lexicon);
        for (const EntityMention& m : mentions) {
            auto key = std::make_pair(normalize_surface(m.surface), m.category);
            if (seen.insert(key).second) {
                result.entities.push_back({m.surface, m.category});
            }
        }
        if (mentions.size() >= 2) {
            result.facts.push_back(
                {mentions[0].surface, kDefaultPredicate, mentions[1].surface, idx});
        }
    }

    // One topic per chunk. A topic-vocabulary term found in the chunk wins
    // over the head-phrase fallback.
    std::string label;
    const std::vector<std::string> chunk_tokens = normalized_tokens(chunk_text);
    for (const std::string& term : hints.topic_vocabulary) {
        if (contains_token_seq(chunk_tokens, normalized_tokens(term))) {
            label = term;
            break;
        }
    }
    if (label.empty()) label = head_phrase(result.statements.front());
    if (label.empty()) label = "untitled";

    ExtractionResult::Topic topic;
    topic.label = label;
    topic.statement_indices.resize(result.statements.size());
    for (std::size_t i = 0; i < result.statements.size(); ++i) {
        topic.statement_indices[i] = i;
    }
    result.topics.push_back(std::move(topic));
    return result;
}

std::vector<std::string> extract_table_headers(const std::string& chunk_text) {
    std::vector<std::string> headers;
    std::istringstream in(chunk_text);
    std::string line;
    while (std::getline(in, line)) {
        // Trim first so indentation does not count as a separator.
        std::size_t begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        std::size_t end = line.find_last_not_of(" \t\r");
        const std::string trimmed = line.substr(begin, end - begin + 1);

        std::size_t separators = 0;
        for (std::size_t i = 0; i < trimmed.size();) {
            if (trimmed[i] == '\t') {
                ++separators;
                ++i;
            } else if (trimmed[i] == ' ') {
                std::size_t j = i;
                while (j < trimmed.size() && trimmed[j] == ' ') ++j;
                if (j - i >= 2) ++separators;
                i = j;
            } else {
                ++i;
            }
        }
        if (separators >= 2 || trimmed.back() == ':') {
            headers.push_back(collapse_whitespace(trimmed));
        }
    }
    return headers;
}

std::string enhance_tabular_statement(const std::string& statement,
                                      const std::vector<std::string>& headers) {
    if (headers.empty()) return statement;
    std::vector<std::string> unique;
    for (const std::string& h : headers) {
        if (std::find(unique.begin(), unique.end(), h) == unique.end()) {
            unique.push_back(h);
        }
    }
    std::string out = statement + " (context: ";
    for (std::size_t i = 0; i < unique.size(); ++i) {
        if (i) out += "; ";
        out += unique[i];
    }
    out += ")";
    return out;
}

namespace {

struct FactKey {
    NodeId subject;
    std::string predicate;
    NodeId object;

    bool operator<(const FactKey& other) const {
        if (subject != other.subject) return subject < other.subject;
        if (object != other.object) return object < other.object;
        return predicate < other.predicate;
    }
};

} // namespace

void ingest_corpus(HlgGraph& graph, const std::vector<Document>& corpus,
                   const Extractor& extractor, const ChunkingConfig& cfg,
                   bool tabular_mode, const DomainHints& hints) {
    cfg.validate();
    if (corpus.empty()) throw ConfigError("corpus must be non-empty");
    std::set<std::string> doc_ids;
    for (const Document& doc : corpus) {
        if (doc.id.empty()) throw ConfigError("document id must be non-empty");
        if (!doc_ids.insert(doc.id).second) {
            throw ConfigError("duplicate document id: " + doc.id);
        }
    }

    std::map<FactKey, NodeId> fact_registry;

    for (const Document& doc : corpus) {
        const std::vector<ChunkPiece> pieces = chunk_document(doc, cfg);

        SourceNode source;
        source.uri = doc.id;
        source.metadata = doc.metadata;
        const NodeId source_id = graph.add_node(std::move(source));

        for (std::size_t ordinal = 0; ordinal < pieces.size(); ++ordinal) {
            const ChunkPiece& piece = pieces[ordinal];
            ChunkNode chunk;
            chunk.source = source_id;
            chunk.ordinal = static_cast<std::uint32_t>(ordinal);
            chunk.text = piece.text;
            chunk.token_count = static_cast<std::uint32_t>(piece.token_count());
            const NodeId chunk_id = graph.add_node(std::move(chunk));

            ExtractionResult ex;
            try {
                ex = extractor.extract(piece.text, hints);
            } catch (const std::exception& e) {
                throw ExtractorFailure("extractor failed at document '" + doc.id +
                                       "' chunk " + std::to_string(ordinal) + ": " +
                                       e.what());
            }
            if (ex.statements.empty()) continue;

            auto bad = [&](const std::string& what) -> ExtractorFailure {
                return ExtractorFailure("invalid extraction at document '" + doc.id +
                                        "' chunk " + std::to_string(ordinal) + ": " + what);
            };

            // Entities first; corpus-wide dedup through the graph index.
            std::map<std::string, NodeId> local;  // normalized surface -> id
            for (const auto& e : ex.entities) {
                if (e.surface.empty()) throw bad("entity with empty surface");
                EntityNode node;
                node.surface = e.surface;
                node.category = e.category;
                const EntityInsert inserted = graph.add_node(std::move(node));
                local.emplace(normalize_surface(e.surface), inserted.id);
            }

            // Topics; every statement gets the first topic listing it, and a
            // fallback topic is synthesized for uncovered statements.
            std::vector<NodeId> stmt_topic(ex.statements.size());
            for (const auto& t : ex.topics) {
                TopicNode topic;
                topic.label = t.label;
                const NodeId topic_id = graph.add_node(std::move(topic));
                for (std::size_t idx : t.statement_indices) {
                    if (idx >= ex.statements.size()) throw bad("topic statement index out of range");
                    if (!stmt_topic[idx].valid()) stmt_topic[idx] = topic_id;
                }
            }
            NodeId fallback_topic;
            for (std::size_t idx = 0; idx < ex.statements.size(); ++idx) {
                if (stmt_topic[idx].valid()) continue;
                if (!fallback_topic.valid()) {
                    TopicNode topic;
                    topic.label = head_phrase(ex.statements[idx]);
                    if (topic.label.empty()) topic.label = "untitled";
                    fallback_topic = graph.add_node(std::move(topic));
                }
                stmt_topic[idx] = fallback_topic;
            }

            // Pre-resolve fact endpoints so statement entity sets include them.
            std::vector<std::set<NodeId>> stmt_entities(ex.statements.size());
            for (const auto& f : ex.facts) {
                if (f.statement_index >= ex.statements.size()) {
                    throw bad("fact statement index out of range");
                }
                auto subject = local.find(normalize_surface(f.subject));
                auto object = local.find(normalize_surface(f.object));
                if (subject == local.end() || object == local.end()) {
                    throw bad("fact references an entity missing from the extraction");
                }
                stmt_entities[f.statement_index].insert(subject->second);
                stmt_entities[f.statement_index].insert(object->second);
            }

            // Statement texts plus surface-containment entity attribution.
            std::vector<NodeId> stmt_ids(ex.statements.size());
            const std::vector<std::string> headers =
                tabular_mode ? extract_table_headers(piece.text) : std::vector<std::string>{};
            for (std::size_t idx = 0; idx < ex.statements.size(); ++idx) {
                if (ex.statements[idx].empty()) throw bad("empty statement text");
                std::string text = ex.statements[idx];
                if (tabular_mode) text = enhance_tabular_statement(text, headers);

                const std::vector<std::string> tokens = normalized_tokens(text);
                for (const auto& [normalized, entity_id] : local) {
                    if (contains_token_seq(tokens, normalized_tokens(normalized))) {
                        stmt_entities[idx].insert(entity_id);
                    }
                }

                StatementNode stmt;
                stmt.text = std::move(text);
                stmt.chunk = chunk_id;
                stmt.topic = stmt_topic[idx];
                stmt.entities = stmt_entities[idx];
                stmt_ids[idx] = graph.add_node(std::move(stmt));
            }

            // Facts, deduplicated by (subject, predicate, object) per ingest.
            for (const auto& f : ex.facts) {
                const NodeId subject = local.at(normalize_surface(f.subject));
                const NodeId object = local.at(normalize_surface(f.object));
                const NodeId stmt_id = stmt_ids[f.statement_index];
                const FactKey key{subject, f.predicate, object};
                auto it = fact_registry.find(key);
                if (it != fact_registry.end()) {
                    graph.add_fact_support(it->second, stmt_id);
                } else {
                    FactNode fact;
                    fact.subject = subject;
                    fact.predicate = f.predicate;
                    fact.object = object;
                    fact.supporting_statements.insert(stmt_id);
                    fact_registry.emplace(key, graph.add_node(std::move(fact)));
                }
            }
        }
    }
}

HlgGraph build_graph(const std::vector<Document>& corpus, const Extractor& extractor,
                     const ChunkingConfig& cfg, bool tabular_mode,
                     const DomainHints& hints) {
    HlgGraph graph;
    ingest_corpus(graph, corpus, extractor, cfg, tabular_mode, hints);
    return graph;
}

DomainHints sample_domain_hints(const std::vector<Document>& corpus,
                                const ChunkingConfig& cfg) {
    std::vector<std::string> all_chunks;
    for (const Document& doc : corpus) {
        for (const ChunkPiece& piece : chunk_document(doc, cfg)) {
            all_chunks.push_back(piece.text);
        }
    }
    std::vector<std::size_t> picks;
    const std::size_t n = all_chunks.size();
    if (n <= 5) {
        for (std::size_t i = 0; i < n; ++i) picks.push_back(i);
    } else {
        for (std::size_t k = 0; k < 5; ++k) {
            picks.push_back((k * (n - 1) + 2) / 4);
        }
        picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    }

    DomainHints hints;
    std::set<std::string> vocab_seen;
    for (std::size_t idx : picks) {
        const std::string& text = all_chunks[idx];
        for (const std::string& sentence : split_sentences(text)) {
            for (const EntityMention& m : find_mentions(sentence, {})) {
                hints.entity_lexicon.emplace(m.surface, m.category);
            }
        }
        const std::vector<std::string> sentences = split_sentences(text);
        if (!sentences.empty()) {
            std::string phrase = head_phrase(sentences.front());
            if (!phrase.empty() && vocab_seen.insert(normalize_surface(phrase)).second) {
                hints.topic_vocabulary.push_back(phrase);
            }
        }
    }
    return hints;
}

std::vector<Document> read_corpus_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read corpus file: " + path.string());
    std::vector<Document> corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json row = json::parse(line);
            Document doc;
            doc.id = row.at("id").get<std::string>();
            doc.text = row.at("text").get<std::string>();
            if (row.contains("metadata")) {
                doc.metadata = row.at("metadata").get<std::map<std::string, std::string>>();
            }
            corpus.push_back(std::move(doc));
        } catch (const json::exception& e) {
            throw ConfigError("corpus line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return corpus;
}

void write_corpus_jsonl(const std::filesystem::path& path,
                        const std::vector<Document>& corpus) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot write corpus file: " + path.string());
    for (const Document& doc : corpus) {
        json row;
        row["id"] = doc.id;
        row["text"] = doc.text;
        row["metadata"] = doc.metadata;
        out << row.dump() << '\n';
    }
}

} // namespace hlg
