// Command-line front end: index building, querying, synthetic dataset
// generation, retrieval evaluation, and graph statistics.

#include "hlg/evalharness.hpp"
#include "hlg/ingest.hpp"
#include "hlg/persist.hpp"
#include "hlg/providers.hpp"
#include "hlg/retrieve.hpp"
#include "hlg/synthgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>

namespace {

using nlohmann::json;

struct HttpFlags {
    int timeout_ms = 10000;
    int retries = 2;
    std::size_t batch_size = 32;

    hlg::HttpOptions options(const std::string& endpoint) const {
        hlg::HttpOptions o;
        o.endpoint = endpoint;
        o.timeout_ms = timeout_ms;
        o.retries = retries;
        o.batch_size = batch_size;
        return o;
    }
};

void add_http_flags(CLI::App* cmd, HttpFlags& flags) {
    cmd->add_option("--provider-timeout-ms", flags.timeout_ms, "Provider request timeout")
        ->envname("HLG_PROVIDER_TIMEOUT_MS")
        ->capture_default_str();
    cmd->add_option("--provider-retries", flags.retries, "Provider retry count")
        ->envname("HLG_PROVIDER_RETRIES")
        ->capture_default_str();
    cmd->add_option("--provider-batch-size", flags.batch_size, "Embedding batch size")
        ->envname("HLG_PROVIDER_BATCH_SIZE")
        ->capture_default_str();
}

void add_retrieval_flags(CLI::App* cmd, hlg::RetrievalConfig& cfg) {
    cmd->add_option("--k-keyword", cfg.k_keyword, "Keyword retrieval budget")
        ->capture_default_str();
    cmd->add_option("--k-vss", cfg.k_vss, "Vector search budget")->capture_default_str();
    cmd->add_option("--k-topics", cfg.k_topics, "Topic retrieval budget")
        ->capture_default_str();
    cmd->add_option("--beam-width", cfg.beam_width, "Beam width B")->capture_default_str();
    cmd->add_option("--max-depth", cfg.max_depth, "Beam depth limit")->capture_default_str();
    cmd->add_option("--top-k", cfg.top_k, "Final result count")->capture_default_str();
    cmd->add_option("--neighbor-cap", cfg.neighbor_cap, "Shared-entity neighbor cap")
        ->capture_default_str();
    cmd->add_option("--max-chunks", cfg.max_chunks, "Chunk output cap")->capture_default_str();
    cmd->add_option("--tau", cfg.tau, "Diversity threshold (0 disables)")
        ->capture_default_str();
}

std::unique_ptr<hlg::Embedder> make_embedder(const std::string& endpoint, std::size_t dim,
                                             const HttpFlags& http) {
    if (endpoint.empty()) return std::make_unique<hlg::HashEmbedder>(dim);
    return std::make_unique<hlg::RemoteEmbedder>(http.options(endpoint), dim);
}

std::map<std::string, std::string> read_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw hlg::ConfigError("cannot read lexicon file: " + path);
    json j;
    in >> j;
    return j.get<std::map<std::string, std::string>>();
}

hlg::SynonymMap read_synonyms(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw hlg::ConfigError("cannot read synonym file: " + path);
    json j;
    in >> j;
    hlg::SynonymMap map;
    for (const auto& [canonical, variants] : j.items()) {
        for (const auto& v : variants) {
            map[canonical].insert(v.get<std::string>());
        }
    }
    return map;
}

struct LoadedGraph {
    hlg::HlgGraph graph;
    hlg::PersistManifest manifest;
    hlg::VectorIndex statement_index;
    hlg::VectorIndex topic_index;

    hlg::Indexes indexes() const { return {&statement_index, &topic_index}; }
};

LoadedGraph load_graph_dir(const std::string& dir) {
    LoadedGraph loaded;
    loaded.manifest = hlg::read_manifest(dir);
    loaded.graph = hlg::load(dir);
    loaded.statement_index = hlg::build_statement_index(loaded.graph);
    loaded.topic_index = hlg::build_topic_index(loaded.graph);
    return loaded;
}

int cmd_index(const std::string& corpus_path, const std::string& out_dir,
              hlg::ChunkingConfig chunking, bool tabular, const std::string& lexicon_path,
              bool auto_hints, std::size_t dim, const std::string& embed_endpoint,
              const std::string& extract_endpoint, const HttpFlags& http) {
    const std::vector<hlg::Document> corpus = hlg::read_corpus_jsonl(corpus_path);

    hlg::DomainHints hints;
    if (!lexicon_path.empty()) hints.entity_lexicon = read_lexicon(lexicon_path);
    if (auto_hints) {
        const hlg::DomainHints sampled = hlg::sample_domain_hints(corpus, chunking);
        for (const auto& [surface, category] : sampled.entity_lexicon) {
            hints.entity_lexicon.emplace(surface, category);
        }
        hints.topic_vocabulary = sampled.topic_vocabulary;
    }

    std::unique_ptr<hlg::Extractor> extractor;
    if (extract_endpoint.empty()) {
        extractor = std::make_unique<hlg::RuleBasedExtractor>();
    } else {
        extractor = std::make_unique<hlg::RemoteExtractor>(http.options(extract_endpoint));
    }

    hlg::HlgGraph graph = hlg::build_graph(corpus, *extractor, chunking, tabular, hints);
    const std::unique_ptr<hlg::Embedder> embedder = make_embedder(embed_endpoint, dim, http);
    hlg::embed_graph(graph, *embedder);
    graph.freeze();

    const std::string tag = embed_endpoint.empty() ? "hash-v1" : "remote";
    const hlg::PersistManifest manifest = hlg::persist(graph, out_dir, tag);

    std::cout << "indexed " << manifest.counts.at("source") << " sources, "
              << manifest.counts.at("chunk") << " chunks, "
              << manifest.counts.at("topic") << " topics, "
              << manifest.counts.at("statement") << " statements, "
              << manifest.counts.at("fact") << " facts, "
              << manifest.counts.at("entity") << " entities -> " << out_dir << "\n";
    return 0;
}

int cmd_query(const std::string& graph_dir, const std::string& pipeline,
              const std::string& query_text, const hlg::RetrievalConfig& cfg,
              const std::string& synonyms_path, const std::string& stopwords_path,
              const std::string& embed_endpoint, const std::string& rerank_endpoint,
              const HttpFlags& http) {
    const LoadedGraph loaded = load_graph_dir(graph_dir);
    const std::size_t dim =
        loaded.manifest.dim ? loaded.manifest.dim : hlg::HashEmbedder::kDefaultDim;

    const std::unique_ptr<hlg::Embedder> embedder = make_embedder(embed_endpoint, dim, http);
    std::unique_ptr<hlg::Reranker> reranker;
    if (!rerank_endpoint.empty()) {
        reranker = std::make_unique<hlg::RemoteReranker>(http.options(rerank_endpoint));
    }
    hlg::SynonymMap synonyms;
    if (!synonyms_path.empty()) synonyms = read_synonyms(synonyms_path);
    hlg::StopwordSet stopwords;
    if (!stopwords_path.empty()) stopwords = hlg::load_stopwords(stopwords_path);

    hlg::Providers providers;
    providers.embedder = embedder.get();
    providers.reranker = reranker.get();
    providers.synonyms = synonyms_path.empty() ? nullptr : &synonyms;
    providers.stopwords = stopwords_path.empty() ? nullptr : &stopwords;

    const hlg::PipelineResult result = hlg::run_pipeline(
        pipeline, query_text, loaded.graph, loaded.indexes(), providers, cfg);

    if (result.chunk_mode) {
        std::size_t rank = 1;
        for (const hlg::ChunkNode& c : result.chunks) {
            json row;
            row["rank"] = rank++;
            row["chunk"] = c.id.value;
            row["source_uri"] = loaded.graph.source(c.source).uri;
            row["text"] = c.text;
            std::cout << row.dump() << "\n";
        }
    } else {
        std::size_t rank = 1;
        for (const hlg::ScoredStatement& s : result.statements) {
            const hlg::StatementNode& stmt = loaded.graph.statement(s.id);
            json row;
            row["rank"] = rank++;
            row["score"] = s.rank_score;
            row["statement"] = stmt.text;
            row["chunk"] = s.chunk.value;
            row["source_uri"] = loaded.graph.source(s.source).uri;
            row["topic"] = loaded.graph.topic(stmt.topic).label;
            std::cout << row.dump() << "\n";
        }
    }
    return 0;
}

int cmd_synth(const std::string& graph_dir, const std::string& out_path,
              const hlg::RetrievalConfig& cfg, const hlg::SynthConfig& synth,
              const std::string& embed_endpoint, const std::string& generate_endpoint,
              const HttpFlags& http) {
    const LoadedGraph loaded = load_graph_dir(graph_dir);
    const std::size_t dim =
        loaded.manifest.dim ? loaded.manifest.dim : hlg::HashEmbedder::kDefaultDim;
    const std::unique_ptr<hlg::Embedder> embedder = make_embedder(embed_endpoint, dim, http);

    hlg::Providers providers;
    providers.embedder = embedder.get();

    std::unique_ptr<hlg::Generator> generator;
    if (generate_endpoint.empty()) {
        generator = std::make_unique<hlg::TemplateGenerator>();
    } else {
        generator = std::make_unique<hlg::RemoteGenerator>(http.options(generate_endpoint));
    }

    const std::vector<hlg::QaCandidate> candidates = hlg::synthesize_dataset(
        loaded.graph, loaded.indexes(), providers, cfg, synth, *generator);
    hlg::write_dataset_jsonl(out_path, candidates);

    std::size_t accepted = 0;
    for (const auto& c : candidates) {
        if (c.status == hlg::CandidateStatus::Accepted) ++accepted;
    }
    std::cout << "generated " << candidates.size() << " candidates, accepted " << accepted
              << " -> " << out_path << "\n";
    return 0;
}

int cmd_eval(const std::string& graph_dir, const std::string& gold_path,
             const std::string& pipelines_csv, const std::string& report_path,
             const hlg::RetrievalConfig& cfg, const std::string& embed_endpoint,
             const std::string& rerank_endpoint, const HttpFlags& http) {
    const LoadedGraph loaded = load_graph_dir(graph_dir);
    const std::size_t dim =
        loaded.manifest.dim ? loaded.manifest.dim : hlg::HashEmbedder::kDefaultDim;
    const std::unique_ptr<hlg::Embedder> embedder = make_embedder(embed_endpoint, dim, http);
    std::unique_ptr<hlg::Reranker> reranker;
    if (!rerank_endpoint.empty()) {
        reranker = std::make_unique<hlg::RemoteReranker>(http.options(rerank_endpoint));
    }

    hlg::Providers providers;
    providers.embedder = embedder.get();
    providers.reranker = reranker.get();

    std::vector<std::string> pipelines;
    std::string current;
    for (char c : pipelines_csv + ",") {
        if (c == ',') {
            if (!current.empty()) pipelines.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }

    const std::vector<hlg::GoldRecord> gold = hlg::read_gold_jsonl(gold_path);
    const hlg::EvalReport report = hlg::run_benchmark(loaded.graph, gold, pipelines,
                                                      loaded.indexes(), providers, cfg);

    hlg::print_report_table(report, std::cout);
    const std::string doc = hlg::report_to_json(report);
    if (report_path.empty()) {
        std::cout << doc << "\n";
    } else {
        std::ofstream out(report_path, std::ios::trunc);
        if (!out) throw hlg::ConfigError("cannot write report: " + report_path);
        out << doc << "\n";
    }
    return 0;
}

int cmd_dump(const std::string& graph_dir, bool as_json) {
    const hlg::PersistManifest manifest = hlg::read_manifest(graph_dir);
    const hlg::HlgGraph graph = hlg::load(graph_dir);
    if (as_json) {
        json j;
        j["counts"] = manifest.counts;
        j["dim"] = manifest.dim;
        j["embedding_rows"] = manifest.embedding_rows;
        j["embedder"] = manifest.embedder;
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "tier        nodes\n";
    for (const char* tier : {"source", "chunk", "topic", "statement", "fact", "entity"}) {
        std::cout << std::left << std::setw(12) << tier << manifest.counts.at(tier) << "\n";
    }
    std::cout << "embedding dim " << manifest.dim << ", rows " << manifest.embedding_rows
              << "\n";
    std::size_t entity_mentions = 0;
    for (const auto& [id, s] : graph.statements()) entity_mentions += s.entities.size();
    std::cout << "entity mentions " << entity_mentions << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical lexical graph retrieval engine"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Config file (key=value; flags take precedence)");

    HttpFlags http;

    // index
    auto* index = app.add_subcommand("index", "Build and persist a graph from a corpus");
    std::string corpus_path, out_dir, lexicon_path, embed_endpoint, extract_endpoint;
    hlg::ChunkingConfig chunking;
    bool tabular = false, auto_hints = false;
    std::size_t dim = hlg::HashEmbedder::kDefaultDim;
    index->add_option("--corpus", corpus_path, "Corpus JSONL file")->required();
    index->add_option("--out", out_dir, "Output graph directory")->required();
    index->add_option("--chunk-tokens", chunking.chunk_tokens, "Tokens per chunk")
        ->capture_default_str();
    index->add_option("--overlap", chunking.overlap_fraction, "Chunk overlap fraction")
        ->capture_default_str();
    index->add_flag("--tabular", tabular, "Append table-header context to statements");
    index->add_option("--lexicon", lexicon_path, "Entity lexicon JSON (surface -> category)");
    index->add_flag("--auto-hints", auto_hints,
                    "Mine hints from five evenly spaced sample chunks");
    index->add_option("--dim", dim, "Embedding dimension for the offline embedder")
        ->capture_default_str();
    index->add_option("--embed-endpoint", embed_endpoint, "Remote embedder URL")
        ->envname("HLG_EMBED_ENDPOINT");
    index->add_option("--extract-endpoint", extract_endpoint, "Remote extractor URL")
        ->envname("HLG_EXTRACT_ENDPOINT");
    add_http_flags(index, http);

    // query
    auto* query = app.add_subcommand("query", "Run a retrieval pipeline against a graph");
    std::string graph_dir, pipeline = "statement", query_text, synonyms_path, stopwords_path,
                rerank_endpoint;
    hlg::RetrievalConfig retrieval;
    query->add_option("--graph", graph_dir, "Graph directory")->required();
    query->add_option("--pipeline", pipeline,
                      "statement|topic|chunk-statement|chunk-topic|vss")
        ->capture_default_str();
    query->add_option("text", query_text, "Query text")->required();
    add_retrieval_flags(query, retrieval);
    query->add_option("--synonyms", synonyms_path, "Synonym JSON (canonical -> [variants])");
    query->add_option("--stopwords", stopwords_path, "Stopword list, one per line");
    query->add_option("--embed-endpoint", embed_endpoint, "Remote embedder URL")
        ->envname("HLG_EMBED_ENDPOINT");
    query->add_option("--rerank-endpoint", rerank_endpoint, "Remote reranker URL")
        ->envname("HLG_RERANK_ENDPOINT");
    add_http_flags(query, http);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic multi-hop QA dataset");
    std::string synth_out, generate_endpoint;
    hlg::SynthConfig synth_cfg;
    synth->add_option("--graph", graph_dir, "Graph directory")->required();
    synth->add_option("--out", synth_out, "Output dataset JSONL")->required();
    synth->add_option("--m", synth_cfg.topics_per_seed, "Topics collected per seed")
        ->capture_default_str();
    synth->add_option("--coverage", synth_cfg.coverage_threshold,
                      "Answer key-term coverage threshold")
        ->capture_default_str();
    synth->add_option("--max-candidates", synth_cfg.max_candidates,
                      "Stop after this many candidates (0 = unlimited)")
        ->capture_default_str();
    add_retrieval_flags(synth, retrieval);
    synth->add_option("--embed-endpoint", embed_endpoint, "Remote embedder URL")
        ->envname("HLG_EMBED_ENDPOINT");
    synth->add_option("--generate-endpoint", generate_endpoint, "Remote generator URL")
        ->envname("HLG_GENERATE_ENDPOINT");
    add_http_flags(synth, http);

    // eval
    auto* eval = app.add_subcommand("eval", "Score pipelines against gold evidence");
    std::string gold_path, pipelines_csv = "statement,vss", report_path;
    eval->add_option("--graph", graph_dir, "Graph directory")->required();
    eval->add_option("--gold", gold_path, "Gold JSONL file")->required();
    eval->add_option("--pipelines", pipelines_csv, "Comma-separated pipeline names")
        ->capture_default_str();
    eval->add_option("--report", report_path, "Write the JSON report here");
    add_retrieval_flags(eval, retrieval);
    eval->add_option("--embed-endpoint", embed_endpoint, "Remote embedder URL")
        ->envname("HLG_EMBED_ENDPOINT");
    eval->add_option("--rerank-endpoint", rerank_endpoint, "Remote reranker URL")
        ->envname("HLG_RERANK_ENDPOINT");
    add_http_flags(eval, http);

    // dump
    auto* dump = app.add_subcommand("dump", "Print per-tier node counts");
    bool dump_json = false;
    dump->add_option("--graph", graph_dir, "Graph directory")->required();
    dump->add_flag("--json", dump_json, "Machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(index)) {
            return cmd_index(corpus_path, out_dir, chunking, tabular, lexicon_path,
                             auto_hints, dim, embed_endpoint, extract_endpoint, http);
        }
        if (app.got_subcommand(query)) {
            return cmd_query(graph_dir, pipeline, query_text, retrieval, synonyms_path,
                             stopwords_path, embed_endpoint, rerank_endpoint, http);
        }
        if (app.got_subcommand(synth)) {
            return cmd_synth(graph_dir, synth_out, retrieval, synth_cfg, embed_endpoint,
                             generate_endpoint, http);
        }
        if (app.got_subcommand(eval)) {
            return cmd_eval(graph_dir, gold_path, pipelines_csv, report_path, retrieval,
                            embed_endpoint, rerank_endpoint, http);
        }
        if (app.got_subcommand(dump)) {
            return cmd_dump(graph_dir, dump_json);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
