#include "hlg/providers.hpp"

#include "hlg/errors.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>

namespace hlg {

using nlohmann::json;

const char* to_string(RelationKind kind) {
    switch (kind) {
    case RelationKind::CauseEffect: return "cause-effect";
    case RelationKind::Contrast: return "contrast";
    case RelationKind::Complementary: return "complementary";
    }
    return "?";
}

namespace {

struct Endpoint {
    std::string base;  // scheme://host:port
    std::string path;  // /route
};

Endpoint split_endpoint(const std::string& url) {
    const std::size_t scheme = url.find("://");
    if (scheme == std::string::npos) {
        throw ConfigError("provider endpoint must be a full URL: " + url);
    }
    const std::size_t slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

json post_json(const HttpOptions& options, const json& body) {
    const Endpoint ep = split_endpoint(options.endpoint);
    const std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= options.retries; ++attempt) {
        httplib::Client client(ep.base);
        client.set_connection_timeout(std::chrono::milliseconds(options.timeout_ms));
        client.set_read_timeout(std::chrono::milliseconds(options.timeout_ms));
        client.set_write_timeout(std::chrono::milliseconds(options.timeout_ms));
        httplib::Result res = client.Post(ep.path, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        try {
            return json::parse(res->body);
        } catch (const json::exception& e) {
            throw ProviderShapeError("provider returned invalid JSON: " +
                                     std::string(e.what()));
        }
    }
    throw ProviderError("provider request to " + options.endpoint + " failed after " +
                        std::to_string(options.retries + 1) + " attempts (" + last_error + ")");
}

} // namespace

RemoteEmbedder::RemoteEmbedder(HttpOptions options, std::size_t expected_dim)
    : options_(std::move(options)), expected_dim_(expected_dim) {
    if (expected_dim_ == 0) throw ConfigError("RemoteEmbedder: expected_dim must be positive");
    if (options_.batch_size == 0) throw ConfigError("RemoteEmbedder: batch_size must be positive");
}

std::vector<Vector> RemoteEmbedder::embed_batch(const std::vector<std::string>& texts) const {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += options_.batch_size) {
        const std::size_t end = std::min(start + options_.batch_size, texts.size());
        json body;
        body["texts"] = std::vector<std::string>(texts.begin() + start, texts.begin() + end);
        const json reply = post_json(options_, body);
        if (!reply.contains("vectors") || !reply["vectors"].is_array() ||
            reply["vectors"].size() != end - start) {
            throw ProviderShapeError("embedder reply must carry one vector per text");
        }
        for (const auto& row : reply["vectors"]) {
            Vector v;
            if (!row.is_array()) throw ProviderShapeError("embedder vector is not an array");
            v.values.reserve(row.size());
            for (const auto& x : row) v.values.push_back(x.get<float>());
            if (v.dim() != expected_dim_) {
                throw ProviderShapeError(
                    "embedder dimension " + std::to_string(v.dim()) +
                    " disagrees with expected " + std::to_string(expected_dim_));
            }
            out.push_back(std::move(v));
        }
    }
    return out;
}

Vector RemoteEmbedder::embed(const std::string& text) const {
    return embed_batch({text}).front();
}

std::vector<double> RemoteReranker::score(const std::string& query,
                                          const std::vector<std::string>& candidates) const {
    if (candidates.empty()) return {};
    json body;
    body["query"] = query;
    body["candidates"] = candidates;
    const json reply = post_json(options_, body);
    if (!reply.contains("scores") || !reply["scores"].is_array() ||
        reply["scores"].size() != candidates.size()) {
        throw ProviderShapeError("reranker reply must carry one score per candidate");
    }
    std::vector<double> out;
    out.reserve(candidates.size());
    for (const auto& x : reply["scores"]) out.push_back(x.get<double>());
    return out;
}

ExtractionResult RemoteExtractor::extract(const std::string& chunk_text,
                                          const DomainHints& hints) const {
    json body;
    body["chunk"] = chunk_text;
    body["hints"] = {{"entity_lexicon", hints.entity_lexicon},
                     {"topic_vocabulary", hints.topic_vocabulary}};
    const json reply = post_json(options_, body);

    ExtractionResult result;
    try {
        for (const auto& s : reply.at("statements")) {
            result.statements.push_back(s.get<std::string>());
        }
        for (const auto& t : reply.value("topics", json::array())) {
            ExtractionResult::Topic topic;
            topic.label = t.at("label").get<std::string>();
            for (const auto& idx : t.at("statements")) {
                topic.statement_indices.push_back(idx.get<std::size_t>());
            }
            result.topics.push_back(std::move(topic));
        }
        for (const auto& f : reply.value("facts", json::array())) {
            ExtractionResult::Fact fact;
            fact.subject = f.at("subject").get<std::string>();
            fact.predicate = f.at("predicate").get<std::string>();
            fact.object = f.at("object").get<std::string>();
            fact.statement_index = f.at("statement").get<std::size_t>();
            result.facts.push_back(std::move(fact));
        }
        for (const auto& e : reply.value("entities", json::array())) {
            result.entities.push_back({e.at("surface").get<std::string>(),
                                       e.at("category").get<std::string>()});
        }
    } catch (const json::exception& e) {
        throw ProviderShapeError("extractor reply malformed: " + std::string(e.what()));
    }
    return result;
}

namespace {

GeneratedQa split_generated_text(const std::string& text) {
    GeneratedQa qa;
    const std::size_t newline = text.find('\n');
    if (newline == std::string::npos) {
        qa.question = text;
    } else {
        qa.question = text.substr(0, newline);
        qa.answer = text.substr(newline + 1);
    }
    return qa;
}

} // namespace

GeneratedQa RemoteGenerator::generate(const std::vector<std::string>& chunk_texts,
                                      RelationKind kind) const {
    json body;
    body["chunks"] = chunk_texts;
    body["mode"] = "generate";
    body["relation"] = to_string(kind);
    const json reply = post_json(options_, body);
    if (!reply.contains("text") || !reply["text"].is_string()) {
        throw ProviderShapeError("generator reply must carry \"text\"");
    }
    return split_generated_text(reply["text"].get<std::string>());
}

CritiqueResult RemoteGenerator::critique(const std::string& question, const std::string& answer,
                                         const std::vector<std::string>& chunk_texts) const {
    json body;
    body["chunks"] = chunk_texts;
    body["mode"] = "critique";
    body["question"] = question;
    body["answer"] = answer;
    const json reply = post_json(options_, body);
    CritiqueResult result;
    if (reply.contains("reject")) {
        result.rejected = true;
        result.reason = reply["reject"].is_string() ? reply["reject"].get<std::string>()
                                                    : "rejected by provider";
        return result;
    }
    if (!reply.contains("text") || !reply["text"].is_string()) {
        throw ProviderShapeError("critique reply must carry \"text\" or \"reject\"");
    }
    const GeneratedQa qa = split_generated_text(reply["text"].get<std::string>());
    result.question = qa.question;
    result.answer = qa.answer;
    return result;
}

} // namespace hlg
