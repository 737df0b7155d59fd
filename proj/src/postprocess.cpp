#include "hlg/postprocess.hpp"

#include "hlg/errors.hpp"
#include "hlg/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

namespace hlg {

const char* to_string(Origin origin) {
    switch (origin) {
    case Origin::Keyword: return "keyword";
    case Origin::Vss: return "vss";
    case Origin::Beam: return "beam";
    case Origin::Topic: return "topic";
    }
    return "?";
}

const StopwordSet& default_stopwords() {
    static const StopwordSet words = {
        "a", "about", "above", "after", "again", "against", "all", "also", "am",
        "an", "and", "any", "are", "as", "at", "be", "because", "been", "before",
        "being", "below", "between", "both", "but", "by", "can", "could", "did",
        "do", "does", "doing", "down", "during", "each", "else", "few", "for",
        "from", "further", "had", "has", "have", "having", "he", "her", "here",
        "hers", "him", "his", "how", "i", "if", "in", "into", "is", "it", "its",
        "just", "me", "more", "most", "my", "myself", "no", "nor", "not", "now",
        "of", "off", "on", "once", "only", "or", "other", "ought", "our", "ours",
        "out", "over", "own", "same", "she", "should", "so", "some", "such",
        "than", "that", "the", "their", "them", "then", "there", "these", "they",
        "this", "those", "through", "to", "too", "under", "until", "up", "upon",
        "very", "was", "we", "were", "what", "when", "where", "which", "while",
        "who", "whom", "why", "will", "with", "would", "you", "your", "yours",
    };
    return words;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read stopword file: " + path.string());
    StopwordSet words;
    std::string line;
    while (std::getline(in, line)) {
        std::string w = collapse_whitespace(line);
        if (w.empty() || w.front() == '#') continue;
        words.insert(casefold(w));
    }
    return words;
}

namespace {

bool is_numeric_token(const std::string& token) {
    if (token.empty() || std::isdigit(static_cast<unsigned char>(token.front())) == 0) {
        return false;
    }
    for (unsigned char c : token) {
        if (std::isdigit(c) == 0 && c != ',' && c != '.') return false;
    }
    return true;
}

// Strip thousands separators, drop redundant zeros: "1,000" -> "1000",
// "$3.50" arrives as "3.50" -> "3.5", "007" -> "7".
std::string canonicalize_number(const std::string& token) {
    std::string digits;
    digits.reserve(token.size());
    for (char c : token) {
        if (c != ',') digits.push_back(c);
    }
    const std::size_t dot = digits.find('.');
    if (dot == std::string::npos || digits.find('.', dot + 1) != std::string::npos) {
        // Integer, or something like "1.2.3": just strip leading zeros.
        std::size_t i = 0;
        while (i + 1 < digits.size() && digits[i] == '0' &&
               std::isdigit(static_cast<unsigned char>(digits[i + 1]))) {
            ++i;
        }
        return digits.substr(i);
    }
    std::string int_part = digits.substr(0, dot);
    std::string frac_part = digits.substr(dot + 1);
    std::size_t i = 0;
    while (i + 1 < int_part.size() && int_part[i] == '0') ++i;
    int_part = int_part.substr(i);
    if (int_part.empty()) int_part = "0";
    while (!frac_part.empty() && frac_part.back() == '0') frac_part.pop_back();
    if (frac_part.empty()) return int_part;
    return int_part + "." + frac_part;
}

// Suffix-strip lemmatization; deliberately shallow, with length guards so
// short stems are never produced (e.g. "filed" -> "file", not "fil").
std::string lemmatize(const std::string& word) {
    const std::size_t n = word.size();
    auto ends_with = [&](const char* suffix) {
        const std::size_t m = std::char_traits<char>::length(suffix);
        return n >= m && word.compare(n - m, m, suffix) == 0;
    };
    if (ends_with("ies") && n >= 5) {
        return word.substr(0, n - 3) + "y";
    }
    if (ends_with("es") && n >= 5) {
        const char before = word[n - 3];
        const bool sibilant = before == 's' || before == 'x' || before == 'z' ||
                              (n >= 4 && (word.compare(n - 4, 2, "ch") == 0 ||
                                          word.compare(n - 4, 2, "sh") == 0));
        if (sibilant) return word.substr(0, n - 2);
    }
    if (word.back() == 's' && n >= 4 && !ends_with("ss") && !ends_with("us") &&
        !ends_with("is")) {
        return word.substr(0, n - 1);
    }
    if (ends_with("ing") && n >= 6) {
        std::string stem = word.substr(0, n - 3);
        if (stem.size() >= 4) return stem;
        return word;
    }
    if (ends_with("ed") && n >= 5) {
        std::string stem = word.substr(0, n - 2);
        if (stem.size() < 4) stem = word.substr(0, n - 1);
        return stem;
    }
    return word;
}

std::vector<std::string> tokenize_for_tfidf(const std::string& folded) {
    std::vector<std::string> tokens;
    const std::size_t n = folded.size();
    std::size_t i = 0;
    auto is_alnum = [&](std::size_t pos) {
        return pos < n && std::isalnum(static_cast<unsigned char>(folded[pos])) != 0;
    };
    auto is_digit = [&](std::size_t pos) {
        return pos < n && std::isdigit(static_cast<unsigned char>(folded[pos])) != 0;
    };
    while (i < n) {
        if (!is_alnum(i)) {
            ++i;
            continue;
        }
        std::string token;
        while (i < n) {
            if (is_alnum(i)) {
                token.push_back(folded[i]);
                ++i;
            } else if ((folded[i] == ',' || folded[i] == '.') && i > 0 &&
                       is_digit(i - 1) && is_digit(i + 1)) {
                // separator embedded in a number ("1,000", "3.5")
                token.push_back(folded[i]);
                ++i;
            } else {
                break;
            }
        }
        tokens.push_back(std::move(token));
    }
    return tokens;
}

} // namespace

std::vector<std::string> preprocess_statement(const std::string& text,
                                              const StopwordSet* stopwords) {
    const StopwordSet& stops = stopwords ? *stopwords : default_stopwords();
    std::vector<std::string> terms;
    for (std::string& token : tokenize_for_tfidf(casefold(text))) {
        if (stops.count(token)) continue;
        if (is_numeric_token(token)) {
            terms.push_back(canonicalize_number(token));
        } else {
            terms.push_back(lemmatize(token));
        }
    }
    return terms;
}

TfidfModel TfidfModel::fit(const std::vector<std::vector<std::string>>& term_lists) {
    TfidfModel model;
    model.document_count = term_lists.size();
    std::map<std::string, std::size_t> df;
    for (const auto& terms : term_lists) {
        std::map<std::string, bool> seen;
        for (const auto& t : terms) {
            if (!seen.count(t)) {
                seen[t] = true;
                ++df[t];
            }
        }
    }
    const double n = static_cast<double>(model.document_count);
    model.idf.reserve(df.size());
    for (const auto& [term, count] : df) {
        model.vocabulary[term] = model.idf.size();
        model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    return model;
}

namespace {

std::map<std::size_t, double> tfidf_vector(const std::vector<std::string>& terms,
                                           const TfidfModel& model) {
    std::map<std::size_t, double> v;
    for (const auto& t : terms) {
        auto it = model.vocabulary.find(t);
        if (it != model.vocabulary.end()) v[it->second] += 1.0;
    }
    for (auto& [idx, tf] : v) tf *= model.idf[idx];
    return v;
}

} // namespace

double tfidf_cosine(const std::vector<std::string>& a, const std::vector<std::string>& b,
                    const TfidfModel& model) {
    const auto va = tfidf_vector(a, model);
    const auto vb = tfidf_vector(b, model);
    if (va.empty() || vb.empty()) return 0.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [idx, w] : va) na += w * w;
    for (const auto& [idx, w] : vb) nb += w * w;
    auto it = va.begin();
    auto jt = vb.begin();
    while (it != va.end() && jt != vb.end()) {
        if (it->first < jt->first) {
            ++it;
        } else if (jt->first < it->first) {
            ++jt;
        } else {
            dot += it->second * jt->second;
            ++it;
            ++jt;
        }
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::size_t> diversity_filter_indices(const std::vector<std::string>& texts,
                                                  const std::vector<double>& scores,
                                                  const std::vector<NodeId>& ids,
                                                  double tau,
                                                  const StopwordSet* stopwords) {
    if (texts.size() != scores.size() || texts.size() != ids.size()) {
        throw ConfigError("diversity_filter: parallel arrays disagree in length");
    }
    if (tau < 0.0 || tau >= 1.0) {
        throw ConfigError("diversity_filter: tau must be in [0, 1)");
    }
    const std::size_t n = texts.size();
    std::vector<std::vector<std::string>> terms(n);
    for (std::size_t i = 0; i < n; ++i) {
        terms[i] = preprocess_statement(texts[i], stopwords);
    }
    const TfidfModel model = TfidfModel::fit(terms);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return ids[a] < ids[b];
    });

    const double limit = 1.0 - tau;
    std::vector<std::size_t> accepted;
    for (std::size_t idx : order) {
        bool keep = true;
        for (std::size_t kept : accepted) {
            if (tfidf_cosine(terms[idx], terms[kept], model) > limit) {
                keep = false;
                break;
            }
        }
        if (keep) accepted.push_back(idx);
    }
    std::sort(accepted.begin(), accepted.end());
    return accepted;
}

std::vector<ScoredStatement> diversity_filter(const std::vector<ScoredStatement>& candidates,
                                              const std::vector<std::string>& texts,
                                              double tau,
                                              const StopwordSet* stopwords) {
    std::vector<double> scores;
    std::vector<NodeId> ids;
    scores.reserve(candidates.size());
    ids.reserve(candidates.size());
    for (const auto& c : candidates) {
        scores.push_back(c.rank_score);
        ids.push_back(c.id);
    }
    std::vector<ScoredStatement> out;
    for (std::size_t idx : diversity_filter_indices(texts, scores, ids, tau, stopwords)) {
        out.push_back(candidates[idx]);
    }
    return out;
}

std::vector<double> EmbeddingReranker::score(const std::string& query,
                                             const std::vector<std::string>& candidates) const {
    const Vector q = embedder_.embed(query);
    std::vector<double> out;
    out.reserve(candidates.size());
    for (const Vector& v : embedder_.embed_batch(candidates)) {
        out.push_back(cosine_sim(q, v));
    }
    return out;
}

std::vector<ScoredStatement> rerank(const std::string& query,
                                    std::vector<ScoredStatement> candidates,
                                    const std::vector<std::string>& texts,
                                    const Reranker& reranker) {
    if (texts.size() != candidates.size()) {
        throw ConfigError("rerank: texts and candidates disagree in length");
    }
    if (candidates.empty()) return candidates;
    const std::vector<double> scores = reranker.score(query, texts);
    if (scores.size() != candidates.size()) {
        throw ProviderShapeError("reranker returned " + std::to_string(scores.size()) +
                                 " scores for " + std::to_string(candidates.size()) +
                                 " candidates");
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        candidates[i].rank_score = scores[i];
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const ScoredStatement& a, const ScoredStatement& b) {
                  if (a.rank_score != b.rank_score) return a.rank_score > b.rank_score;
                  return a.id < b.id;
              });
    return candidates;
}

} // namespace hlg
