#include "dataops/tfidf.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "dataops/lexer.hpp"

namespace dataops {

namespace {

constexpr const char* kSimilarity = "check_vector_similarity";

bool pure_number(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c); });
}

void split_words(std::string_view text, std::vector<std::string>& out) {
    std::string word;
    auto flush = [&] {
        if (!word.empty() && !pure_number(word)) out.push_back(word);
        word.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else {
            flush();
        }
    }
    flush();
}

}  // namespace

std::vector<std::string> tokenize_for_similarity(const std::string& sql) {
    std::vector<sql::Token> tokens;
    try {
        tokens = sql::tokenize(sql);
    } catch (const sql::LexError&) {
        return {};
    }
    std::vector<std::string> terms;
    for (const auto& tok : tokens) {
        switch (tok.kind) {
            case sql::TokenKind::Keyword:
                terms.push_back(sql::to_lower(tok.text));
                break;
            case sql::TokenKind::Identifier:
            case sql::TokenKind::QuotedIdentifier:
            case sql::TokenKind::Macro:
                split_words(tok.text, terms);
                break;
            default:
                break;  // numbers, strings, comments, punctuation
        }
    }
    return terms;
}

std::map<std::string, TermVector> build_tfidf(
    const std::map<std::string, std::vector<std::string>>& corpus) {
    const double n_docs = static_cast<double>(corpus.size());
    std::map<std::string, int> df;
    for (const auto& [doc, terms] : corpus) {
        std::set<std::string> seen(terms.begin(), terms.end());
        for (const auto& t : seen) ++df[t];
    }
    std::map<std::string, TermVector> vectors;
    for (const auto& [doc, terms] : corpus) {
        TermVector v;
        if (!terms.empty()) {
            std::map<std::string, int> counts;
            for (const auto& t : terms) ++counts[t];
            const double len = static_cast<double>(terms.size());
            double sum_sq = 0.0;
            for (const auto& [term, count] : counts) {
                double tf = count / len;
                double idf = std::log((1.0 + n_docs) / (1.0 + df[term])) + 1.0;
                double w = tf * idf;
                if (w != 0.0) {
                    v.weights[term] = w;
                    sum_sq += w * w;
                }
            }
            v.norm = std::sqrt(sum_sq);
        }
        vectors[doc] = std::move(v);
    }
    return vectors;
}

double cosine(const TermVector& a, const TermVector& b) {
    if (a.norm == 0.0 || b.norm == 0.0) return 0.0;
    const TermVector& small = a.weights.size() <= b.weights.size() ? a : b;
    const TermVector& large = a.weights.size() <= b.weights.size() ? b : a;
    double dot = 0.0;
    for (const auto& [term, w] : small.weights) {
        auto it = large.weights.find(term);
        if (it != large.weights.end()) dot += w * it->second;
    }
    return dot / (a.norm * b.norm);
}

std::vector<Finding> check_vector_similarity(const std::set<std::string>& changed,
                                             const ProjectSnapshot& snapshot,
                                             const PipelineConfig& cfg) {
    std::vector<Finding> findings;
    if (snapshot.models.empty()) return findings;

    std::map<std::string, std::vector<std::string>> corpus;
    for (const auto& model : snapshot.models)
        corpus[model.name] = tokenize_for_similarity(model.raw_sql);
    std::map<std::string, TermVector> vectors = build_tfidf(corpus);

    for (const auto& model : snapshot.models) {
        if (!changed.count(model.name) || !corpus[model.name].empty()) continue;
        bool lexable = true;
        try {
            sql::tokenize(model.raw_sql);
        } catch (const sql::LexError&) {
            lexable = false;
        }
        if (!lexable) {
            Finding f = make_model_finding(kSimilarity, Severity::Advisory, model.name,
                                           "model is unscorable for similarity (unlexable)");
            f.pinned_severity = true;
            findings.push_back(std::move(f));
        }
    }

    std::set<std::pair<std::string, std::string>> reported;
    for (const auto& model : snapshot.models) {
        if (!changed.count(model.name)) continue;
        for (const auto& other : snapshot.models) {
            if (other.name == model.name) continue;
            double score = cosine(vectors[model.name], vectors[other.name]);
            if (score < cfg.similarity_threshold) continue;
            std::string first = std::min(model.name, other.name);
            std::string second = std::max(model.name, other.name);
            if (!reported.insert({first, second}).second) continue;
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.4f", score);
            findings.push_back(make_model_finding(
                kSimilarity, Severity::Warning, first,
                "models '" + first + "' and '" + second + "' have cosine similarity " +
                    buf + " (threshold " + std::to_string(cfg.similarity_threshold).substr(0, 4) +
                    "); consolidate logic or extend the existing model"));
        }
    }
    std::sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
        return std::tie(*a.model, a.message) < std::tie(*b.model, b.message);
    });
    return findings;
}

}  // namespace dataops
