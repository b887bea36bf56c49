#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <memory>
#include <semaphore>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "ckdiag/error.hpp"

namespace ckdiag {

enum class EmbeddingSource { hashing, external };
enum class SummaryProvider { extractive_lead, external };

struct EmbeddingVector {
    std::vector<double> values;
    EmbeddingSource source_kind = EmbeddingSource::hashing;
    bool degenerate = false;  // zero vector (empty input)

    std::size_t dim() const { return values.size(); }
};

struct SummaryText {
    std::string text;
    SummaryProvider provider = SummaryProvider::extractive_lead;
    bool fallback_used = false;  // external provider was unreachable
};

inline double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.degenerate || b.degenerate) throw InvalidArgument("cosine of a degenerate embedding");
    if (a.dim() != b.dim()) throw InvalidArgument("embedding dimension mismatch");
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) throw InvalidArgument("cosine of a zero-norm embedding");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Lowercased alphanumeric tokens; every other byte is a separator.
inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char ch : text) {
        if (std::isalnum(ch)) {
            cur.push_back(static_cast<char>(std::tolower(ch)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

namespace detail {

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x00000100000001B3ULL;
    }
    return h;
}

// Trims and collapses whitespace runs to single spaces.
inline std::string normalize_whitespace(const std::string& s) {
    std::string out;
    bool in_space = true;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            in_space = true;
        } else {
            if (in_space && !out.empty()) out.push_back(' ');
            out.push_back(static_cast<char>(c));
            in_space = false;
        }
    }
    return out;
}

// Splits on '.', '!' or '?' followed by whitespace (or end of text),
// keeping the terminator with its sentence.
inline std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> sentences;
    std::string cur;
    for (std::size_t i = 0; i < text.size(); ++i) {
        cur.push_back(text[i]);
        const char c = text[i];
        if ((c == '.' || c == '!' || c == '?') &&
            (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])))) {
            sentences.push_back(normalize_whitespace(cur));
            cur.clear();
        }
    }
    const std::string tail = normalize_whitespace(cur);
    if (!tail.empty()) sentences.push_back(tail);
    return sentences;
}

// Cuts text after its max_tokens-th token.
inline std::string truncate_tokens(const std::string& text, std::size_t max_tokens) {
    std::size_t count = 0;
    bool in_token = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const bool alnum = std::isalnum(static_cast<unsigned char>(text[i])) != 0;
        if (alnum && !in_token) {
            ++count;
            if (count > max_tokens) return normalize_whitespace(text.substr(0, i));
        }
        in_token = alnum;
    }
    return text;
}

}  // namespace detail

// Wire-protocol client for an external embedding/summarization service.
class ExternalTextClient {
public:
    virtual ~ExternalTextClient() = default;
    // POST /v1/embed {"texts": [...]} -> {"vectors": [[...]]}
    virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
    // POST /v1/summarize {"text": ...} -> {"summary": ...}
    virtual std::string summarize(const std::string& text) = 0;
};

// HTTP implementation of the wire protocol. In-flight requests are capped so
// a slow service cannot absorb every worker thread.
class HttpTextClient : public ExternalTextClient {
public:
    HttpTextClient(const std::string& base_url, int timeout_ms = 2000, int max_in_flight = 4)
        : client_(base_url), gate_(max_in_flight) {
        client_.set_connection_timeout(0, timeout_ms * 1000);
        client_.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    }

    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override {
        const nlohmann::json body = {{"texts", texts}};
        const nlohmann::json reply = post("/v1/embed", body);
        if (!reply.contains("vectors") || !reply["vectors"].is_array()) {
            throw ProviderError("embed reply missing 'vectors'");
        }
        auto vectors = reply["vectors"].get<std::vector<std::vector<double>>>();
        if (vectors.size() != texts.size()) {
            throw ProviderError("embed reply has wrong vector count");
        }
        return vectors;
    }

    std::string summarize(const std::string& text) override {
        const nlohmann::json reply = post("/v1/summarize", {{"text", text}});
        if (!reply.contains("summary") || !reply["summary"].is_string()) {
            throw ProviderError("summarize reply missing 'summary'");
        }
        return reply["summary"].get<std::string>();
    }

private:
    nlohmann::json post(const std::string& path, const nlohmann::json& body) {
        gate_.acquire();
        auto res = client_.Post(path, body.dump(), "application/json");
        gate_.release();
        if (!res) throw ProviderError("external text service unreachable at " + path);
        if (res->status != 200) {
            throw ProviderError("external text service returned HTTP " +
                                std::to_string(res->status) + " for " + path);
        }
        try {
            return nlohmann::json::parse(res->body);
        } catch (const std::exception& e) {
            throw ProviderError(std::string("external text service sent bad JSON: ") + e.what());
        }
    }

    httplib::Client client_;
    std::counting_semaphore<> gate_;
};

struct TextConfig {
    std::size_t embedding_dim = 256;
    std::size_t max_sentences = 3;
    std::size_t max_summary_tokens = 120;
    std::string external_base_url;  // empty = deterministic defaults only
    int external_timeout_ms = 2000;
    int external_max_in_flight = 4;

    bool uses_external() const { return !external_base_url.empty(); }
};

// Summarization + embedding provider. The defaults are pure functions of the
// input and configuration: lead-k extractive summaries and signed-hashing
// averaged token embeddings. When an external service is configured it takes
// over both roles; summarization falls back to the default if the service is
// unreachable, embedding does not (mixed embedding spaces are meaningless).
class TextProvider {
public:
    explicit TextProvider(TextConfig config = {}, std::shared_ptr<ExternalTextClient> client = nullptr)
        : config_(std::move(config)), client_(std::move(client)) {
        if (config_.uses_external() && !client_) {
            client_ = std::make_shared<HttpTextClient>(config_.external_base_url,
                                                       config_.external_timeout_ms,
                                                       config_.external_max_in_flight);
        }
    }

    const TextConfig& config() const { return config_; }

    SummaryText summarize(const std::string& text) const {
        return summarize(text, config_.max_sentences);
    }

    SummaryText summarize(const std::string& text, std::size_t max_sentences) const {
        if (client_) {
            try {
                return {client_->summarize(text), SummaryProvider::external, false};
            } catch (const ProviderError&) {
                SummaryText fallback = lead_summary(text, max_sentences);
                fallback.fallback_used = true;
                return fallback;
            }
        }
        return lead_summary(text, max_sentences);
    }

    EmbeddingVector embed_text(const std::string& text) const {
        if (client_) {
            auto vectors = client_->embed({text});
            return finish_external(std::move(vectors.front()));
        }
        return hash_embed(text);
    }

    // Mean of the per-title embeddings, renormalized.
    EmbeddingVector embed_alert_set(const std::vector<std::string>& titles) const {
        if (titles.empty()) throw InvalidArgument("embed_alert_set: empty title list");
        std::vector<EmbeddingVector> embs;
        if (client_) {
            for (auto& v : client_->embed(titles)) embs.push_back(finish_external(std::move(v)));
        } else {
            for (const auto& t : titles) embs.push_back(hash_embed(t));
        }
        EmbeddingVector mean;
        mean.source_kind = embs.front().source_kind;
        mean.values.assign(embs.front().dim(), 0.0);
        for (const auto& e : embs) {
            if (e.degenerate) continue;
            for (std::size_t i = 0; i < mean.dim(); ++i) mean.values[i] += e.values[i];
        }
        for (auto& v : mean.values) v /= static_cast<double>(embs.size());
        normalize(mean);
        return mean;
    }

private:
    SummaryText lead_summary(const std::string& text, std::size_t max_sentences) const {
        const auto sentences = detail::split_sentences(text);
        std::string out;
        for (std::size_t i = 0; i < sentences.size() && i < max_sentences; ++i) {
            if (!out.empty()) out.push_back(' ');
            out += sentences[i];
        }
        return {detail::truncate_tokens(out, config_.max_summary_tokens),
                SummaryProvider::extractive_lead, false};
    }

    // Signed feature hashing: each token contributes +/-1 to one of D
    // buckets; token vectors are averaged and the result L2-normalized.
    EmbeddingVector hash_embed(const std::string& text) const {
        EmbeddingVector e;
        e.source_kind = EmbeddingSource::hashing;
        e.values.assign(config_.embedding_dim, 0.0);
        const auto tokens = tokenize(text);
        for (const auto& tok : tokens) {
            const std::uint64_t h = detail::fnv1a64(tok);
            const std::size_t idx = static_cast<std::size_t>(h % config_.embedding_dim);
            const double sign = (h >> 63) ? -1.0 : 1.0;
            e.values[idx] += sign;
        }
        if (!tokens.empty()) {
            for (auto& v : e.values) v /= static_cast<double>(tokens.size());
        }
        normalize(e);
        return e;
    }

    EmbeddingVector finish_external(std::vector<double>&& values) const {
        if (values.size() != config_.embedding_dim) {
            throw ProviderError("external embedding dimension " + std::to_string(values.size()) +
                                " does not match configured " +
                                std::to_string(config_.embedding_dim));
        }
        for (double v : values) {
            if (!std::isfinite(v)) throw ProviderError("external embedding has non-finite entry");
        }
        EmbeddingVector e;
        e.values = std::move(values);
        e.source_kind = EmbeddingSource::external;
        normalize(e);
        return e;
    }

    static void normalize(EmbeddingVector& e) {
        double norm = 0;
        for (double v : e.values) norm += v * v;
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            e.degenerate = true;
            return;
        }
        for (auto& v : e.values) v /= norm;
        e.degenerate = false;
    }

    TextConfig config_;
    std::shared_ptr<ExternalTextClient> client_;
};

}  // namespace ckdiag
