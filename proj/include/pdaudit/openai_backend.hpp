#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "evaluation.hpp"
#include "model_gateway.hpp"

namespace pdaudit {

/// Maps a word to the token ids that spell it (for logit bias).
using TokenEncoder = std::function<std::vector<long long>(std::string_view)>;

struct OpenAIConfig {
    std::string base_url = "http://127.0.0.1:8000";  // scheme://host:port
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string api_key;
    bool logprobs = true;
    bool seed = true;
    std::chrono::seconds timeout{60};
    std::size_t max_bias_entries = 300;
};

/// Chat-completions client for OpenAI-compatible servers (vLLM, llama.cpp,
/// hosted APIs behind a plain-HTTP proxy). Logit bias is only offered when a
/// token encoder is supplied.
class OpenAIBackend : public Backend {
public:
    explicit OpenAIBackend(OpenAIConfig config, TokenEncoder encoder = {})
        : config_(std::move(config)), encoder_(std::move(encoder)) {
        if (config_.model.empty()) throw InvalidArgument("openai backend: model name required");
        caps_.name = config_.model;
        caps_.exposes_logprobs = config_.logprobs;
        caps_.supports_logit_bias = static_cast<bool>(encoder_);
        caps_.supports_seed = config_.seed;
    }

    const BackendCapabilities& capabilities() const override { return caps_; }

    nlohmann::json request_body(const ModelRequest& req) const {
        nlohmann::json body{{"model", config_.model},
                            {"messages",
                             {{{"role", "system"}, {"content", req.system_instruction}},
                              {{"role", "user"}, {"content", req.prompt}}}},
                            {"temperature", req.temperature},
                            {"max_tokens", req.max_tokens}};
        if (req.seed) body["seed"] = *req.seed;
        if (req.logprobs) {
            body["logprobs"] = true;
            body["top_logprobs"] = req.top_logprobs;
        }
        if (!req.logit_bias.empty() && encoder_) {
            auto bias = token_bias(req.logit_bias);
            if (!bias.empty()) {
                nlohmann::json b = nlohmann::json::object();
                for (const auto& [id, v] : bias) b[std::to_string(id)] = v;
                body["logit_bias"] = std::move(b);
            }
        }
        return body;
    }

    ModelResponse complete(const ModelRequest& req) override {
        httplib::Client cli(config_.base_url);
        cli.set_connection_timeout(config_.timeout);
        cli.set_read_timeout(config_.timeout);
        httplib::Headers headers;
        if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
        auto res = cli.Post(config_.path, headers, request_body(req).dump(), "application/json");
        if (!res) throw TransportError(caps_.name + ": " + httplib::to_string(res.error()));
        if (res->status == 429 || res->status >= 500) {
            throw TransportError(caps_.name + ": HTTP " + std::to_string(res->status));
        }
        if (res->status != 200) throw Error(caps_.name + ": HTTP " + std::to_string(res->status) + ": " + res->body);
        return parse_response(res->body);
    }

    static ModelResponse parse_response(const std::string& body) {
        ModelResponse out;
        try {
            auto j = nlohmann::json::parse(body);
            const auto& choice = j.at("choices").at(0);
            const auto& content = choice.at("message").value("content", nlohmann::json());
            out.text = content.is_string() ? content.get<std::string>() : "";
            if (choice.contains("logprobs") && choice.at("logprobs").is_object() &&
                choice.at("logprobs").contains("content") && choice.at("logprobs").at("content").is_array()) {
                std::vector<TokenLogprob> toks;
                for (const auto& t : choice.at("logprobs").at("content")) {
                    toks.push_back({t.at("token").get<std::string>(), t.at("logprob").get<double>()});
                }
                out.tokens = std::move(toks);
            }
        } catch (const nlohmann::json::exception& e) {
            throw TransportError(std::string("malformed completion response: ") + e.what());
        }
        return out;
    }

private:
    // word biases to token-id biases; a token shared by several words keeps the strongest bias
    std::map<long long, double> token_bias(const std::map<std::string, double>& words) const {
        std::map<long long, double> ids;
        for (const auto& [word, bias] : words) {
            for (const auto& spelling : {word, " " + word}) {
                for (auto id : encoder_(spelling)) {
                    auto [it, inserted] = ids.emplace(id, bias);
                    if (!inserted) it->second = std::min(it->second, bias);
                }
            }
        }
        if (ids.size() <= config_.max_bias_entries) return ids;
        std::vector<std::pair<long long, double>> v(ids.begin(), ids.end());
        std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
        v.resize(config_.max_bias_entries);
        return {v.begin(), v.end()};
    }

    OpenAIConfig config_;
    TokenEncoder encoder_;
    BackendCapabilities caps_;
};

/// Sentence embeddings from an OpenAI-compatible /v1/embeddings endpoint.
/// Failures surface as TransportError, which matching turns into a
/// containment-only verdict.
class OpenAIEmbedding : public EmbeddingProvider {
public:
    explicit OpenAIEmbedding(OpenAIConfig config) : config_(std::move(config)) {
        if (config_.path == "/v1/chat/completions") config_.path = "/v1/embeddings";
    }

    std::vector<double> embed(std::string_view input) const override {
        const std::string key(input);
        {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        }
        httplib::Client cli(config_.base_url);
        cli.set_read_timeout(config_.timeout);
        httplib::Headers headers;
        if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
        nlohmann::json body{{"model", config_.model}, {"input", key}};
        auto res = cli.Post(config_.path, headers, body.dump(), "application/json");
        if (!res || res->status != 200) throw TransportError("embedding request failed");
        std::vector<double> v;
        try {
            v = nlohmann::json::parse(res->body).at("data").at(0).at("embedding").get<std::vector<double>>();
        } catch (const nlohmann::json::exception& e) {
            throw TransportError(std::string("malformed embedding response: ") + e.what());
        }
        std::lock_guard lock(mutex_);
        cache_[key] = v;
        return v;
    }

private:
    OpenAIConfig config_;
    mutable std::mutex mutex_;
    mutable std::map<std::string, std::vector<double>> cache_;
};

/// Encoder backed by a JSON vocabulary file {"token text": id, ...}; a word
/// maps to its id when the vocabulary holds it as a single token.
inline TokenEncoder vocabulary_encoder(const nlohmann::json& vocab) {
    auto table = std::make_shared<std::map<std::string, long long>>();
    for (const auto& [tok, id] : vocab.items()) (*table)[tok] = id.get<long long>();
    return [table](std::string_view word) -> std::vector<long long> {
        auto it = table->find(std::string(word));
        if (it == table->end()) return {};
        return {it->second};
    };
}

} // namespace pdaudit
