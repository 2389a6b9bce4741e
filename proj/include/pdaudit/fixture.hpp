#pragma once

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "model_gateway.hpp"
#include "text.hpp"

namespace pdaudit {

/// Total key of a recorded model reply.
struct FixtureKey {
    std::string subject;
    std::string property_id;
    std::size_t template_index = 0;
    std::string prefix;
    bool baseline = false;

    auto operator<=>(const FixtureKey&) const = default;

    static FixtureKey from(const ProbeContext& c) { return {c.subject, c.property_id, c.template_index, c.prefix, c.baseline}; }

    std::string describe() const {
        return subject + " / " + property_id + " / template " + std::to_string(template_index) + " / '" + prefix + "'" +
               (baseline ? " (baseline)" : "");
    }
};

namespace detail {

inline nlohmann::ordered_json caps_to_json(const BackendCapabilities& c) {
    return {{"name", c.name}, {"logprobs", c.exposes_logprobs}, {"logit_bias", c.supports_logit_bias}, {"seed", c.supports_seed}};
}

inline BackendCapabilities caps_from_json(const nlohmann::json& j) {
    BackendCapabilities c;
    c.name = j.at("name").get<std::string>();
    c.exposes_logprobs = j.value("logprobs", false);
    c.supports_logit_bias = j.value("logit_bias", false);
    c.supports_seed = j.value("seed", false);
    return c;
}

inline std::string utc_timestamp() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace detail

/// Append-only fixture file: one metadata line, then one line per reply.
class FixtureWriter {
public:
    FixtureWriter(const std::string& path, const BackendCapabilities& caps) : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw FixtureError("cannot write fixture " + path);
        nlohmann::ordered_json meta{{"type", "meta"}, {"version", 1}, {"backend", detail::caps_to_json(caps)},
                                    {"created", detail::utc_timestamp()}};
        out_ << meta.dump() << "\n";
        out_.flush();
    }

    void append(const FixtureKey& key, const ModelResponse& response) {
        nlohmann::ordered_json j{{"type", "probe"},       {"subject", key.subject}, {"property", key.property_id},
                                 {"template", key.template_index}, {"prefix", key.prefix}, {"baseline", key.baseline},
                                 {"text", response.text}};
        if (response.tokens) {
            auto tokens = nlohmann::ordered_json::array();
            for (const auto& t : *response.tokens) tokens.push_back({t.token, t.logprob});
            j["tokens"] = std::move(tokens);
        } else {
            j["tokens"] = nullptr;
        }
        std::lock_guard lock(mutex_);
        if (!written_.insert(key).second) return;
        out_ << j.dump() << "\n";
        out_.flush();
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return written_.size();
    }

private:
    std::ofstream out_;
    mutable std::mutex mutex_;
    std::set<FixtureKey> written_;
};

/// Passes requests through to a live backend and records every reply.
class RecordingBackend : public Backend {
public:
    RecordingBackend(Backend& inner, FixtureWriter& writer) : inner_(inner), writer_(writer) {}

    const BackendCapabilities& capabilities() const override { return inner_.capabilities(); }

    ModelResponse complete(const ModelRequest& request) override {
        auto resp = inner_.complete(request);
        writer_.append(FixtureKey::from(request.context), resp);
        return resp;
    }

private:
    Backend& inner_;
    FixtureWriter& writer_;
};

/// Serves recorded replies; never touches the network. An unrecorded key is
/// a FixtureError (not retried).
class ReplayBackend : public Backend {
public:
    static ReplayBackend from_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw FixtureError("cannot open fixture " + path);
        ReplayBackend r;
        std::string line;
        std::size_t lineno = 0;
        bool have_meta = false;
        while (std::getline(in, line)) {
            ++lineno;
            if (text::trim(line).empty()) continue;
            const auto where = path + ":" + std::to_string(lineno) + ": ";
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw FixtureError(where + e.what());
            }
            try {
                auto type = j.value("type", std::string("probe"));
                if (type == "meta") {
                    if (have_meta) throw FixtureError(where + "second metadata line");
                    r.caps_ = detail::caps_from_json(j.at("backend"));
                    r.created_ = j.value("created", std::string());
                    have_meta = true;
                    continue;
                }
                FixtureKey key{j.at("subject").get<std::string>(), j.at("property").get<std::string>(),
                               j.at("template").get<std::size_t>(), j.at("prefix").get<std::string>(),
                               j.value("baseline", false)};
                ModelResponse resp;
                resp.text = j.at("text").get<std::string>();
                if (j.contains("tokens") && !j.at("tokens").is_null()) {
                    std::vector<TokenLogprob> toks;
                    // JSON has no -inf, so a zero-probability token is written as null
                    for (const auto& t : j.at("tokens")) {
                        const double lp = t.at(1).is_null() ? -std::numeric_limits<double>::infinity()
                                                            : t.at(1).get<double>();
                        toks.push_back({t.at(0).get<std::string>(), lp});
                    }
                    resp.tokens = std::move(toks);
                }
                if (!r.replies_.emplace(key, std::move(resp)).second) {
                    throw FixtureError(where + "duplicate key " + key.describe());
                }
            } catch (const nlohmann::json::exception& e) {
                throw FixtureError(where + e.what());
            }
        }
        if (!have_meta) throw FixtureError(path + ": missing metadata line");
        return r;
    }

    const BackendCapabilities& capabilities() const override { return caps_; }

    ModelResponse complete(const ModelRequest& request) override {
        ++calls_;
        auto it = replies_.find(FixtureKey::from(request.context));
        if (it == replies_.end()) {
            throw FixtureError("fixture has no reply for " + FixtureKey::from(request.context).describe());
        }
        return it->second;
    }

    std::size_t size() const { return replies_.size(); }
    std::size_t calls() const { return calls_.load(); }
    const std::string& created() const { return created_; }

    ReplayBackend(ReplayBackend&& o) noexcept
        : caps_(std::move(o.caps_)), created_(std::move(o.created_)), replies_(std::move(o.replies_)), calls_(o.calls_.load()) {}

private:
    ReplayBackend() = default;

    BackendCapabilities caps_;
    std::string created_;
    std::map<FixtureKey, ModelResponse> replies_;
    std::atomic<std::size_t> calls_{0};
};

} // namespace pdaudit
