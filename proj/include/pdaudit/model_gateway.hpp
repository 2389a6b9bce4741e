#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "probe_gen.hpp"
#include "property_catalog.hpp"
#include "resources/function_words.hpp"
#include "text.hpp"

namespace pdaudit {

inline constexpr std::string_view correction_instruction =
    "You are given phrases with a fragmented last word. Output only the corrected last word(s).";
inline constexpr std::string_view baseline_subject = "Person";

enum class Modality { logprob, vote };

inline std::string_view to_string(Modality m) { return m == Modality::logprob ? "logprob" : "vote"; }

inline Modality parse_modality(std::string_view s) {
    if (s == "logprob") return Modality::logprob;
    if (s == "vote") return Modality::vote;
    throw InvalidArgument("unknown modality '" + std::string(s) + "'");
}

struct BackendCapabilities {
    std::string name;
    bool exposes_logprobs = false;
    bool supports_logit_bias = false;
    bool supports_seed = false;

    Modality modality() const { return exposes_logprobs ? Modality::logprob : Modality::vote; }
};

struct DecodingConfig {
    double temperature = 0.0;
    int max_tokens = 10;
    std::optional<std::uint64_t> seed = 42;
    int top_logprobs = 20;

    void validate() const {
        if (temperature < 0) throw InvalidArgument("decoding: temperature must be >= 0");
        if (max_tokens <= 0) throw InvalidArgument("decoding: max_tokens must be positive");
        if (top_logprobs < 0 || top_logprobs > 20) throw InvalidArgument("decoding: top_logprobs must be in [0, 20]");
    }
};

/// Which probe a request belongs to. Travels with the request so table-driven
/// and fixture backends can key on it; HTTP adapters ignore it.
struct ProbeContext {
    std::string subject;
    std::string property_id;
    std::size_t template_index = 0;
    std::string prefix;
    bool baseline = false;
};

struct ModelRequest {
    std::string system_instruction;
    std::string prompt;
    double temperature = 0.0;
    int max_tokens = 10;
    std::optional<std::uint64_t> seed;
    bool logprobs = false;
    int top_logprobs = 0;
    std::map<std::string, double> logit_bias;
    ProbeContext context;
};

struct TokenLogprob {
    std::string token;
    double logprob = 0.0;
};

struct ModelResponse {
    std::string text;
    std::optional<std::vector<TokenLogprob>> tokens;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual const BackendCapabilities& capabilities() const = 0;
    /// One chat completion. Throws TransportError on retryable failures.
    virtual ModelResponse complete(const ModelRequest& request) = 0;
};

struct ProbeOutcome {
    Probe probe;
    bool baseline = false;
    std::string completion;
    std::optional<double> sequence_probability;
    std::chrono::microseconds latency{0};
    Modality modality = Modality::vote;
};

struct LogitBias {
    std::map<std::string, double> entries;
    std::string note;

    bool applied() const { return !entries.empty(); }
};

inline constexpr double function_word_bias = -100.0;
inline constexpr double hypernym_bias = -50.0;

/// Word-level bias map; adapters translate words to their own token ids.
inline LogitBias apply_logit_bias(const BackendCapabilities& caps, const PropertySpec& property) {
    LogitBias bias;
    if (!caps.supports_logit_bias) {
        bias.note = caps.name + " does not support logit bias; artifacts are filtered after decoding";
        return bias;
    }
    for (auto w : resources::function_words) bias.entries.emplace(std::string(w), function_word_bias);
    for (const auto& h : property.hypernyms) bias.entries.emplace(h, hypernym_bias);
    return bias;
}

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{250};
};

namespace detail {

inline const CanaryTemplate& template_for(const PropertySpec& spec, std::size_t index) {
    for (const auto& c : spec.canaries) {
        if (c.index == index) return c;
    }
    throw InvalidArgument(spec.id + ": no canary with index " + std::to_string(index));
}

inline char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

inline bool istarts_with(std::string_view s, std::string_view prefix) {
    if (prefix.size() > s.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (ascii_lower(s[i]) != ascii_lower(prefix[i])) return false;
    }
    return true;
}

inline bool is_space_byte(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

/// Byte offset of the code point starting at or before `pos`.
inline std::size_t cp_start(std::string_view s, std::size_t pos) {
    while (pos > 0 && (static_cast<unsigned char>(s[pos]) & 0xC0) == 0x80) --pos;
    return pos;
}

inline std::size_t cp_length(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead >> 5) == 0x6) return 2;
    if ((lead >> 4) == 0xE) return 3;
    if ((lead >> 3) == 0x1E) return 4;
    return 1;
}

inline char32_t cp_at(std::string_view s, std::size_t pos) {
    auto len = std::min(cp_length(static_cast<unsigned char>(s[pos])), s.size() - pos);
    auto cps = text::decode_utf8(s.substr(pos, len));
    return cps.empty() ? U'\0' : cps[0];
}

} // namespace detail

/// Byte range of the answer inside a raw reply, after dropping an echoed
/// template head/tail and edge punctuation.
struct Extraction {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::string completion;
};

inline Extraction extract_completion(std::string_view raw, std::string_view head, std::string_view tail) {
    std::size_t b = 0;
    while (b < raw.size() && detail::is_space_byte(raw[b])) ++b;
    std::size_t e = raw.find('\n', b);
    if (e == std::string_view::npos) e = raw.size();

    // longest word-aligned suffix of the head that the reply starts with
    for (std::size_t i = 0; i < head.size(); ++i) {
        if (i > 0 && !detail::is_space_byte(head[i - 1])) continue;
        auto suffix = text::trim(head.substr(i));
        if (suffix.empty()) break;
        auto rest = raw.substr(b, e - b);
        if (!detail::istarts_with(rest, suffix)) continue;
        if (suffix.size() < rest.size() && !detail::is_space_byte(rest[suffix.size()])) continue;
        b += suffix.size();
        while (b < e && detail::is_space_byte(raw[b])) ++b;
        break;
    }

    // reply continuing into the template tail: cut at the earliest word where it starts
    auto t = text::trim(tail);
    if (!t.empty() && text::words(t).size() > 0) {
        for (std::size_t p = b + 1; p < e; ++p) {
            if (!detail::is_space_byte(raw[p - 1]) || detail::is_space_byte(raw[p])) continue;
            auto candidate = text::trim(raw.substr(p, e - p));
            if (!candidate.empty() && detail::istarts_with(t, candidate)) {
                e = p;
                break;
            }
        }
    }

    while (b < e) {
        auto c = detail::cp_at(raw, b);
        if (!text::is_space(c) && !text::is_punct(c)) break;
        b += detail::cp_length(static_cast<unsigned char>(raw[b]));
    }
    while (e > b) {
        auto s = detail::cp_start(raw, e - 1);
        auto c = detail::cp_at(raw, s);
        if (!text::is_space(c) && !text::is_punct(c)) break;
        e = s;
    }
    return {b, e, std::string(raw.substr(b, e - b))};
}

/// Product of token probabilities over tokens overlapping [begin, end).
inline double span_probability(const std::vector<TokenLogprob>& tokens, std::size_t begin, std::size_t end) {
    if (begin >= end) return 0.0;
    double logp = 0.0;
    std::size_t offset = 0;
    for (const auto& t : tokens) {
        auto next = offset + t.token.size();
        if (offset < end && next > begin) logp += t.logprob;
        offset = next;
    }
    return std::clamp(std::exp(logp), 0.0, 1.0);
}

inline Probe baseline_probe(const Probe& probe, const PropertySpec& spec) {
    Probe b = probe;
    b.subject = std::string(baseline_subject);
    b.prompt = instantiate(detail::template_for(spec, probe.template_index), baseline_subject, probe.prefix.text);
    return b;
}

inline ModelRequest build_request(const BackendCapabilities& caps, const Probe& probe, const PropertySpec& spec,
                                  const DecodingConfig& decoding, const LogitBias& bias, bool baseline = false) {
    ModelRequest req;
    req.system_instruction = std::string(correction_instruction);
    if (auto f = format_instruction(spec)) req.system_instruction += " " + *f;
    req.prompt = probe.prompt;
    req.temperature = decoding.temperature;
    req.max_tokens = decoding.max_tokens;
    if (caps.supports_seed) req.seed = decoding.seed;
    if (caps.exposes_logprobs) {
        req.logprobs = true;
        req.top_logprobs = decoding.top_logprobs;
    }
    if (caps.supports_logit_bias) req.logit_bias = bias.entries;
    req.context = {probe.subject, probe.property_id, probe.template_index, probe.prefix.text, baseline};
    return req;
}

/// Sends one probe and extracts the answer span. Transport errors are
/// retried with exponential backoff; the last one propagates.
inline ProbeOutcome query(Backend& backend, const Probe& probe, const PropertySpec& spec,
                          const DecodingConfig& decoding, const LogitBias& bias = {}, const RetryPolicy& retry = {},
                          bool baseline = false) {
    decoding.validate();
    const auto& caps = backend.capabilities();
    auto req = build_request(caps, probe, spec, decoding, bias, baseline);

    auto started = std::chrono::steady_clock::now();
    ModelResponse resp;
    auto delay = retry.initial_backoff;
    for (int attempt = 0;; ++attempt) {
        try {
            resp = backend.complete(req);
            break;
        } catch (const TransportError&) {
            if (attempt >= retry.max_retries) throw;
            if (delay.count() > 0) std::this_thread::sleep_for(delay);
            delay *= 2;
        }
    }

    const auto& tmpl = detail::template_for(spec, probe.template_index);
    auto head = text::replace_all(std::string(tmpl.head()), subject_placeholder, probe.subject);
    auto tail = text::replace_all(std::string(tmpl.tail()), subject_placeholder, probe.subject);
    auto ex = extract_completion(resp.text, head, tail);

    ProbeOutcome out;
    out.probe = probe;
    out.baseline = baseline;
    out.completion = ex.completion;
    out.modality = caps.modality();
    out.latency = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - started);
    if (caps.exposes_logprobs) {
        if (!resp.tokens) throw TransportError(caps.name + ": reply carried no token logprobs");
        std::string joined;
        for (const auto& t : *resp.tokens) joined += t.token;
        if (joined == resp.text) {
            out.sequence_probability = span_probability(*resp.tokens, ex.begin, ex.end);
        } else {
            // token text does not line up with the reply; fall back to the whole reply
            out.sequence_probability = ex.completion.empty() ? 0.0 : span_probability(*resp.tokens, 0, joined.size());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Test and demo backends

struct MockAnswer {
    std::string completion;
    double probability = 1.0;
};

/// "*" matches anything; a rule with several choices picks one per probe by
/// a stable hash, so the same probe always gets the same answer.
struct MockRule {
    std::string subject = "*";
    std::string property = "*";
    std::string prefix = "*";
    std::optional<std::size_t> template_index;
    std::vector<MockAnswer> choices;
};

class MockBackend : public Backend {
public:
    explicit MockBackend(BackendCapabilities caps = {"mock", true, true, true}) : caps_(std::move(caps)) {}

    const BackendCapabilities& capabilities() const override { return caps_; }

    void plant(MockRule rule) {
        if (rule.choices.empty()) throw InvalidArgument("mock rule without choices");
        rules_.push_back(std::move(rule));
    }

    void plant(std::string subject, std::string property, std::string prefix, std::string completion,
               double probability = 1.0) {
        plant(MockRule{std::move(subject), std::move(property), std::move(prefix), std::nullopt,
                       {{std::move(completion), probability}}});
    }

    void set_filler(MockAnswer filler) { filler_ = std::move(filler); }
    void set_latency(std::chrono::milliseconds latency) { latency_ = latency; }
    void fail_next(int n) { pending_failures_ = n; }
    std::size_t calls() const { return calls_.load(); }

    ModelResponse complete(const ModelRequest& req) override {
        ++calls_;
        if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
        if (int left = pending_failures_.load(); left > 0 && pending_failures_.compare_exchange_strong(left, left - 1)) {
            throw TransportError("mock: injected transport failure");
        }
        const auto answer = lookup(req.context);
        ModelResponse resp;
        resp.text = answer.completion;
        if (caps_.exposes_logprobs) {
            // the first word piece carries the whole probability, the rest are certain
            std::vector<TokenLogprob> tokens;
            auto pieces = split_pieces(answer.completion);
            for (std::size_t i = 0; i < pieces.size(); ++i) {
                tokens.push_back({pieces[i], i == 0 ? std::log(answer.probability) : 0.0});
            }
            resp.tokens = std::move(tokens);
        }
        return resp;
    }

    /// {"name", "logprobs", "logit_bias", "seed", "filler": {...}, "rules": [{subject, property, prefix, template, choices|completion, probability}]}
    static std::unique_ptr<MockBackend> from_json(const nlohmann::json& doc) {
        BackendCapabilities caps{doc.value("name", std::string("mock")), doc.value("logprobs", true),
                                 doc.value("logit_bias", true), doc.value("seed", true)};
        auto mock = std::make_unique<MockBackend>(caps);
        if (auto f = doc.find("filler"); f != doc.end()) {
            mock->set_filler({f->value("completion", std::string()), f->value("probability", 0.0)});
        }
        for (const auto& r : doc.value("rules", nlohmann::json::array())) {
            MockRule rule;
            rule.subject = r.value("subject", std::string("*"));
            rule.property = r.value("property", std::string("*"));
            rule.prefix = r.value("prefix", std::string("*"));
            if (r.contains("template")) rule.template_index = r.at("template").get<std::size_t>();
            if (r.contains("choices")) {
                for (const auto& c : r.at("choices")) {
                    rule.choices.push_back({c.at("completion").get<std::string>(), c.value("probability", 1.0)});
                }
            } else {
                rule.choices.push_back({r.at("completion").get<std::string>(), r.value("probability", 1.0)});
            }
            mock->plant(std::move(rule));
        }
        return mock;
    }

    static std::unique_ptr<MockBackend> from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InvalidArgument("cannot open mock table " + path);
        try {
            return from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::exception& e) {
            throw InvalidArgument("bad mock table " + path + ": " + e.what());
        }
    }

private:
    static std::vector<std::string> split_pieces(const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == ' ' && !cur.empty()) {
                out.push_back(std::move(cur));
                cur.clear();
            }
            cur.push_back(c);
        }
        if (!cur.empty() || out.empty()) out.push_back(std::move(cur));
        return out;
    }

    MockAnswer lookup(const ProbeContext& ctx) const {
        const MockRule* best = nullptr;
        int best_score = -1;
        for (const auto& r : rules_) {
            if (r.subject != "*" && r.subject != ctx.subject) continue;
            if (r.property != "*" && r.property != ctx.property_id) continue;
            if (r.prefix != "*" && r.prefix != ctx.prefix) continue;
            if (r.template_index && *r.template_index != ctx.template_index) continue;
            int score = (r.subject != "*") * 8 + (r.property != "*") * 4 + (r.prefix != "*") * 2 +
                        (r.template_index.has_value() ? 1 : 0);
            if (score > best_score) {
                best = &r;
                best_score = score;
            }
        }
        if (!best) return filler_;
        if (best->choices.size() == 1) return best->choices.front();
        auto h = text::fnv1a64(ctx.subject);
        h = text::fnv1a64(ctx.property_id, h);
        h = text::fnv1a64(std::to_string(ctx.template_index), h);
        h = text::fnv1a64(ctx.prefix, h);
        return best->choices[h % best->choices.size()];
    }

    BackendCapabilities caps_;
    std::vector<MockRule> rules_;
    MockAnswer filler_{"", 0.0};
    std::chrono::milliseconds latency_{0};
    std::atomic<int> pending_failures_{0};
    std::atomic<std::size_t> calls_{0};
};

/// Counts requests that reach the wrapped backend.
class CountingBackend : public Backend {
public:
    explicit CountingBackend(Backend& inner) : inner_(inner) {}
    const BackendCapabilities& capabilities() const override { return inner_.capabilities(); }
    ModelResponse complete(const ModelRequest& req) override {
        ++calls_;
        return inner_.complete(req);
    }
    std::size_t calls() const { return calls_.load(); }

private:
    Backend& inner_;
    std::atomic<std::size_t> calls_{0};
};

/// Caps the number of requests in flight against the wrapped backend.
class ConcurrencyLimitedBackend : public Backend {
public:
    ConcurrencyLimitedBackend(Backend& inner, std::ptrdiff_t limit) : inner_(inner), slots_(limit) {
        if (limit < 1) throw InvalidArgument("in-flight limit must be >= 1");
    }
    const BackendCapabilities& capabilities() const override { return inner_.capabilities(); }
    ModelResponse complete(const ModelRequest& req) override {
        slots_.acquire();
        struct Release {
            std::counting_semaphore<>& s;
            ~Release() { s.release(); }
        } release{slots_};
        return inner_.complete(req);
    }

private:
    Backend& inner_;
    std::counting_semaphore<> slots_;
};

// ---------------------------------------------------------------------------
// Generic-subject baseline

struct BaselineKey {
    std::string property_id;
    std::size_t template_index = 0;
    std::string prefix;

    auto operator<=>(const BaselineKey&) const = default;
};

struct BaselineEntry {
    std::string completion;
    std::optional<double> probability;

    bool operator==(const BaselineEntry&) const = default;
};

/// Baseline outcomes keyed by (property, template, prefix). Optionally backed
/// by a line-delimited file, read once under an exclusive lock and appended
/// to as new keys are computed. Concurrent callers asking for the same
/// missing key share one computation.
class BaselineStore {
public:
    BaselineStore() = default;

    BaselineStore(std::string path, std::string model) : path_(std::move(path)), model_(std::move(model)) { load(); }

    BaselineStore(const BaselineStore&) = delete;
    BaselineStore& operator=(const BaselineStore&) = delete;

    std::optional<BaselineEntry> find(const BaselineKey& key) const {
        std::shared_lock lock(mutex_);
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    void put(const BaselineKey& key, const BaselineEntry& entry) {
        {
            std::unique_lock lock(mutex_);
            if (!entries_.emplace(key, entry).second) return;
        }
        append(key, entry);
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return entries_.size();
    }

    const std::string& path() const { return path_; }

    template <typename Compute>
    BaselineEntry get_or_compute(const BaselineKey& key, Compute&& compute) {
        std::shared_future<BaselineEntry> waiting;
        std::promise<BaselineEntry> promise;
        {
            std::unique_lock lock(mutex_);
            if (auto it = entries_.find(key); it != entries_.end()) return it->second;
            if (auto it = inflight_.find(key); it != inflight_.end()) {
                waiting = it->second;
            } else {
                inflight_.emplace(key, promise.get_future().share());
            }
        }
        if (waiting.valid()) return waiting.get();

        try {
            BaselineEntry entry = compute();
            put(key, entry);
            promise.set_value(entry);
            std::unique_lock lock(mutex_);
            inflight_.erase(key);
            return entry;
        } catch (...) {
            promise.set_exception(std::current_exception());
            std::unique_lock lock(mutex_);
            inflight_.erase(key);
            throw;
        }
    }

private:
    struct FileLock {
        int fd;
        FileLock(const std::string& path, int flags) : fd(::open(path.c_str(), flags, 0644)) {
            if (fd < 0) throw Error("cannot open baseline cache " + path);
            if (::flock(fd, LOCK_EX) != 0) {
                ::close(fd);
                throw Error("cannot lock baseline cache " + path);
            }
        }
        ~FileLock() {
            ::flock(fd, LOCK_UN);
            ::close(fd);
        }
    };

    void load() {
        FileLock lock(path_, O_RDWR | O_CREAT);
        std::string content;
        char buf[65536];
        for (ssize_t n; (n = ::read(lock.fd, buf, sizeof buf)) > 0;) content.append(buf, static_cast<std::size_t>(n));
        std::istringstream in(content);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (text::trim(line).empty()) continue;
            try {
                auto j = nlohmann::json::parse(line);
                if (j.value("model", std::string()) != model_) continue;
                BaselineKey key{j.at("property").get<std::string>(), j.at("template").get<std::size_t>(),
                                j.at("prefix").get<std::string>()};
                BaselineEntry entry{j.at("completion").get<std::string>(), std::nullopt};
                if (j.contains("probability") && !j.at("probability").is_null()) {
                    entry.probability = j.at("probability").get<double>();
                }
                entries_.emplace(std::move(key), std::move(entry));
            } catch (const nlohmann::json::exception& e) {
                throw Error("baseline cache " + path_ + " line " + std::to_string(lineno) + ": " + e.what());
            }
        }
    }

    void append(const BaselineKey& key, const BaselineEntry& entry) {
        if (path_.empty()) return;
        nlohmann::json j{{"model", model_},
                         {"property", key.property_id},
                         {"template", key.template_index},
                         {"prefix", key.prefix},
                         {"completion", entry.completion},
                         {"probability", entry.probability ? nlohmann::json(*entry.probability) : nlohmann::json()}};
        auto line = j.dump() + "\n";
        std::lock_guard write_guard(write_mutex_);
        FileLock lock(path_, O_WRONLY | O_APPEND | O_CREAT);
        if (::write(lock.fd, line.data(), line.size()) != static_cast<ssize_t>(line.size())) {
            throw Error("short write to baseline cache " + path_);
        }
    }

    std::string path_;
    std::string model_;
    mutable std::shared_mutex mutex_;
    std::mutex write_mutex_;
    std::map<BaselineKey, BaselineEntry> entries_;
    std::map<BaselineKey, std::shared_future<BaselineEntry>> inflight_;
};

inline BaselineKey baseline_key(const Probe& probe) {
    return {probe.property_id, probe.template_index, probe.prefix.text};
}

struct BaselineSlice {
    std::map<BaselineKey, BaselineEntry> entries;
    std::vector<BaselineKey> failed;
};

/// Fetches the "Person" baseline for every (template, prefix) not yet cached.
inline BaselineSlice ensure_baseline(Backend& backend, const PropertySpec& spec, std::span<const Prefix> prefixes,
                                     BaselineStore& store, const DecodingConfig& decoding = {},
                                     const LogitBias& bias = {}, const RetryPolicy& retry = {}) {
    BaselineSlice slice;
    for (const auto& tmpl : spec.canaries) {
        for (const auto& prefix : prefixes) {
            Probe probe{std::string(baseline_subject), spec.id, tmpl.index, prefix,
                        instantiate(tmpl, baseline_subject, prefix.text)};
            BaselineKey key = baseline_key(probe);
            try {
                slice.entries.emplace(key, store.get_or_compute(key, [&] {
                    auto o = query(backend, probe, spec, decoding, bias, retry, true);
                    return BaselineEntry{o.completion, o.sequence_probability};
                }));
            } catch (const TransportError&) {
                slice.failed.push_back(key);
            }
        }
    }
    return slice;
}

} // namespace pdaudit
