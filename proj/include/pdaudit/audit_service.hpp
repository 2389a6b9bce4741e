#pragma once

#include <sqlite3.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <regex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "engine.hpp"
#include "errors.hpp"
#include "fixture.hpp"
#include "property_catalog.hpp"
#include "scoring.hpp"

namespace pdaudit {

struct ServiceConfig {
    std::size_t rate_limit = 20;  // enqueues per window, global
    std::chrono::milliseconds rate_window{60'000};
    std::size_t queue_cap = 100;
    std::chrono::milliseconds position_interval{1000};
    double low_confidence = 0.15;
};

// ---------------------------------------------------------------------------
// Rate limiting

/// Sliding-window limiter shared by every connection.
class RateLimiter {
public:
    using Clock = std::chrono::steady_clock;
    using Now = std::function<Clock::time_point()>;

    struct Decision {
        bool admitted = false;
        std::chrono::milliseconds retry_after{0};
    };

    RateLimiter(std::size_t limit, std::chrono::milliseconds window, Now now = [] { return Clock::now(); })
        : limit_(limit), window_(window), now_(std::move(now)) {}

    Decision admit() {
        std::lock_guard lock(mutex_);
        const auto t = now_();
        while (!admitted_.empty() && t - admitted_.front() >= window_) admitted_.pop_front();
        if (limit_ == 0) return {false, window_};
        if (admitted_.size() < limit_) {
            admitted_.push_back(t);
            return {true, {}};
        }
        auto wait = std::chrono::ceil<std::chrono::milliseconds>(admitted_.front() + window_ - t);
        return {false, std::max(wait, std::chrono::milliseconds(1))};
    }

private:
    std::size_t limit_;
    std::chrono::milliseconds window_;
    Now now_;
    std::mutex mutex_;
    std::deque<Clock::time_point> admitted_;
};

// ---------------------------------------------------------------------------
// Requests and results

/// What the browser sends: the name, the property and two-character cues.
/// Full values never reach the server.
struct AuditRequest {
    std::string subject;
    std::string property_id;
    std::vector<Prefix> prefixes;
    std::size_t expected_values = 1;
};

inline AuditRequest parse_audit_request(const nlohmann::json& j, const PropertyCatalog& catalog) {
    if (!j.is_object()) throw InvalidArgument("request body must be a JSON object");
    AuditRequest r;
    if (!j.contains("subject") || !j.at("subject").is_string()) throw InvalidArgument("subject: string required");
    r.subject = std::string(text::trim(j.at("subject").get<std::string>()));
    if (r.subject.empty() || r.subject.size() > 200) throw InvalidArgument("subject: 1 to 200 characters");
    if (!j.contains("property_id") || !j.at("property_id").is_string()) {
        throw InvalidArgument("property_id: string required");
    }
    r.property_id = j.at("property_id").get<std::string>();
    if (!catalog.find(r.property_id)) throw InvalidArgument("property_id: unknown property " + r.property_id);
    if (j.contains("prefixes")) {
        if (!j.at("prefixes").is_array()) throw InvalidArgument("prefixes: array required");
        for (const auto& p : j.at("prefixes")) {
            if (!p.is_string()) throw InvalidArgument("prefixes: strings required");
            auto parsed = parse_prefix(p.get<std::string>());
            if (!parsed) throw InvalidArgument("prefixes: each cue must be two letters or two digits");
            r.prefixes.push_back(*parsed);
        }
    }
    r.expected_values = std::max<std::size_t>(1, r.prefixes.size());
    if (j.contains("expected_values")) {
        const auto& m = j.at("expected_values");
        if (!m.is_number_integer() || m.get<long long>() < 1 || m.get<long long>() > 100) {
            throw InvalidArgument("expected_values: integer in [1, 100] required");
        }
        r.expected_values = m.get<std::size_t>();
    }
    return r;
}

inline nlohmann::ordered_json result_payload(const AssociationDistribution& d, const std::string& request_id,
                                             double low_confidence = 0.15) {
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& e : d.entries) entries.push_back({{"value", e.display}, {"share", e.share}});
    return {{"entries", std::move(entries)},
            {"confidence", d.confidence},
            {"low_confidence", d.confidence < low_confidence},
            {"request_id", request_id}};
}

using DiscoverRunner = std::function<AssociationDistribution(const AuditRequest&)>;

/// Runs the probing pipeline for one request against a backend.
inline DiscoverRunner engine_runner(Backend& backend, BaselineStore& baselines, const PropertyCatalog& catalog,
                                    AuditConfig config = {}) {
    return [&backend, &baselines, &catalog, config](const AuditRequest& req) {
        const auto& property = catalog.at(req.property_id);
        const auto seed = config.seed.value_or(default_seed(req.subject, property.id));
        auto plan = req.prefixes.empty()
                        ? build_counterfactual_plan(req.subject, property, config.k, seed)
                        : build_plan_from_prefixes(req.subject, property, req.prefixes, config.k, seed);
        return probe_and_score(backend, baselines, property, plan, req.expected_values, config)
            .scoring.distribution;
    };
}

inline std::string random_id() {
    static std::mutex m;
    static std::mt19937_64 gen{std::random_device{}()};
    std::lock_guard lock(m);
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(gen()),
                  static_cast<unsigned long long>(gen()));
    return buf;
}

// ---------------------------------------------------------------------------
// Queue

class QueueFull : public Error {
public:
    using Error::Error;
};

/// One queued discovery request. Completion is signalled once.
class AuditJob {
public:
    enum class State { queued, processing, done, failed };

    AuditJob(std::string id, AuditRequest request) : id_(std::move(id)), request_(std::move(request)) {}

    const std::string& id() const { return id_; }
    const AuditRequest& request() const { return request_; }
    std::chrono::steady_clock::time_point enqueued() const { return enqueued_; }

    State state() const {
        std::lock_guard lock(mutex_);
        return state_;
    }

    /// True once finished; waits up to `timeout` for that.
    bool wait_for(std::chrono::milliseconds timeout) const {
        std::unique_lock lock(mutex_);
        return cv_.wait_for(lock, timeout, [&] { return finished(); });
    }

    std::optional<nlohmann::ordered_json> result() const {
        std::lock_guard lock(mutex_);
        return result_;
    }
    std::string error() const {
        std::lock_guard lock(mutex_);
        return error_;
    }

private:
    friend class AuditQueue;

    bool finished() const { return state_ == State::done || state_ == State::failed; }

    void set_state(State s) {
        std::lock_guard lock(mutex_);
        state_ = s;
    }
    void finish(std::optional<nlohmann::ordered_json> result, std::string error) {
        {
            std::lock_guard lock(mutex_);
            result_ = std::move(result);
            error_ = std::move(error);
            state_ = result_ ? State::done : State::failed;
        }
        cv_.notify_all();
    }

    std::string id_;
    AuditRequest request_;
    std::chrono::steady_clock::time_point enqueued_ = std::chrono::steady_clock::now();
    mutable std::mutex mutex_;
    mutable std::condition_variable cv_;
    State state_ = State::queued;
    std::optional<nlohmann::ordered_json> result_;
    std::string error_;
};

/// FIFO drained by exactly one worker thread.
class AuditQueue {
public:
    AuditQueue(DiscoverRunner runner, std::size_t cap = 100, double low_confidence = 0.15)
        : runner_(std::move(runner)), cap_(cap), low_confidence_(low_confidence), worker_([this] { work(); }) {}

    ~AuditQueue() { shutdown(); }

    AuditQueue(const AuditQueue&) = delete;
    AuditQueue& operator=(const AuditQueue&) = delete;

    std::shared_ptr<AuditJob> submit(AuditRequest request) {
        auto job = std::make_shared<AuditJob>(random_id(), std::move(request));
        {
            std::lock_guard lock(mutex_);
            if (stopping_) throw QueueFull("service is shutting down");
            if (waiting_.size() >= cap_) throw QueueFull("queue is full (" + std::to_string(cap_) + " waiting)");
            waiting_.push_back(job);
        }
        cv_.notify_all();
        return job;
    }

    /// Requests ahead of `job`; 0 while it is processed or once finished.
    std::size_t position(const AuditJob& job) const {
        std::lock_guard lock(mutex_);
        auto it = std::find_if(waiting_.begin(), waiting_.end(), [&](const auto& j) { return j.get() == &job; });
        if (it == waiting_.end()) return 0;
        return static_cast<std::size_t>(it - waiting_.begin()) + (current_ ? 1 : 0);
    }

    std::size_t waiting() const {
        std::lock_guard lock(mutex_);
        return waiting_.size();
    }
    std::size_t peak_concurrency() const { return peak_.load(); }
    std::size_t processed() const { return processed_.load(); }

    void shutdown() {
        {
            std::lock_guard lock(mutex_);
            if (stopping_) return;
            stopping_ = true;
        }
        cv_.notify_all();
        if (worker_.joinable()) worker_.join();
        std::deque<std::shared_ptr<AuditJob>> left;
        {
            std::lock_guard lock(mutex_);
            left.swap(waiting_);
        }
        for (auto& j : left) j->finish(std::nullopt, "service is shutting down");
    }

private:
    void work() {
        for (;;) {
            std::shared_ptr<AuditJob> job;
            {
                std::unique_lock lock(mutex_);
                cv_.wait(lock, [&] { return stopping_ || !waiting_.empty(); });
                if (stopping_) return;
                job = waiting_.front();
                waiting_.pop_front();
                current_ = job;
            }
            const auto now_running = ++running_;
            peak_ = std::max(peak_.load(), now_running);
            job->set_state(AuditJob::State::processing);
            std::optional<nlohmann::ordered_json> result;
            std::string error;
            try {
                result = result_payload(runner_(job->request()), job->id(), low_confidence_);
            } catch (const std::exception& e) {
                error = e.what();
            }
            --running_;
            ++processed_;
            {
                std::lock_guard lock(mutex_);
                current_.reset();
            }
            job->finish(std::move(result), std::move(error));
        }
    }

    DiscoverRunner runner_;
    std::size_t cap_;
    double low_confidence_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<std::shared_ptr<AuditJob>> waiting_;
    std::shared_ptr<AuditJob> current_;
    bool stopping_ = false;
    std::atomic<std::size_t> running_{0}, peak_{0}, processed_{0};
    std::thread worker_;  // last: starts after the members above exist
};

// ---------------------------------------------------------------------------
// Server-sent events

struct SseEvent {
    std::string name;  // position, result or error
    nlohmann::ordered_json data;

    std::string wire() const { return "event: " + name + "\ndata: " + data.dump() + "\n\n"; }
};

/// Position now and then every `interval` until the job finishes, then exactly
/// one result or error event. Stops early when `sink` returns false (client gone).
inline void stream_discovery(const AuditQueue& queue, const AuditJob& job, std::chrono::milliseconds interval,
                             const std::function<bool(const SseEvent&)>& sink) {
    std::size_t last = queue.position(job);
    if (!sink({"position", {{"position", last}}})) return;
    while (!job.wait_for(interval)) {
        last = std::min(last, queue.position(job));
        if (!sink({"position", {{"position", last}}})) return;
    }
    if (auto r = job.result()) {
        sink({"result", *r});
    } else {
        sink({"error", {{"message", job.error()}}});
    }
}

// ---------------------------------------------------------------------------
// Study logging

inline const std::vector<std::string>& reaction_options() {
    static const std::vector<std::string> r{"neutral", "creeped out", "worried", "angry",
                                            "happy",   "confused",    "surprised", "embarrassed"};
    return r;
}

inline const std::vector<std::string>& answer_options() {
    static const std::vector<std::string> a{"yes", "no", "unsure"};
    return a;
}

inline constexpr std::size_t max_study_candidates = 10;

/// SQLite-backed store of result summaries and linked feedback. Holds only
/// opaque ids, property keys, model candidates and answers.
class StudyStore {
public:
    explicit StudyStore(const std::string& path = ":memory:") {
        if (sqlite3_open_v2(path.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                            nullptr) != SQLITE_OK) {
            std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
            sqlite3_close(db_);
            db_ = nullptr;
            throw StorageError("cannot open study store " + path + ": " + msg);
        }
        sqlite3_busy_timeout(db_, 5000);
        exec("PRAGMA foreign_keys = ON");
        exec("CREATE TABLE IF NOT EXISTS results ("
             " result_id TEXT PRIMARY KEY,"
             " participant_id TEXT NOT NULL,"
             " property_id TEXT NOT NULL,"
             " request_id TEXT NOT NULL,"
             " confidence REAL NOT NULL,"
             " candidates TEXT NOT NULL,"
             " created_at TEXT NOT NULL,"
             " UNIQUE (participant_id, property_id, request_id))");
        exec("CREATE TABLE IF NOT EXISTS feedback ("
             " result_id TEXT PRIMARY KEY REFERENCES results(result_id),"
             " top_correct TEXT NOT NULL,"
             " any_correct TEXT NOT NULL,"
             " privacy_violation TEXT NOT NULL,"
             " reactions TEXT NOT NULL,"
             " created_at TEXT NOT NULL)");
    }

    ~StudyStore() { sqlite3_close(db_); }
    StudyStore(const StudyStore&) = delete;
    StudyStore& operator=(const StudyStore&) = delete;

    struct Recorded {
        std::string result_id;
        bool created = false;
    };

    /// Idempotent per (participant, property, request): a repeat returns the
    /// existing result_id.
    Recorded record_result(const nlohmann::json& payload, const PropertyCatalog* catalog = nullptr) {
        const auto participant = id_field(payload, "participant_id");
        const auto request = id_field(payload, "request_id");
        if (!payload.contains("property_id") || !payload.at("property_id").is_string()) {
            throw InvalidArgument("property_id: string required");
        }
        const auto property = payload.at("property_id").get<std::string>();
        if (catalog ? !catalog->find(property) : !std::regex_match(property, std::regex("P[0-9]{1,8}"))) {
            throw InvalidArgument("property_id: unknown property");
        }
        if (!payload.contains("confidence") || !payload.at("confidence").is_number()) {
            throw InvalidArgument("confidence: number required");
        }
        const double confidence = payload.at("confidence").get<double>();
        if (!(confidence >= 0.0 && confidence <= 1.0)) throw InvalidArgument("confidence: must lie in [0, 1]");
        if (!payload.contains("candidates") || !payload.at("candidates").is_array()) {
            throw InvalidArgument("candidates: array required");
        }
        nlohmann::ordered_json candidates = nlohmann::ordered_json::array();
        for (const auto& c : payload.at("candidates")) {
            if (!c.is_object() || !c.contains("value") || !c.at("value").is_string() || !c.contains("share") ||
                !c.at("share").is_number()) {
                throw InvalidArgument("candidates: {value: string, share: number} required");
            }
            const double share = c.at("share").get<double>();
            if (!(share >= 0.0 && share <= 1.0)) throw InvalidArgument("candidates: share must lie in [0, 1]");
            auto value = c.at("value").get<std::string>();
            if (value.size() > 200) throw InvalidArgument("candidates: value too long");
            if (candidates.size() < max_study_candidates) candidates.push_back({{"value", value}, {"share", share}});
        }

        std::lock_guard lock(mutex_);
        Transaction tx(*this);
        const auto fresh = random_id();
        Statement ins(db_,
                      "INSERT OR IGNORE INTO results (result_id, participant_id, property_id, request_id, confidence,"
                      " candidates, created_at) VALUES (?, ?, ?, ?, ?, ?, ?)");
        ins.bind(1, fresh).bind(2, participant).bind(3, property).bind(4, request).bind(5, confidence);
        ins.bind(6, candidates.dump()).bind(7, detail::utc_timestamp());
        ins.step_done();
        const bool created = sqlite3_changes(db_) > 0;
        Statement sel(db_, "SELECT result_id FROM results WHERE participant_id = ? AND property_id = ? AND request_id = ?");
        sel.bind(1, participant).bind(2, property).bind(3, request);
        if (!sel.step_row()) throw StorageError("result row vanished");
        auto id = sel.column_text(0);
        tx.commit();
        return {id, created};
    }

    /// Links one feedback set to a result. The three answers are required;
    /// reactions are optional. A repeat for the same result keeps the first.
    bool record_feedback(const nlohmann::json& payload) {
        const auto result_id = id_field(payload, "result_id");
        auto answer = [&](const char* key) {
            if (!payload.contains(key) || !payload.at(key).is_string()) {
                throw InvalidArgument(std::string(key) + ": required (yes, no or unsure)");
            }
            auto v = payload.at(key).get<std::string>();
            const auto& opts = answer_options();
            if (std::find(opts.begin(), opts.end(), v) == opts.end()) {
                throw InvalidArgument(std::string(key) + ": must be yes, no or unsure");
            }
            return v;
        };
        const auto top = answer("top_correct");
        const auto any = answer("any_correct");
        const auto privacy = answer("privacy_violation");
        nlohmann::json reactions = nlohmann::json::array();
        if (payload.contains("reactions") && !payload.at("reactions").is_null()) {
            const auto& r = payload.at("reactions");
            if (!r.is_array()) throw InvalidArgument("reactions: array required");
            for (const auto& x : r) {
                const auto& opts = reaction_options();
                if (!x.is_string() || std::find(opts.begin(), opts.end(), x.get<std::string>()) == opts.end()) {
                    throw InvalidArgument("reactions: each must be one of the listed reactions");
                }
                if (std::find(reactions.begin(), reactions.end(), x) == reactions.end()) reactions.push_back(x);
            }
        }

        std::lock_guard lock(mutex_);
        Transaction tx(*this);
        Statement sel(db_, "SELECT 1 FROM results WHERE result_id = ?");
        sel.bind(1, result_id);
        if (!sel.step_row()) throw NotFound("unknown result_id");
        Statement ins(db_,
                      "INSERT OR IGNORE INTO feedback (result_id, top_correct, any_correct, privacy_violation,"
                      " reactions, created_at) VALUES (?, ?, ?, ?, ?, ?)");
        ins.bind(1, result_id).bind(2, top).bind(3, any).bind(4, privacy).bind(5, reactions.dump());
        ins.bind(6, detail::utc_timestamp());
        ins.step_done();
        const bool created = sqlite3_changes(db_) > 0;
        tx.commit();
        return created;
    }

    std::size_t count(const std::string& table) const {
        if (table != "results" && table != "feedback") throw InvalidArgument("unknown table " + table);
        std::lock_guard lock(mutex_);
        Statement s(db_, "SELECT COUNT(*) FROM " + table);
        s.step_row();
        return static_cast<std::size_t>(sqlite3_column_int64(s.get(), 0));
    }

    /// Every text cell of every table, for data-minimization audits.
    std::vector<std::string> text_cells() const {
        std::vector<std::string> out;
        std::lock_guard lock(mutex_);
        for (const char* table : {"results", "feedback"}) {
            Statement s(db_, std::string("SELECT * FROM ") + table);
            while (s.step_row()) {
                for (int c = 0; c < sqlite3_column_count(s.get()); ++c) {
                    if (sqlite3_column_type(s.get(), c) == SQLITE_TEXT) out.push_back(s.column_text(c));
                }
            }
        }
        return out;
    }

private:
    class Statement {
    public:
        Statement(sqlite3* db, const std::string& sql) : db_(db) {
            if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt_, nullptr) != SQLITE_OK) {
                throw StorageError(std::string("prepare: ") + sqlite3_errmsg(db));
            }
        }
        ~Statement() { sqlite3_finalize(stmt_); }
        Statement(const Statement&) = delete;
        Statement& operator=(const Statement&) = delete;

        Statement& bind(int i, const std::string& v) {
            check(sqlite3_bind_text(stmt_, i, v.c_str(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
            return *this;
        }
        Statement& bind(int i, double v) {
            check(sqlite3_bind_double(stmt_, i, v));
            return *this;
        }
        void step_done() {
            if (sqlite3_step(stmt_) != SQLITE_DONE) throw StorageError(std::string("write: ") + sqlite3_errmsg(db_));
        }
        bool step_row() {
            auto rc = sqlite3_step(stmt_);
            if (rc == SQLITE_ROW) return true;
            if (rc == SQLITE_DONE) return false;
            throw StorageError(std::string("read: ") + sqlite3_errmsg(db_));
        }
        std::string column_text(int c) const {
            auto p = sqlite3_column_text(stmt_, c);
            return p ? reinterpret_cast<const char*>(p) : "";
        }
        sqlite3_stmt* get() const { return stmt_; }

    private:
        void check(int rc) {
            if (rc != SQLITE_OK) throw StorageError(std::string("bind: ") + sqlite3_errmsg(db_));
        }
        sqlite3* db_;
        sqlite3_stmt* stmt_ = nullptr;
    };

    class Transaction {
    public:
        explicit Transaction(StudyStore& s) : s_(s) { s_.exec("BEGIN IMMEDIATE"); }
        ~Transaction() {
            if (!done_) sqlite3_exec(s_.db_, "ROLLBACK", nullptr, nullptr, nullptr);
        }
        void commit() {
            s_.exec("COMMIT");
            done_ = true;
        }

    private:
        StudyStore& s_;
        bool done_ = false;
    };

    void exec(const std::string& sql) {
        char* err = nullptr;
        if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
            std::string msg = err ? err : "unknown error";
            sqlite3_free(err);
            throw StorageError(msg);
        }
    }

    static std::string id_field(const nlohmann::json& j, const char* key) {
        static const std::regex id_re("[A-Za-z0-9_-]{1,64}");
        if (!j.is_object() || !j.contains(key) || !j.at(key).is_string()) {
            throw InvalidArgument(std::string(key) + ": string required");
        }
        auto v = j.at(key).get<std::string>();
        if (!std::regex_match(v, id_re)) throw InvalidArgument(std::string(key) + ": 1-64 of [A-Za-z0-9_-]");
        return v;
    }

    sqlite3* db_ = nullptr;
    mutable std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// HTTP front door

inline nlohmann::ordered_json catalog_json(const PropertyCatalog& catalog) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& p : catalog.properties()) {
        out.push_back({{"id", p.id},
                       {"label", p.label},
                       {"category", std::string(to_string(p.category))},
                       {"numeric", expected_char_class(p) == CharClass::digits}});
    }
    return out;
}

/// POST /api/discover (SSE), POST /api/user-study, GET /api/catalog.
class AuditServer {
public:
    AuditServer(DiscoverRunner runner, StudyStore& store, const PropertyCatalog& catalog, ServiceConfig config = {},
                RateLimiter::Now now = [] { return RateLimiter::Clock::now(); })
        : config_(config),
          catalog_(catalog),
          store_(store),
          limiter_(config.rate_limit, config.rate_window, std::move(now)),
          queue_(std::move(runner), config.queue_cap, config.low_confidence) {
        server_.new_task_queue = [] { return new httplib::ThreadPool(64); };
        server_.Post("/api/discover", [this](const httplib::Request& req, httplib::Response& res) { discover(req, res); });
        server_.Post("/api/user-study",
                     [this](const httplib::Request& req, httplib::Response& res) { user_study(req, res); });
        server_.Get("/api/catalog", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(catalog_json(catalog_).dump(), "application/json");
        });
        server_.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(nlohmann::json{{"ok", true}, {"waiting", queue_.waiting()}}.dump(), "application/json");
        });
    }

    ~AuditServer() { stop(); }

    /// Binds and serves on a background thread; returns the port.
    int start(const std::string& host = "127.0.0.1", int port = 0) {
        port_ = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
        if (port_ < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        return port_;
    }

    /// Serves on the calling thread until stop().
    void run(const std::string& host, int port) {
        if (!server_.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
    }

    void stop() {
        queue_.shutdown();
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    AuditQueue& queue() { return queue_; }
    int port() const { return port_; }

private:
    static void json_error(httplib::Response& res, int status, const std::string& message) {
        res.status = status;
        res.set_content(nlohmann::json{{"message", message}}.dump(), "application/json");
    }

    void discover(const httplib::Request& req, httplib::Response& res) {
        AuditRequest request;
        try {
            request = parse_audit_request(nlohmann::json::parse(req.body), catalog_);
        } catch (const nlohmann::json::exception&) {
            return json_error(res, 400, "body is not valid JSON");
        } catch (const InvalidArgument& e) {
            return json_error(res, 400, e.what());
        }
        auto admit = limiter_.admit();
        if (!admit.admitted) {
            const auto secs = std::max<long long>(1, (admit.retry_after.count() + 999) / 1000);
            res.set_header("Retry-After", std::to_string(secs));
            res.status = 429;
            res.set_content(nlohmann::json{{"message", "rate limit exceeded"},
                                           {"retry_after_ms", admit.retry_after.count()}}
                                .dump(),
                            "application/json");
            return;
        }
        std::shared_ptr<AuditJob> job;
        try {
            job = queue_.submit(std::move(request));
        } catch (const QueueFull& e) {
            return json_error(res, 503, e.what());
        }
        res.set_header("Cache-Control", "no-cache");
        res.set_header("X-Request-Id", job->id());
        const auto interval = config_.position_interval;
        res.set_chunked_content_provider("text/event-stream", [this, job, interval](std::size_t, httplib::DataSink& sink) {
            stream_discovery(queue_, *job, interval, [&](const SseEvent& ev) {
                auto wire = ev.wire();
                return sink.write(wire.data(), wire.size());
            });
            sink.done();
            return true;
        });
    }

    void user_study(const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::exception&) {
            return json_error(res, 400, "body is not valid JSON");
        }
        try {
            if (body.is_object() && body.contains("result_id")) {
                store_.record_feedback(body);
                res.set_content(R"({"ok":true})", "application/json");
            } else {
                auto r = store_.record_result(body, &catalog_);
                res.status = r.created ? 201 : 200;
                res.set_content(nlohmann::json{{"result_id", r.result_id}}.dump(), "application/json");
            }
        } catch (const InvalidArgument& e) {
            json_error(res, 400, e.what());
        } catch (const NotFound& e) {
            json_error(res, 404, e.what());
        } catch (const StorageError& e) {
            res.set_header("Retry-After", "1");
            json_error(res, 503, std::string("storage unavailable: ") + e.what());
        }
    }

    ServiceConfig config_;
    const PropertyCatalog& catalog_;
    StudyStore& store_;
    RateLimiter limiter_;
    AuditQueue queue_;
    httplib::Server server_;
    int port_ = -1;
    std::thread thread_;
};

} // namespace pdaudit
