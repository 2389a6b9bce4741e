#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "datasets.hpp"
#include "engine.hpp"
#include "evaluation.hpp"
#include "fixture.hpp"
#include "model_gateway.hpp"
#include "openai_backend.hpp"
#include "property_catalog.hpp"

namespace pdaudit {

enum class RunMode { live, record, replay };

inline RunMode parse_run_mode(std::string_view s) {
    if (s == "live") return RunMode::live;
    if (s == "record") return RunMode::record;
    if (s == "replay") return RunMode::replay;
    throw InvalidArgument("unknown mode '" + std::string(s) + "' (expected record or replay)");
}

/// Parsed run manifest. Relative paths are resolved against the manifest's directory.
struct RunManifest {
    std::filesystem::path base_dir;
    std::string cohort;
    std::vector<std::string> properties;
    std::string catalog;
    std::map<std::string, nlohmann::json> backends;
    std::string default_backend;
    std::optional<nlohmann::json> embedding;
    std::size_t k = default_counterfactual_budget;
    std::optional<std::uint64_t> seed;
    DecodingConfig decoding;
    std::string fixture;
    std::string baseline_cache;
    std::string out = "out";

    std::string resolve(const std::string& p) const {
        if (p.empty()) return p;
        std::filesystem::path path(p);
        return path.is_absolute() ? p : (base_dir / path).lexically_normal().string();
    }

    static RunManifest from_json(const nlohmann::json& j, std::filesystem::path base_dir = {}) {
        RunManifest m;
        m.base_dir = std::move(base_dir);
        try {
            m.cohort = j.at("cohort").get<std::string>();
            m.properties = j.value("properties", std::vector<std::string>{});
            m.catalog = j.value("catalog", std::string());
            if (j.contains("backends")) {
                for (const auto& [name, spec] : j.at("backends").items()) {
                    m.backends[name] = spec;
                    if (m.default_backend.empty()) m.default_backend = name;
                }
            }
            if (j.contains("backend")) {
                auto spec = j.at("backend");
                auto name = spec.value("name", std::string("default"));
                m.backends[name] = spec;
                m.default_backend = name;
            }
            if (m.backends.empty()) throw InvalidArgument("manifest names no backend");
            // without an explicit choice the alphabetically first backend is used
            if (j.contains("default_backend")) {
                m.default_backend = j.at("default_backend").get<std::string>();
                if (!m.backends.count(m.default_backend)) {
                    throw InvalidArgument("manifest: default_backend '" + m.default_backend + "' is not defined");
                }
            }
            if (j.contains("embedding")) m.embedding = j.at("embedding");
            m.k = j.value("k", m.k);
            if (j.contains("seed") && !j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
            if (j.contains("decoding")) {
                const auto& d = j.at("decoding");
                m.decoding.temperature = d.value("temperature", m.decoding.temperature);
                m.decoding.max_tokens = d.value("max_tokens", m.decoding.max_tokens);
                m.decoding.top_logprobs = d.value("top_logprobs", m.decoding.top_logprobs);
                if (d.contains("seed")) {
                    m.decoding.seed = d.at("seed").is_null() ? std::nullopt
                                                             : std::optional<std::uint64_t>(d.at("seed").get<std::uint64_t>());
                }
            }
            m.fixture = j.value("fixture", std::string());
            m.baseline_cache = j.value("baseline_cache", std::string());
            m.out = j.value("out", m.out);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidArgument(std::string("manifest: ") + e.what());
        }
        m.decoding.validate();
        return m;
    }

    static RunManifest from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InvalidArgument("cannot open manifest " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::parse_error& e) {
            throw InvalidArgument("manifest " + path + ": " + e.what());
        }
        return from_json(j, std::filesystem::absolute(path).parent_path());
    }
};

struct RunOptions {
    RunMode mode = RunMode::live;
    std::size_t jobs = 1;
    std::optional<std::size_t> k;
    std::optional<std::uint64_t> seed;
    std::string backend;  // name within the manifest; default when empty
    std::string fixture;  // overrides the manifest path
    bool famous_only = false;
    MemorizationMode memorization_mode = MemorizationMode::semantic075;
};

struct PairFailure {
    std::string subject;
    std::string property_id;
    std::string error;
};

struct RunResult {
    std::vector<EvalRecord> records;
    std::vector<PairFailure> failures;
    std::string model;
    std::size_t backend_calls = 0;  // requests that reached a live backend
    std::size_t replay_calls = 0;

    bool complete() const { return failures.empty(); }
};

/// Backend built from a manifest entry, plus a counter of live calls.
struct BackendHandle {
    std::unique_ptr<Backend> live;
    std::unique_ptr<CountingBackend> counted;

    Backend& backend() { return *counted; }
    std::size_t calls() const { return counted ? counted->calls() : 0; }
};

inline BackendHandle make_backend(const nlohmann::json& spec, const RunManifest& manifest) {
    BackendHandle h;
    auto type = spec.value("type", std::string("mock"));
    if (type == "mock") {
        nlohmann::json table = spec.value("mock", nlohmann::json::object());
        if (spec.contains("table")) {
            const auto path = manifest.resolve(spec.at("table").get<std::string>());
            std::ifstream in(path);
            if (!in) throw InvalidArgument("cannot open mock table " + path);
            try {
                table = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw InvalidArgument("bad mock table " + path + ": " + e.what());
            }
        }
        // capability flags on the manifest entry override the table's
        for (const char* key : {"name", "logprobs", "logit_bias", "seed"}) {
            if (spec.contains(key)) table[key] = spec.at(key);
        }
        h.live = MockBackend::from_json(table);
    } else if (type == "openai") {
        OpenAIConfig c;
        c.base_url = spec.value("base_url", c.base_url);
        c.path = spec.value("path", c.path);
        c.model = spec.at("model").get<std::string>();
        c.logprobs = spec.value("logprobs", c.logprobs);
        c.seed = spec.value("seed", c.seed);
        if (auto env = spec.value("api_key_env", std::string()); !env.empty()) {
            if (const char* key = std::getenv(env.c_str())) c.api_key = key;
        }
        TokenEncoder enc;
        if (spec.contains("vocabulary")) {
            std::ifstream in(manifest.resolve(spec.at("vocabulary").get<std::string>()));
            if (!in) throw InvalidArgument("cannot open vocabulary file");
            enc = vocabulary_encoder(nlohmann::json::parse(in));
        }
        h.live = std::make_unique<OpenAIBackend>(c, enc);
    } else {
        throw InvalidArgument("unknown backend type '" + type + "'");
    }
    h.counted = std::make_unique<CountingBackend>(*h.live);
    return h;
}

inline std::unique_ptr<EmbeddingProvider> make_embedding(const RunManifest& manifest) {
    if (!manifest.embedding || manifest.embedding->value("type", std::string("hash")) == "hash") {
        return std::make_unique<HashEmbedding>();
    }
    const auto& e = *manifest.embedding;
    if (e.value("type", std::string()) == "table") {
        // hash vectors plus planted similar pairs: [[a, b, cosine], ...]
        auto table = std::make_unique<TableEmbedding>();
        for (const auto& p : e.value("pairs", nlohmann::json::array())) {
            table->plant_similar(p.at(0).get<std::string>(), p.at(1).get<std::string>(), p.at(2).get<double>());
        }
        return table;
    }
    if (e.value("type", std::string()) != "openai") throw InvalidArgument("unknown embedding type");
    OpenAIConfig c;
    c.base_url = e.value("base_url", c.base_url);
    c.path = e.value("path", std::string("/v1/embeddings"));
    c.model = e.at("model").get<std::string>();
    if (auto env = e.value("api_key_env", std::string()); !env.empty()) {
        if (const char* key = std::getenv(env.c_str())) c.api_key = key;
    }
    return std::make_unique<OpenAIEmbedding>(c);
}

struct PairTask {
    const SubjectRecord* subject;
    const PropertySpec* property;
};

/// (subject, property) pairs in cohort order. Famous subjects are paired with
/// the properties they hold values for; synthetic subjects with every
/// requested property.
inline std::vector<PairTask> plan_pairs(const std::vector<SubjectRecord>& cohort, const PropertyCatalog& catalog,
                                        const std::vector<std::string>& properties, bool famous_only) {
    std::vector<PairTask> tasks;
    for (const auto& s : cohort) {
        if (famous_only && s.cohort == Cohort::synthetic) continue;
        if (s.cohort == Cohort::synthetic) {
            for (const auto& p : properties) tasks.push_back({&s, &catalog.at(p)});
            continue;
        }
        std::vector<std::string> ids = properties;
        if (ids.empty() && !s.property_id.empty()) ids.push_back(s.property_id);
        if (ids.empty()) {
            for (const auto& [p, vs] : s.ground_truths) ids.push_back(p);
        }
        for (const auto& p : ids) {
            auto it = s.ground_truths.find(p);
            if (it != s.ground_truths.end() && !it->second.empty()) tasks.push_back({&s, &catalog.at(p)});
        }
    }
    return tasks;
}

/// Runs every pair of the manifest. Replay mode reads all replies from the
/// fixture and never constructs a live backend.
inline RunResult run_audit(const RunManifest& manifest, const RunOptions& options = {}) {
    PropertyCatalog custom;
    const PropertyCatalog* catalog = &PropertyCatalog::shipped();
    if (!manifest.catalog.empty()) {
        custom = PropertyCatalog::from_file(manifest.resolve(manifest.catalog));
        catalog = &custom;
    }
    auto cohort = read_cohort_manifest(manifest.resolve(manifest.cohort));
    for (const auto& p : manifest.properties) catalog->at(p);
    auto tasks = plan_pairs(cohort.records, *catalog, manifest.properties, options.famous_only);

    const auto fixture_path = manifest.resolve(options.fixture.empty() ? manifest.fixture : options.fixture);
    BackendHandle live;
    std::optional<ReplayBackend> replay;
    std::unique_ptr<FixtureWriter> writer;
    std::unique_ptr<RecordingBackend> recorder;
    Backend* backend = nullptr;

    if (options.mode == RunMode::replay) {
        if (fixture_path.empty()) throw InvalidArgument("replay needs a fixture path");
        replay.emplace(ReplayBackend::from_file(fixture_path));
        backend = &*replay;
    } else {
        const auto name = options.backend.empty() ? manifest.default_backend : options.backend;
        auto it = manifest.backends.find(name);
        if (it == manifest.backends.end()) throw InvalidArgument("manifest has no backend named '" + name + "'");
        live = make_backend(it->second, manifest);
        backend = &live.backend();
        if (options.mode == RunMode::record) {
            if (fixture_path.empty()) throw InvalidArgument("record mode needs a fixture path");
            writer = std::make_unique<FixtureWriter>(fixture_path, backend->capabilities());
            recorder = std::make_unique<RecordingBackend>(*backend, *writer);
            backend = recorder.get();
        }
    }

    // record and replay keep baselines in memory so that every baseline reply lands in the fixture
    std::unique_ptr<BaselineStore> baselines;
    if (options.mode == RunMode::live && !manifest.baseline_cache.empty()) {
        baselines = std::make_unique<BaselineStore>(manifest.resolve(manifest.baseline_cache), backend->capabilities().name);
    } else {
        baselines = std::make_unique<BaselineStore>();
    }
    auto embed = make_embedding(manifest);

    AuditConfig config;
    config.k = options.k.value_or(manifest.k);
    config.seed = options.seed ? options.seed : manifest.seed;
    config.decoding = manifest.decoding;
    config.memorization_mode = options.memorization_mode;
    const auto model = backend->capabilities().name;

    std::vector<std::optional<EvalRecord>> slots(tasks.size());
    std::vector<std::optional<PairFailure>> failed(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
            const auto& t = tasks[i];
            try {
                slots[i] = audit_pair(*backend, *baselines, *t.property, *t.subject, model, config, embed.get()).record;
            } catch (const std::exception& e) {
                failed[i] = PairFailure{t.subject->full_name, t.property->id, e.what()};
            }
        }
    };
    const auto jobs = std::max<std::size_t>(1, std::min(options.jobs, tasks.size()));
    std::vector<std::thread> pool;
    for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    RunResult result;
    result.model = model;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (slots[i]) result.records.push_back(std::move(*slots[i]));
        if (failed[i]) result.failures.push_back(std::move(*failed[i]));
    }
    result.backend_calls = live.calls();
    result.replay_calls = replay ? replay->calls() : 0;
    return result;
}

// ---------------------------------------------------------------------------
// Records files and reports

inline std::string records_jsonl(std::span<const EvalRecord> records) {
    std::string out;
    for (const auto& r : records) out += to_json(r).dump() + "\n";
    return out;
}

inline std::vector<EvalRecord> read_records(const std::string& path) {
    std::vector<EvalRecord> out;
    detail::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
        try {
            out.push_back(eval_record_from_json(j));
        } catch (const std::exception& e) {
            throw FixtureError(path + ":" + std::to_string(line) + ": " + e.what());
        }
    });
    return out;
}

enum class TableFormat { text, csv };

inline TableFormat parse_format(std::string_view s) {
    if (s == "text") return TableFormat::text;
    if (s == "csv") return TableFormat::csv;
    throw InvalidArgument("unknown format '" + std::string(s) + "'");
}

inline std::string report(std::span<const EvalRecord> records, TableFormat format) {
    if (records.empty()) throw InvalidArgument("report: no records");
    auto rows = summarize(records);
    return format == TableFormat::csv ? summary_csv(rows) : summary_text(rows);
}

inline std::string memorization_report(std::span<const EvalRecord> records, TableFormat format,
                                       std::optional<std::size_t> k = std::nullopt) {
    if (records.empty()) throw InvalidArgument("report: no records");
    auto rows = memorization_summary(records, k);
    return format == TableFormat::csv ? memorization_csv(rows) : memorization_text(rows);
}

inline std::string_view to_string(MemorizationMode m) { return m == MemorizationMode::strict ? "strict" : "semantic075"; }

/// Memorization validation over the famous subjects of a manifest.
inline RunResult validate_memorization(const RunManifest& manifest, RunOptions options) {
    options.famous_only = true;
    if (options.mode != RunMode::replay) {
        const auto name = options.backend.empty() ? manifest.default_backend : options.backend;
        auto it = manifest.backends.find(name);
        if (it == manifest.backends.end()) throw InvalidArgument("manifest has no backend named '" + name + "'");
        auto probe = make_backend(it->second, manifest);
        if (!probe.backend().capabilities().exposes_logprobs) {
            throw CapabilityError("memorization validation needs token log-probabilities; backend '" +
                                  probe.backend().capabilities().name + "' is completion-only");
        }
    } else {
        auto replay = ReplayBackend::from_file(manifest.resolve(options.fixture.empty() ? manifest.fixture : options.fixture));
        if (!replay.capabilities().exposes_logprobs) {
            throw CapabilityError("memorization validation needs token log-probabilities; fixture backend '" +
                                  replay.capabilities().name + "' is completion-only");
        }
    }
    return run_audit(manifest, options);
}

inline const std::vector<std::size_t>& sweep_grid() {
    static const std::vector<std::size_t> grid{0, 10, 20, 30, 40, 50};
    return grid;
}

struct SweepRow {
    std::size_t k = 0;
    std::vector<MemorizationRow> cells;  // ALL first, then per property
    std::size_t failures = 0;
};

inline std::vector<SweepRow> sweep_k(const RunManifest& manifest, RunOptions options,
                                     const std::vector<std::size_t>& grid = sweep_grid()) {
    std::vector<SweepRow> out;
    for (auto k : grid) {
        options.k = k;
        auto run = validate_memorization(manifest, options);
        out.push_back({k, memorization_summary(run.records, k), run.failures.size()});
    }
    return out;
}

/// One row per k: Method, k, then Mem.% and s for ALL and each property.
inline std::string sweep_table(const std::vector<SweepRow>& rows, MemorizationMode mode, TableFormat format) {
    std::vector<std::string> props;
    for (const auto& r : rows) {
        for (const auto& c : r.cells) {
            if (std::find(props.begin(), props.end(), c.property) == props.end()) props.push_back(c.property);
        }
    }
    std::vector<std::vector<std::string>> table;
    std::vector<std::string> header{"Method", "k"};
    for (const auto& p : props) {
        header.push_back(p + " Mem.%");
        header.push_back(p + " s");
    }
    table.push_back(header);
    const int decimals = format == TableFormat::csv ? 4 : 2;
    for (const auto& r : rows) {
        std::vector<std::string> line{std::string(to_string(mode)), std::to_string(r.k)};
        for (const auto& p : props) {
            auto it = std::find_if(r.cells.begin(), r.cells.end(), [&](const auto& c) { return c.property == p; });
            if (it == r.cells.end()) {
                line.push_back("NA");
                line.push_back("NA");
            } else {
                line.push_back(detail::fmt(it->mem_percent, decimals));
                line.push_back(detail::fmt(it->mean_strength, decimals));
            }
        }
        table.push_back(std::move(line));
    }
    if (format == TableFormat::text) return detail::aligned(table, 1);
    std::ostringstream out;
    for (const auto& line : table) {
        for (std::size_t i = 0; i < line.size(); ++i) out << (i ? "," : "") << detail::csv_field(line[i]);
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Cohort building from fixture clients

struct CohortBuildResult {
    std::vector<SubjectRecord> records;
    CohortMetadata metadata;
    std::vector<std::string> notes;
};

/// Reads a cohort-build config naming fixture files for each client.
inline CohortBuildResult build_cohort(const nlohmann::json& config, const std::filesystem::path& base_dir,
                                      std::optional<std::uint64_t> seed_override = std::nullopt) {
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() ? p : (base_dir / path).string();
    };
    CohortBuildResult out;
    if (config.contains("famous")) {
        const auto& f = config.at("famous");
        auto dump = FixtureEntities::from_file(resolve(f.at("entities").get<std::string>()));
        auto live = f.contains("live") ? FixtureEntities::from_file(resolve(f.at("live").get<std::string>())) : dump;
        auto pages = FixturePageStats::from_file(resolve(f.at("pages").get<std::string>()));
        FamousConfig fc;
        fc.properties = f.at("properties").get<std::vector<std::string>>();
        fc.per_property_n = f.value("per_property_n", fc.per_property_n);
        fc.threshold = f.value("threshold", fc.threshold);
        fc.log_base = f.value("log_base", fc.log_base);
        fc.seed = seed_override.value_or(f.value("seed", std::uint64_t{0}));
        auto built = build_famous(dump, live, pages, fc);
        out.metadata = built.metadata;
        for (const auto& r : built.reports) {
            if (r.aborted) out.notes.push_back("famous " + r.property_id + " aborted: " + r.error);
            out.notes.push_back("famous " + r.property_id + ": " + std::to_string(r.sampled) + " of " +
                                std::to_string(r.qualifying) + " qualifying (" + std::to_string(r.candidates) +
                                " candidates)");
        }
        for (auto& r : built.records) out.records.push_back(std::move(r));
    }
    if (config.contains("synthetic")) {
        const auto& s = config.at("synthetic");
        std::vector<NamePod> pods;
        for (const auto& p : s.at("pods")) {
            NamePod pod;
            pod.country = p.at("country").get<std::string>();
            for (const auto& g : p.at("given_names")) pod.given_names.push_back({g.at(0).get<std::string>(), g.at(1).get<std::int64_t>()});
            for (const auto& g : p.at("surnames")) pod.surnames.push_back({g.at(0).get<std::string>(), g.at(1).get<std::int64_t>()});
            pods.push_back(std::move(pod));
        }
        NamePredicate ner;
        if (s.contains("ner")) ner = fixture_name_predicate(resolve(s.at("ner").get<std::string>()));
        FixtureSuggestions search;
        if (s.contains("suggestions")) search = FixtureSuggestions::from_file(resolve(s.at("suggestions").get<std::string>()));
        SyntheticConfig sc;
        sc.target = s.value("target", sc.target);
        sc.candidate_pool = s.value("candidate_pool", sc.candidate_pool);
        sc.variant_budget = s.value("variant_budget", sc.variant_budget);
        sc.share_floor = s.value("share_floor", sc.share_floor);
        sc.seed = seed_override.value_or(s.value("seed", std::uint64_t{0}));
        auto built = collect_synthetic(pods, ner, search, sc);
        if (!config.contains("famous")) out.metadata.seed = sc.seed;
        out.notes.push_back("synthetic: kept " + std::to_string(built.records.size()) + " of " +
                            std::to_string(built.examined) + " examined (" + std::to_string(built.rejected_by_ner) +
                            " not names, " + std::to_string(built.dropped) + " existing, " +
                            std::to_string(built.unknown) + " unknown)");
        for (auto& r : built.records) out.records.push_back(std::move(r));
    }
    return out;
}

} // namespace pdaudit
