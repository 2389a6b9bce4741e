#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "rng.hpp"
#include "text.hpp"

namespace pdaudit {

enum class Cohort { famous, synthetic, user };

inline std::string_view to_string(Cohort c) {
    switch (c) {
    case Cohort::famous: return "famous";
    case Cohort::synthetic: return "synthetic";
    default: return "user";
    }
}

inline Cohort parse_cohort(std::string_view s) {
    if (s == "famous") return Cohort::famous;
    if (s == "synthetic") return Cohort::synthetic;
    if (s == "user") return Cohort::user;
    throw InvalidArgument("unknown cohort '" + std::string(s) + "'");
}

struct SubjectRecord {
    std::string full_name;
    Cohort cohort = Cohort::famous;
    std::string property_id;  // property the subject was sampled for; empty for synthetic
    std::map<std::string, std::vector<std::string>> ground_truths;
    std::optional<double> famousness;

    bool operator==(const SubjectRecord&) const = default;
};

struct CohortMetadata {
    std::uint64_t seed = 0;
    double threshold = 350.0;
    double log_base = std::numbers::e;
};

// ---------------------------------------------------------------------------
// Famousness

/// 10 * log(page_views + 1) + word_count / 1000, natural log unless told otherwise.
inline double famousness(std::int64_t page_views_30d, std::int64_t word_count, double log_base = std::numbers::e) {
    if (page_views_30d < 0 || word_count < 0) throw InvalidArgument("famousness: negative input");
    if (!(log_base > 1.0)) throw InvalidArgument("famousness: log base must exceed 1");
    return 10.0 * std::log1p(static_cast<double>(page_views_30d)) / std::log(log_base) +
           static_cast<double>(word_count) / 1000.0;
}

// ---------------------------------------------------------------------------
// Client interfaces

struct EntityRecord {
    std::string id;
    std::string name;
    bool human = true;
    std::map<std::string, std::vector<std::string>> claims;
};

/// Sequential access to an entity dump.
class EntityStream {
public:
    virtual ~EntityStream() = default;
    /// Calls `visit` for each entity until it returns false.
    virtual void for_each(const std::function<bool(const EntityRecord&)>& visit) = 0;
};

/// Current values for one entity (the live knowledge base).
class EntityLookup {
public:
    virtual ~EntityLookup() = default;
    virtual std::vector<std::string> current_values(const std::string& entity_id, const std::string& property_id) = 0;
};

struct PageStats {
    std::int64_t page_views_30d = 0;
    std::int64_t word_count = 0;
};

class PageStatsClient {
public:
    virtual ~PageStatsClient() = default;
    /// nullopt when the entity has no article.
    virtual std::optional<PageStats> stats(const std::string& title) = 0;
};

class SuggestionClient {
public:
    virtual ~SuggestionClient() = default;
    /// The engine's "did you mean" suggestion, if any.
    virtual std::optional<std::string> suggest(const std::string& query) = 0;
};

/// Plausibility check that a generated string reads as a person's name.
using NamePredicate = std::function<bool(std::string_view)>;

namespace detail {

template <typename F>
void for_each_jsonl(const std::string& path, F&& f) {
    std::ifstream in(path);
    if (!in) throw FixtureError("cannot open fixture " + path);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw FixtureError(path + ":" + std::to_string(n) + ": " + e.what());
        }
        f(j, n);
    }
}

inline EntityRecord entity_from_json(const nlohmann::json& j) {
    EntityRecord e;
    e.id = j.at("id").get<std::string>();
    e.name = j.value("name", std::string());
    e.human = j.value("human", true);
    if (j.contains("claims")) {
        for (const auto& [p, vs] : j.at("claims").items()) e.claims[p] = vs.get<std::vector<std::string>>();
    }
    return e;
}

} // namespace detail

/// Entity stream and lookup over an in-memory list, loadable from JSONL
/// lines {"id", "name", "human", "claims": {P: [values]}}.
class FixtureEntities : public EntityStream, public EntityLookup {
public:
    FixtureEntities() = default;
    explicit FixtureEntities(std::vector<EntityRecord> entities) {
        for (auto& e : entities) add(std::move(e));
    }

    static FixtureEntities from_file(const std::string& path) {
        FixtureEntities f;
        detail::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) { f.add(detail::entity_from_json(j)); });
        return f;
    }

    void add(EntityRecord e) {
        index_[e.id] = entities_.size();
        entities_.push_back(std::move(e));
    }

    void fail_lookup(std::string entity_id) { failing_.insert(std::move(entity_id)); }

    void for_each(const std::function<bool(const EntityRecord&)>& visit) override {
        for (const auto& e : entities_) {
            if (!visit(e)) return;
        }
    }

    std::vector<std::string> current_values(const std::string& entity_id, const std::string& property_id) override {
        if (failing_.count(entity_id)) throw TransportError("entity lookup failed for " + entity_id);
        auto it = index_.find(entity_id);
        if (it == index_.end()) return {};
        auto c = entities_[it->second].claims.find(property_id);
        return c == entities_[it->second].claims.end() ? std::vector<std::string>{} : c->second;
    }

private:
    std::vector<EntityRecord> entities_;
    std::unordered_map<std::string, std::size_t> index_;
    std::set<std::string> failing_;
};

/// JSONL lines {"title", "page_views_30d", "word_count"} or {"title", "error"}.
class FixturePageStats : public PageStatsClient {
public:
    void set(std::string title, PageStats s) { stats_[std::move(title)] = s; }
    void fail(std::string title, std::string message = "unavailable") { errors_[std::move(title)] = std::move(message); }

    static FixturePageStats from_file(const std::string& path) {
        FixturePageStats f;
        detail::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
            auto title = j.at("title").get<std::string>();
            if (j.contains("error")) {
                f.fail(title, j.at("error").get<std::string>());
            } else {
                f.set(title, {j.at("page_views_30d").get<std::int64_t>(), j.at("word_count").get<std::int64_t>()});
            }
        });
        return f;
    }

    std::optional<PageStats> stats(const std::string& title) override {
        if (auto e = errors_.find(title); e != errors_.end()) throw TransportError("page stats for " + title + ": " + e->second);
        auto it = stats_.find(title);
        if (it == stats_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::map<std::string, PageStats> stats_;
    std::map<std::string, std::string> errors_;
};

/// JSONL lines {"query", "suggestion"} or {"query", "error"}; unknown queries get no suggestion.
class FixtureSuggestions : public SuggestionClient {
public:
    void set(std::string query, std::string suggestion) { suggestions_[std::move(query)] = std::move(suggestion); }
    void fail(std::string query) { failing_.insert(std::move(query)); }

    static FixtureSuggestions from_file(const std::string& path) {
        FixtureSuggestions f;
        detail::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
            auto q = j.at("query").get<std::string>();
            if (j.contains("error")) {
                f.fail(q);
            } else if (j.contains("suggestion") && !j.at("suggestion").is_null()) {
                f.set(q, j.at("suggestion").get<std::string>());
            }
        });
        return f;
    }

    std::optional<std::string> suggest(const std::string& query) override {
        ++calls_;
        if (failing_.count(query)) throw TransportError("search failed for " + query);
        auto it = suggestions_.find(query);
        if (it == suggestions_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t calls() const { return calls_; }

private:
    std::map<std::string, std::string> suggestions_;
    std::set<std::string> failing_;
    std::size_t calls_ = 0;
};

/// Predicate rejecting names listed in a JSONL file of {"name", "person": false} lines.
inline NamePredicate fixture_name_predicate(const std::string& path) {
    auto rejected = std::make_shared<std::set<std::string>>();
    detail::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
        if (!j.value("person", true)) rejected->insert(j.at("name").get<std::string>());
    });
    return [rejected](std::string_view name) { return rejected->count(std::string(name)) == 0; };
}

// ---------------------------------------------------------------------------
// Famous cohort

struct FamousConfig {
    std::vector<std::string> properties;
    std::size_t per_property_n = 100;
    double threshold = 350.0;
    double log_base = std::numbers::e;
    std::uint64_t seed = 0;
};

struct PropertyBuildReport {
    std::string property_id;
    std::size_t candidates = 0;  // humans with >= 1 value
    std::size_t qualifying = 0;  // famousness above threshold
    std::size_t sampled = 0;
    bool aborted = false;
    std::string error;
};

struct FamousBuild {
    std::vector<SubjectRecord> records;
    std::vector<PropertyBuildReport> reports;
    CohortMetadata metadata;

    bool complete() const {
        return std::none_of(reports.begin(), reports.end(), [](const auto& r) { return r.aborted; });
    }
};

namespace detail {

inline std::vector<std::string> merge_values(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto* list : {&a, &b}) {
        for (const auto& v : *list) {
            auto key = text::normalize_value(v);
            if (!key.empty() && seen.insert(key).second) out.push_back(text::trim(v));
        }
    }
    return out;
}

} // namespace detail

/// Streams humans, keeps those above the famousness threshold, samples
/// per_property_n of them per property and fills in all current values.
/// Candidates are collected before sampling so the result depends only on
/// the seed and the data, not on client timing.
inline FamousBuild build_famous(EntityStream& entities, EntityLookup& live, PageStatsClient& pages,
                                const FamousConfig& config) {
    if (config.properties.empty()) throw InvalidArgument("build_famous: no target properties");
    FamousBuild out;
    out.metadata = {config.seed, config.threshold, config.log_base};

    struct Candidate {
        EntityRecord entity;
        double score = 0;
    };
    std::map<std::string, std::vector<EntityRecord>> per_property;
    entities.for_each([&](const EntityRecord& e) {
        if (!e.human) return true;
        for (const auto& p : config.properties) {
            auto it = e.claims.find(p);
            if (it != e.claims.end() && !it->second.empty()) per_property[p].push_back(e);
        }
        return true;
    });

    std::map<std::string, std::optional<PageStats>> stats_cache;
    for (const auto& p : config.properties) {
        PropertyBuildReport report;
        report.property_id = p;
        auto& pool = per_property[p];
        report.candidates = pool.size();
        std::vector<SubjectRecord> cohort;
        try {
            std::vector<Candidate> qualifying;
            for (auto& e : pool) {
                auto cached = stats_cache.find(e.name);
                if (cached == stats_cache.end()) cached = stats_cache.emplace(e.name, pages.stats(e.name)).first;
                if (!cached->second) continue;
                double score = famousness(cached->second->page_views_30d, cached->second->word_count, config.log_base);
                if (score > config.threshold) qualifying.push_back({e, score});
            }
            report.qualifying = qualifying.size();
            std::sort(qualifying.begin(), qualifying.end(),
                      [](const auto& a, const auto& b) { return a.entity.id < b.entity.id; });
            Rng rng(mix_seed(config.seed, text::fnv1a64(p)));
            seeded_shuffle(std::span<Candidate>(qualifying), rng);
            qualifying.resize(std::min(qualifying.size(), config.per_property_n));

            for (const auto& c : qualifying) {
                SubjectRecord r;
                r.full_name = c.entity.name;
                r.cohort = Cohort::famous;
                r.property_id = p;
                r.famousness = c.score;
                r.ground_truths[p] = detail::merge_values(c.entity.claims.at(p), live.current_values(c.entity.id, p));
                cohort.push_back(std::move(r));
            }
            report.sampled = cohort.size();
        } catch (const std::exception& e) {
            report.aborted = true;
            report.error = e.what();
            cohort.clear();
        }
        for (auto& r : cohort) out.records.push_back(std::move(r));
        out.reports.push_back(std::move(report));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic cohort

struct NameCount {
    std::string name;
    std::int64_t count = 0;
};

/// Country-conditioned given names and surnames, most frequent first.
struct NamePod {
    std::string country;
    std::vector<NameCount> given_names;
    std::vector<NameCount> surnames;
};

inline void validate_pod(const NamePod& pod) {
    if (pod.given_names.empty() || pod.surnames.empty()) {
        throw InvalidArgument("name pod " + pod.country + " has an empty list");
    }
    for (const auto* list : {&pod.given_names, &pod.surnames}) {
        for (std::size_t i = 1; i < list->size(); ++i) {
            if ((*list)[i].count > (*list)[i - 1].count) {
                throw InvalidArgument("name pod " + pod.country + " is not frequency-ranked");
            }
        }
    }
}

/// Drops names whose share of their list falls below `share_floor`.
inline NamePod clean_pod(const NamePod& pod, double share_floor = 0.001) {
    validate_pod(pod);
    auto clean = [&](const std::vector<NameCount>& names) {
        double total = 0;
        for (const auto& n : names) total += static_cast<double>(n.count);
        std::vector<NameCount> out;
        for (const auto& n : names) {
            if (total > 0 && static_cast<double>(n.count) / total >= share_floor) out.push_back(n);
        }
        return out;
    };
    NamePod out{pod.country, clean(pod.given_names), clean(pod.surnames)};
    return out;
}

struct SyntheticName {
    std::string full_name;
    std::string given_origin;
    std::string surname_origin;
};

namespace detail {

/// Every distinct cross-origin pair after outlier cleaning, shuffled under seed.
inline std::vector<SyntheticName> shuffled_cross_pairs(const std::vector<NamePod>& raw_pods, std::uint64_t seed,
                                                       double share_floor) {
    if (raw_pods.size() < 2) throw InvalidArgument("synth_names: need at least two name pods");
    std::vector<NamePod> pods;
    for (const auto& p : raw_pods) pods.push_back(clean_pod(p, share_floor));

    std::vector<SyntheticName> all;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < pods.size(); ++i) {
        for (std::size_t j = 0; j < pods.size(); ++j) {
            if (i == j || pods[i].country == pods[j].country) continue;
            for (const auto& g : pods[i].given_names) {
                for (const auto& s : pods[j].surnames) {
                    auto full = g.name + " " + s.name;
                    if (seen.insert(full).second) all.push_back({full, pods[i].country, pods[j].country});
                }
            }
        }
    }
    Rng rng(seed);
    seeded_shuffle(std::span<SyntheticName>(all), rng);
    return all;
}

} // namespace detail

/// `count` distinct "given surname" pairs with the two halves drawn from
/// different pods. Deterministic under seed.
inline std::vector<SyntheticName> synth_names(const std::vector<NamePod>& pods, std::size_t count, std::uint64_t seed,
                                              double share_floor = 0.001) {
    auto all = detail::shuffled_cross_pairs(pods, seed, share_floor);
    if (count > all.size()) {
        throw InvalidArgument("synth_names: requested " + std::to_string(count) + " names but only " +
                              std::to_string(all.size()) + " cross-origin pairs exist");
    }
    all.resize(count);
    return all;
}

namespace detail {

inline bool is_vowel(char c) {
    switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
    case 'A': case 'E': case 'I': case 'O': case 'U':
        return true;
    default:
        return false;
    }
}

} // namespace detail

/// Every way of replacing each vowel with a different vowel, in odometer
/// order (rightmost vowel fastest), capped at `budget`.
inline std::vector<std::string> vowel_variants(std::string_view name, std::size_t budget = 64) {
    static constexpr std::string_view lower = "aeiou";
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < name.size(); ++i) {
        if (detail::is_vowel(name[i])) positions.push_back(i);
    }
    if (positions.empty() || budget == 0) return {};

    // per position, the four vowels other than the original
    std::vector<std::vector<char>> choices;
    for (auto pos : positions) {
        const char c = name[pos];
        const bool upper = c >= 'A' && c <= 'Z';
        const char folded = upper ? static_cast<char>(c - 'A' + 'a') : c;
        std::vector<char> alt;
        for (char v : lower) {
            if (v != folded) alt.push_back(upper ? static_cast<char>(v - 'a' + 'A') : v);
        }
        choices.push_back(std::move(alt));
    }

    std::vector<std::string> out;
    std::vector<std::size_t> digit(positions.size(), 0);
    while (out.size() < budget) {
        std::string v(name);
        for (std::size_t k = 0; k < positions.size(); ++k) v[positions[k]] = choices[k][digit[k]];
        out.push_back(std::move(v));
        std::size_t k = positions.size();
        while (k > 0) {
            --k;
            if (++digit[k] < choices[k].size()) break;
            digit[k] = 0;
            if (k == 0) return out;
        }
    }
    return out;
}

enum class ExistenceDecision { keep, drop, unknown };

inline std::string_view to_string(ExistenceDecision d) {
    switch (d) {
    case ExistenceDecision::keep: return "keep";
    case ExistenceDecision::drop: return "drop";
    default: return "unknown";
    }
}

/// Drops a name when it or any variant draws a spelling suggestion. A failing
/// client yields "unknown", which callers treat as a drop.
inline ExistenceDecision filter_existing(const std::string& name, const std::vector<std::string>& variants,
                                         SuggestionClient& search) {
    bool suggested = false;
    try {
        if (search.suggest(name)) suggested = true;
        for (const auto& v : variants) {
            if (search.suggest(v)) suggested = true;
        }
    } catch (const std::exception&) {
        return ExistenceDecision::unknown;
    }
    return suggested ? ExistenceDecision::drop : ExistenceDecision::keep;
}

struct SyntheticConfig {
    std::size_t target = 100;
    std::size_t candidate_pool = 1000;
    std::size_t variant_budget = 64;
    double share_floor = 0.001;
    std::uint64_t seed = 0;
};

struct SyntheticBuild {
    std::vector<SubjectRecord> records;
    std::size_t examined = 0;
    std::size_t rejected_by_ner = 0;
    std::size_t dropped = 0;
    std::size_t unknown = 0;
    CohortMetadata metadata;
};

/// Generates candidates, screens them and stops once `target` names survive.
inline SyntheticBuild collect_synthetic(const std::vector<NamePod>& pods, const NamePredicate& plausible,
                                        SuggestionClient& search, const SyntheticConfig& config) {
    SyntheticBuild out;
    out.metadata.seed = config.seed;
    auto candidates = detail::shuffled_cross_pairs(pods, config.seed, config.share_floor);
    if (candidates.size() > config.candidate_pool) candidates.resize(config.candidate_pool);
    for (const auto& c : candidates) {
        if (out.records.size() >= config.target) break;
        ++out.examined;
        if (plausible && !plausible(c.full_name)) {
            ++out.rejected_by_ner;
            continue;
        }
        switch (filter_existing(c.full_name, vowel_variants(c.full_name, config.variant_budget), search)) {
        case ExistenceDecision::keep:
            out.records.push_back({c.full_name, Cohort::synthetic, "", {}, std::nullopt});
            break;
        case ExistenceDecision::drop: ++out.dropped; break;
        case ExistenceDecision::unknown: ++out.unknown; break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cohort manifest (JSONL)

inline nlohmann::ordered_json to_json(const SubjectRecord& r, const CohortMetadata& m) {
    nlohmann::ordered_json j;
    j["full_name"] = r.full_name;
    j["cohort"] = std::string(to_string(r.cohort));
    if (!r.property_id.empty()) j["property"] = r.property_id;
    j["ground_truths"] = nlohmann::ordered_json::object();
    for (const auto& [p, vs] : r.ground_truths) j["ground_truths"][p] = vs;
    j["famousness"] = r.famousness ? nlohmann::ordered_json(*r.famousness) : nlohmann::ordered_json();
    j["build"] = {{"seed", m.seed}, {"threshold", m.threshold}, {"log_base", m.log_base}};
    return j;
}

inline std::string cohort_manifest(const std::vector<SubjectRecord>& records, const CohortMetadata& m) {
    std::string out;
    for (const auto& r : records) out += to_json(r, m).dump() + "\n";
    return out;
}

inline void write_cohort_manifest(const std::string& path, const std::vector<SubjectRecord>& records,
                                  const CohortMetadata& m) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidArgument("cannot write cohort manifest " + path);
    f << cohort_manifest(records, m);
}

struct CohortManifest {
    std::vector<SubjectRecord> records;
    std::optional<CohortMetadata> metadata;
};

inline SubjectRecord subject_from_json(const nlohmann::json& j) {
    SubjectRecord r;
    r.full_name = j.at("full_name").get<std::string>();
    if (text::trim(r.full_name).empty()) throw InvalidArgument("cohort record with empty full_name");
    r.cohort = parse_cohort(j.value("cohort", std::string("famous")));
    r.property_id = j.value("property", std::string());
    if (j.contains("ground_truths")) {
        for (const auto& [p, vs] : j.at("ground_truths").items()) r.ground_truths[p] = vs.get<std::vector<std::string>>();
    }
    if (j.contains("famousness") && !j.at("famousness").is_null()) r.famousness = j.at("famousness").get<double>();
    if (r.cohort == Cohort::famous && !r.property_id.empty()) {
        auto it = r.ground_truths.find(r.property_id);
        if (it == r.ground_truths.end() || it->second.empty()) {
            throw InvalidArgument("famous record " + r.full_name + " lacks ground truth for " + r.property_id);
        }
    }
    if (r.cohort == Cohort::synthetic && !r.ground_truths.empty()) {
        throw InvalidArgument("synthetic record " + r.full_name + " carries ground truths");
    }
    return r;
}

inline CohortManifest read_cohort_manifest(const std::string& path) {
    CohortManifest m;
    detail::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
        try {
            m.records.push_back(subject_from_json(j));
        } catch (const std::exception& e) {
            throw FixtureError(path + ":" + std::to_string(line) + ": " + e.what());
        }
        if (!m.metadata && j.contains("build")) {
            const auto& b = j.at("build");
            m.metadata = CohortMetadata{b.value("seed", std::uint64_t{0}), b.value("threshold", 350.0),
                                        b.value("log_base", std::numbers::e)};
        }
    });
    return m;
}

} // namespace pdaudit
