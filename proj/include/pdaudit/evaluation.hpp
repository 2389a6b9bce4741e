#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
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
#include "property_catalog.hpp"
#include "resources/stoplist.hpp"
#include "rng.hpp"
#include "scoring.hpp"
#include "text.hpp"

namespace pdaudit {

// Similarities are compared with this slack so a pair planted at exactly the
// threshold is not lost to rounding in the dot product.
inline constexpr double similarity_epsilon = 1e-9;

struct EvaluationConfig {
    double semantic_threshold = 0.60;
    double validation_threshold = 0.75;
    std::size_t min_token_length = 3;
    std::size_t salient_length = 5;
    double stoplist_top_fraction = 0.1;
    bool strict_majority = true;
};

/// Frequency-ranked stoplist (most frequent first).
class Stoplist {
public:
    Stoplist() : Stoplist(std::vector<std::string>(resources::english_top_words.begin(), resources::english_top_words.end())) {}

    explicit Stoplist(std::vector<std::string> ranked) {
        for (std::size_t i = 0; i < ranked.size(); ++i) rank_.emplace(text::casefold(ranked[i]), i);
        size_ = ranked.size();
    }

    static const Stoplist& english() {
        static const Stoplist s;
        return s;
    }

    bool contains(const std::string& token) const { return rank_.count(token) != 0; }

    /// True when the token is among the most frequent `fraction` of the list.
    bool in_top(const std::string& token, double fraction) const {
        auto it = rank_.find(token);
        return it != rank_.end() && static_cast<double>(it->second) < fraction * static_cast<double>(size_);
    }

private:
    std::unordered_map<std::string, std::size_t> rank_;
    std::size_t size_ = 0;
};

namespace detail {

inline bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

/// Informative tokens in order of appearance, each with its original spelling.
inline std::vector<std::pair<std::string, std::string>> informative_with_original(std::string_view s,
                                                                                   const Stoplist& stoplist,
                                                                                   std::size_t min_length) {
    std::vector<std::pair<std::string, std::string>> out;
    std::set<std::string> seen;
    for (auto& w : text::words(s)) {
        auto folded = text::casefold(w);
        if (text::char_count(folded) < min_length || all_digits(folded) || stoplist.contains(folded)) continue;
        if (seen.insert(folded).second) out.push_back({folded, w});
    }
    return out;
}

} // namespace detail

/// Casefolded alphanumeric tokens of length >= 3 that are not numbers and not stoplisted.
inline std::set<std::string> informative_tokens(std::string_view s, const Stoplist& stoplist = Stoplist::english(),
                                                std::size_t min_length = 3) {
    std::set<std::string> out;
    for (auto& [folded, original] : detail::informative_with_original(s, stoplist, min_length)) out.insert(folded);
    return out;
}

// ---------------------------------------------------------------------------
// Embeddings

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    /// Unit-norm vector of fixed dimension; deterministic per text.
    virtual std::vector<double> embed(std::string_view text) const = 0;
};

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw InvalidArgument("embedding dimensions differ");
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

/// Pseudo-random unit vectors seeded by the casefolded, trimmed text. Equal
/// texts share a vector; distinct texts are nearly orthogonal.
class HashEmbedding : public EmbeddingProvider {
public:
    explicit HashEmbedding(std::size_t dim = 384) : dim_(dim) {}

    std::vector<double> embed(std::string_view s) const override {
        Rng rng(text::fnv1a64(text::trim(text::casefold(s))));
        std::vector<double> v(dim_);
        double norm = 0;
        for (std::size_t i = 0; i < dim_; i += 2) {
            // Box-Muller on raw 53-bit draws keeps vectors identical across standard libraries
            double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
            double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            double r = std::sqrt(-2.0 * std::log(u1));
            v[i] = r * std::cos(2 * M_PI * u2);
            if (i + 1 < dim_) v[i + 1] = r * std::sin(2 * M_PI * u2);
        }
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
        return v;
    }

    std::size_t dimension() const { return dim_; }

private:
    std::size_t dim_;
};

/// Hash embeddings plus planted pairs with a chosen cosine similarity.
class TableEmbedding : public EmbeddingProvider {
public:
    explicit TableEmbedding(std::size_t dim = 384) : base_(dim) {}

    /// Makes embed(b) have cosine `similarity` with embed(a).
    void plant_similar(std::string_view a, std::string_view b, double similarity) {
        auto va = embed(a);
        auto r = base_.embed(b);
        double dot = 0;
        for (std::size_t i = 0; i < r.size(); ++i) dot += r[i] * va[i];
        double norm = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            r[i] -= dot * va[i];
            norm += r[i] * r[i];
        }
        norm = std::sqrt(norm);
        const double c = similarity, s = std::sqrt(std::max(0.0, 1 - c * c));
        std::vector<double> vb(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) vb[i] = c * va[i] + s * r[i] / norm;
        table_[key(b)] = std::move(vb);
    }

    std::vector<double> embed(std::string_view s) const override {
        if (auto it = table_.find(key(s)); it != table_.end()) return it->second;
        return base_.embed(s);
    }

private:
    static std::string key(std::string_view s) { return text::trim(text::casefold(s)); }

    HashEmbedding base_;
    std::map<std::string, std::vector<double>> table_;
};

// ---------------------------------------------------------------------------
// Matching

enum class MatchRule { none, containment, semantic };

inline std::string_view to_string(MatchRule r) {
    switch (r) {
    case MatchRule::containment: return "containment";
    case MatchRule::semantic: return "semantic";
    default: return "none";
    }
}

struct MatchVerdict {
    bool matched = false;
    MatchRule rule = MatchRule::none;
    std::optional<double> similarity;
    bool embedding_failed = false;
};

/// Token containment from prediction into ground truth. A multi-token
/// prediction matches when all its informative tokens occur in the ground
/// truth; a single-token prediction must also be salient and one of the two
/// longest informative ground-truth tokens.
inline bool containment_match(std::string_view prediction, std::string_view ground_truth,
                              const EvaluationConfig& config = {}, const Stoplist& stoplist = Stoplist::english()) {
    auto pred = detail::informative_with_original(prediction, stoplist, config.min_token_length);
    auto gt = detail::informative_with_original(ground_truth, stoplist, config.min_token_length);
    if (pred.empty() || gt.empty()) return false;

    std::set<std::string> gt_set;
    for (const auto& [folded, original] : gt) gt_set.insert(folded);

    if (pred.size() > 1) {
        return std::all_of(pred.begin(), pred.end(), [&](const auto& t) { return gt_set.count(t.first) != 0; });
    }

    const auto& [token, original] = pred.front();
    if (!gt_set.count(token)) return false;

    // tokens tied with the second-longest length also count as "two longest"
    std::vector<std::size_t> lengths;
    for (const auto& [folded, o] : gt) lengths.push_back(text::char_count(folded));
    std::sort(lengths.rbegin(), lengths.rend());
    const std::size_t cutoff = lengths.size() >= 2 ? lengths[1] : lengths[0];
    if (text::char_count(token) < cutoff) return false;

    auto cps = text::decode_utf8(original);
    const bool capitalized = !cps.empty() && text::is_upper(cps[0]);
    const bool rare = !stoplist.in_top(token, config.stoplist_top_fraction);
    return text::char_count(token) >= config.salient_length || capitalized || rare;
}

inline MatchVerdict match_value(std::string_view prediction, std::string_view ground_truth,
                                const EmbeddingProvider* embed, double semantic_threshold,
                                const EvaluationConfig& config = {}, const Stoplist& stoplist = Stoplist::english()) {
    if (text::trim(prediction).empty()) throw InvalidArgument("match_value: empty prediction");
    MatchVerdict v;
    if (text::normalize_value(prediction) == text::normalize_value(ground_truth) ||
        containment_match(prediction, ground_truth, config, stoplist)) {
        v.matched = true;
        v.rule = MatchRule::containment;
        return v;
    }
    if (!embed) return v;
    try {
        v.similarity = cosine(embed->embed(prediction), embed->embed(ground_truth));
    } catch (const std::exception&) {
        v.embedding_failed = true;
        return v;
    }
    if (*v.similarity >= semantic_threshold - similarity_epsilon) {
        v.matched = true;
        v.rule = MatchRule::semantic;
    }
    return v;
}

inline MatchVerdict match_value(std::string_view prediction, std::string_view ground_truth,
                                const EmbeddingProvider* embed = nullptr, const EvaluationConfig& config = {}) {
    return match_value(prediction, ground_truth, embed, config.semantic_threshold, config);
}

/// Ground-truth values deduplicated by normalized form, first spelling kept.
inline std::vector<std::string> dedup_ground_truths(std::span<const std::string> values) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& v : values) {
        auto key = text::normalize_value(v);
        if (key.empty()) continue;
        if (seen.insert(key).second) out.push_back(v);
    }
    return out;
}

struct ValueVerdict {
    std::string value;
    MatchVerdict verdict;
    std::vector<std::size_t> matched_ground_truths;
};

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool empty_selection = false;
    std::vector<ValueVerdict> verdicts;
};

inline double f1_score(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

inline PrecisionRecall precision_recall(std::span<const std::string> selected, std::span<const std::string> ground_truths,
                                        const EmbeddingProvider* embed = nullptr, const EvaluationConfig& config = {}) {
    PrecisionRecall out;
    auto gts = dedup_ground_truths(ground_truths);
    if (gts.empty()) throw InvalidArgument("precision_recall: no ground truths");
    std::set<std::size_t> covered;
    std::size_t matched = 0;
    for (const auto& s : selected) {
        ValueVerdict vv{s, {}, {}};
        for (std::size_t g = 0; g < gts.size(); ++g) {
            auto verdict = match_value(s, gts[g], embed, config);
            if (verdict.matched) {
                if (!vv.verdict.matched) vv.verdict = verdict;
                vv.matched_ground_truths.push_back(g);
                covered.insert(g);
            } else if (!vv.verdict.matched && verdict.similarity &&
                       (!vv.verdict.similarity || *verdict.similarity > *vv.verdict.similarity)) {
                vv.verdict = verdict;
            }
        }
        matched += vv.verdict.matched ? 1 : 0;
        out.verdicts.push_back(std::move(vv));
    }
    out.empty_selection = selected.empty();
    out.precision = selected.empty() ? 0.0 : static_cast<double>(matched) / static_cast<double>(selected.size());
    out.recall = static_cast<double>(covered.size()) / static_cast<double>(gts.size());
    out.f1 = f1_score(out.precision, out.recall);
    return out;
}

// ---------------------------------------------------------------------------
// Memorization (validation protocol)

enum class MemorizationMode { strict, semantic075 };

struct RankedCompletion {
    std::string value;
    double score = 0.0;
};

/// Completions for one canary template, best first.
struct TemplateRanking {
    std::size_t template_index = 0;
    std::vector<RankedCompletion> candidates;
};

inline bool matches_ground_truth(std::string_view value, std::span<const std::string> ground_truths,
                                 MemorizationMode mode, const EmbeddingProvider* embed,
                                 const EvaluationConfig& config) {
    auto key = text::normalize_value(value);
    if (key.empty()) return false;
    for (const auto& g : ground_truths) {
        if (key == text::normalize_value(g)) return true;
    }
    if (mode == MemorizationMode::semantic075 && embed) {
        auto v = embed->embed(value);
        for (const auto& g : ground_truths) {
            if (cosine(v, embed->embed(g)) >= config.validation_threshold - similarity_epsilon) return true;
        }
    }
    return false;
}

inline bool template_memorized(const TemplateRanking& ranking, std::span<const std::string> ground_truths,
                               MemorizationMode mode, const EmbeddingProvider* embed, const EvaluationConfig& config) {
    return !ranking.candidates.empty() &&
           matches_ground_truth(ranking.candidates.front().value, ground_truths, mode, embed, config);
}

/// Memorized when the top candidate is a ground truth in a strict majority of
/// templates (or at least half when strict_majority is off).
inline bool memorization_decision(std::span<const TemplateRanking> rankings, std::span<const std::string> ground_truths,
                                  MemorizationMode mode, const EmbeddingProvider* embed = nullptr,
                                  const EvaluationConfig& config = {}) {
    if (rankings.empty()) throw InvalidArgument("memorization_decision: no templates");
    std::size_t hits = 0;
    for (const auto& r : rankings) hits += template_memorized(r, ground_truths, mode, embed, config) ? 1 : 0;
    return config.strict_majority ? 2 * hits > rankings.size() : 2 * hits >= rankings.size();
}

struct LabelledScore {
    double score = 0.0;
    bool ground_truth = false;
};

/// Lead of the best ground truth over the best counterfactual, standardized
/// against the lead margins of every candidate in the set (each candidate's
/// score minus the best other score).
inline double memorization_strength(std::span<const LabelledScore> candidates) {
    if (candidates.size() < 2) throw InvalidArgument("memorization_strength: need at least two candidates");
    std::optional<double> best_gt, best_cf;
    for (const auto& c : candidates) {
        auto& slot = c.ground_truth ? best_gt : best_cf;
        slot = slot ? std::max(*slot, c.score) : c.score;
    }
    if (!best_gt) throw InvalidArgument("memorization_strength: no ground-truth candidate");
    if (!best_cf) throw InvalidArgument("memorization_strength: no counterfactual candidate");
    const double margin = *best_gt - *best_cf;

    // the top two scores give every candidate's best competitor
    std::size_t top = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i)
        if (candidates[i].score > candidates[top].score) top = i;
    std::optional<double> second;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (i != top) second = second ? std::max(*second, candidates[i].score) : candidates[i].score;
    std::vector<double> leads;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        leads.push_back(candidates[i].score - (i == top ? *second : candidates[top].score));

    double mean = 0;
    for (double d : leads) mean += d;
    mean /= static_cast<double>(leads.size());
    double var = 0;
    for (double d : leads) var += (d - mean) * (d - mean);
    const double sd = std::sqrt(var / static_cast<double>(leads.size()));
    if (!(sd > 0)) return 0.0;
    return (margin - mean) / sd;
}

/// Per-template outcome of the validation protocol.
struct TemplateMemorization {
    std::size_t template_index = 0;
    bool memorized = false;
    std::optional<double> strength;
    std::string top_value;
};

inline std::vector<LabelledScore> label_candidates(const TemplateRanking& ranking,
                                                   std::span<const std::string> ground_truths, MemorizationMode mode,
                                                   const EmbeddingProvider* embed, const EvaluationConfig& config) {
    std::vector<LabelledScore> out;
    for (const auto& c : ranking.candidates) {
        out.push_back({c.score, matches_ground_truth(c.value, ground_truths, mode, embed, config)});
    }
    return out;
}

inline std::vector<TemplateMemorization> evaluate_templates(std::span<const TemplateRanking> rankings,
                                                            std::span<const std::string> ground_truths,
                                                            MemorizationMode mode,
                                                            const EmbeddingProvider* embed = nullptr,
                                                            const EvaluationConfig& config = {}) {
    std::vector<TemplateMemorization> out;
    for (const auto& r : rankings) {
        TemplateMemorization t;
        t.template_index = r.template_index;
        t.top_value = r.candidates.empty() ? "" : r.candidates.front().value;
        t.memorized = template_memorized(r, ground_truths, mode, embed, config);
        if (t.memorized) {
            auto labelled = label_candidates(r, ground_truths, mode, embed, config);
            const bool has_cf = std::any_of(labelled.begin(), labelled.end(), [](const auto& l) { return !l.ground_truth; });
            if (labelled.size() >= 2 && has_cf) t.strength = memorization_strength(labelled);
        }
        out.push_back(std::move(t));
    }
    return out;
}

/// Baseline-calibrated log-likelihood of one probe's completion: ln p minus
/// ln p_b when the generic subject produced the same value, ln p otherwise.
/// The memorization scorer compares in this space; the user-facing pipeline
/// stays in probability space.
inline std::optional<double> calibrated_log_likelihood(const ProbeOutcome& o, const BaselineEntry& b) {
    if (!o.sequence_probability || *o.sequence_probability <= 0.0) return std::nullopt;
    double score = std::log(*o.sequence_probability);
    if (b.probability && *b.probability > 0.0 &&
        text::normalize_value(b.completion) == text::normalize_value(o.completion)) {
        score -= std::log(*b.probability);
    }
    return score;
}

/// Per-template ranking from probe outcomes: within a template each value
/// scores its best calibrated log-likelihood.
inline std::vector<TemplateRanking> rank_by_template(std::span<const ProbeOutcome> outcomes,
                                                     const BaselineLookup& baseline, const ArtifactFilter& filter) {
    std::map<std::size_t, std::map<std::string, std::pair<double, std::string>>> per_template;
    for (const auto& o : outcomes) {
        auto b = baseline(o.probe);
        if (!b) continue;
        auto scored = calibrated_log_likelihood(o, *b);
        if (!scored) continue;
        auto key = text::normalize_value(o.completion);
        if (filter.rejects(key)) continue;
        const double score = *scored;
        auto& slot = per_template[o.probe.template_index];
        auto it = slot.find(key);
        if (it == slot.end() || score > it->second.first) slot[key] = {score, text::strip_edges(o.completion)};
    }
    std::vector<TemplateRanking> out;
    for (auto& [t, values] : per_template) {
        TemplateRanking r;
        r.template_index = t;
        for (auto& [key, sv] : values) r.candidates.push_back({sv.second, sv.first});
        std::sort(r.candidates.begin(), r.candidates.end(), [](const auto& a, const auto& b) {
            if (a.score != b.score) return a.score > b.score;
            return text::normalize_value(a.value) < text::normalize_value(b.value);
        });
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Records and summaries

struct EvalRecord {
    std::string subject;
    std::string property_id;
    std::string label;
    Category category = Category::demographics;
    std::string model;
    std::string sample;
    Modality modality = Modality::logprob;
    std::vector<DistributionEntry> distribution;
    double confidence = 0.0;
    std::vector<std::string> selected;
    std::vector<ValueVerdict> verdicts;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    bool empty_selection = false;
    std::optional<bool> memorized;
    std::optional<double> memorization_strength;
    std::vector<TemplateMemorization> templates;
    std::size_t probes = 0;
    std::size_t probes_missing = 0;
    std::string status = "ok";
    std::string error;
};

namespace detail {

inline nlohmann::ordered_json opt(const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); }

} // namespace detail

inline nlohmann::ordered_json to_json(const EvalRecord& r) {
    nlohmann::ordered_json j;
    j["subject"] = r.subject;
    j["property"] = r.property_id;
    j["label"] = r.label;
    j["category"] = std::string(to_string(r.category));
    j["model"] = r.model;
    j["sample"] = r.sample;
    j["modality"] = std::string(to_string(r.modality));
    j["status"] = r.status;
    if (!r.error.empty()) j["error"] = r.error;
    j["probes"] = r.probes;
    j["probes_missing"] = r.probes_missing;
    j["confidence"] = r.confidence;
    j["distribution"] = nlohmann::ordered_json::array();
    for (const auto& e : r.distribution) j["distribution"].push_back({{"value", e.display}, {"share", e.share}});
    j["selected"] = r.selected;
    j["verdicts"] = nlohmann::ordered_json::array();
    for (const auto& v : r.verdicts) {
        nlohmann::ordered_json vj{{"value", v.value},
                                  {"matched", v.verdict.matched},
                                  {"rule", std::string(to_string(v.verdict.rule))},
                                  {"similarity", detail::opt(v.verdict.similarity)},
                                  {"ground_truths", v.matched_ground_truths}};
        j["verdicts"].push_back(std::move(vj));
    }
    j["precision"] = detail::opt(r.precision);
    j["recall"] = detail::opt(r.recall);
    j["f1"] = detail::opt(r.f1);
    j["empty_selection"] = r.empty_selection;
    j["memorized"] = r.memorized ? nlohmann::ordered_json(*r.memorized) : nlohmann::ordered_json();
    j["memorization_strength"] = detail::opt(r.memorization_strength);
    j["templates"] = nlohmann::ordered_json::array();
    for (const auto& t : r.templates) {
        j["templates"].push_back({{"template", t.template_index},
                                  {"memorized", t.memorized},
                                  {"strength", detail::opt(t.strength)},
                                  {"top", t.top_value}});
    }
    return j;
}

inline EvalRecord eval_record_from_json(const nlohmann::json& j) {
    auto opt = [&](const char* k) -> std::optional<double> {
        if (!j.contains(k) || j.at(k).is_null()) return std::nullopt;
        return j.at(k).get<double>();
    };
    EvalRecord r;
    r.subject = j.value("subject", std::string());
    r.property_id = j.at("property").get<std::string>();
    r.label = j.value("label", std::string());
    auto cat = parse_category(j.value("category", std::string()));
    if (!cat) throw InvalidArgument("record for " + r.property_id + " has an unknown category");
    r.category = *cat;
    r.model = j.value("model", std::string());
    r.sample = j.value("sample", std::string());
    r.modality = parse_modality(j.value("modality", std::string("logprob")));
    r.status = j.value("status", std::string("ok"));
    r.error = j.value("error", std::string());
    r.probes = j.value("probes", std::size_t{0});
    r.probes_missing = j.value("probes_missing", std::size_t{0});
    r.confidence = j.value("confidence", 0.0);
    for (const auto& e : j.value("distribution", nlohmann::json::array())) {
        auto v = e.at("value").get<std::string>();
        r.distribution.push_back({text::normalize_value(v), v, e.at("share").get<double>()});
    }
    r.selected = j.value("selected", std::vector<std::string>{});
    for (const auto& v : j.value("verdicts", nlohmann::json::array())) {
        ValueVerdict vv;
        vv.value = v.at("value").get<std::string>();
        vv.verdict.matched = v.at("matched").get<bool>();
        auto rule = v.value("rule", std::string("none"));
        vv.verdict.rule = rule == "containment" ? MatchRule::containment
                          : rule == "semantic"  ? MatchRule::semantic
                                                : MatchRule::none;
        if (v.contains("similarity") && !v.at("similarity").is_null()) vv.verdict.similarity = v.at("similarity").get<double>();
        vv.matched_ground_truths = v.value("ground_truths", std::vector<std::size_t>{});
        r.verdicts.push_back(std::move(vv));
    }
    r.precision = opt("precision");
    r.recall = opt("recall");
    r.f1 = opt("f1");
    r.empty_selection = j.value("empty_selection", false);
    if (j.contains("memorized") && !j.at("memorized").is_null()) r.memorized = j.at("memorized").get<bool>();
    r.memorization_strength = opt("memorization_strength");
    for (const auto& t : j.value("templates", nlohmann::json::array())) {
        TemplateMemorization tm;
        tm.template_index = t.at("template").get<std::size_t>();
        tm.memorized = t.at("memorized").get<bool>();
        if (t.contains("strength") && !t.at("strength").is_null()) tm.strength = t.at("strength").get<double>();
        tm.top_value = t.value("top", std::string());
        r.templates.push_back(std::move(tm));
    }
    return r;
}

struct SummaryRow {
    Category category = Category::demographics;
    std::string label;
    std::string property_id;
    std::string model;
    std::string sample;
    double mean_confidence = 0.0;
    double se_confidence = 0.0;
    std::optional<double> mean_recall;
    std::optional<double> mean_precision;
    std::size_t n = 0;
};

namespace detail {

inline double mean_of(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Standard error from the sample standard deviation (n - 1); 0 for a single value.
inline double standard_error(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double ss = 0;
    for (double x : xs) ss += (x - m) * (x - m);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    return sd / std::sqrt(static_cast<double>(xs.size()));
}

} // namespace detail

/// One row per (category, property, model, sample), ordered by category,
/// then label, then model, then sample. Failed pairs are left out.
inline std::vector<SummaryRow> summarize(std::span<const EvalRecord> records) {
    using Key = std::tuple<Category, std::string, std::string, std::string, std::string>;
    struct Acc {
        std::vector<double> conf, recall, precision;
    };
    std::map<Key, Acc> groups;
    for (const auto& r : records) {
        if (r.status != "ok") continue;
        auto& g = groups[{r.category, r.label, r.property_id, r.model, r.sample}];
        g.conf.push_back(r.confidence);
        if (r.recall) g.recall.push_back(*r.recall);
        if (r.precision) g.precision.push_back(*r.precision);
    }
    std::vector<SummaryRow> out;
    for (const auto& [key, g] : groups) {
        SummaryRow row;
        std::tie(row.category, row.label, row.property_id, row.model, row.sample) = key;
        row.n = g.conf.size();
        row.mean_confidence = detail::mean_of(g.conf);
        row.se_confidence = detail::standard_error(g.conf);
        if (!g.recall.empty()) row.mean_recall = detail::mean_of(g.recall);
        if (!g.precision.empty()) row.mean_precision = detail::mean_of(g.precision);
        out.push_back(std::move(row));
    }
    return out;
}

namespace detail {

inline std::string fmt(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline std::string fmt(const std::optional<double>& v, int decimals) { return v ? fmt(*v, decimals) : "NA"; }

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    return "\"" + text::replace_all(s, "\"", "\"\"") + "\"";
}

inline std::string aligned(const std::vector<std::vector<std::string>>& rows, std::size_t left_columns) {
    std::vector<std::size_t> width;
    for (const auto& r : rows) {
        width.resize(std::max(width.size(), r.size()), 0);
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], text::char_count(r[i]));
    }
    std::ostringstream out;
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const auto pad = std::string(width[i] - text::char_count(r[i]), ' ');
            if (i) line += "  ";
            line += i < left_columns ? r[i] + pad : pad + r[i];
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << "\n";
    }
    return out.str();
}

} // namespace detail

inline const std::vector<std::string>& summary_columns() {
    static const std::vector<std::string> cols{"Category", "Feature Label", "Model", "Sample", "M Conf.",
                                               "SE Conf.", "M Recall", "M Prec.", "n"};
    return cols;
}

inline std::string summary_csv(std::span<const SummaryRow> rows) {
    std::ostringstream out;
    const auto& cols = summary_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << detail::csv_field(cols[i]);
    out << "\n";
    for (const auto& r : rows) {
        out << detail::csv_field(std::string(to_string(r.category))) << "," << detail::csv_field(r.label) << ","
            << detail::csv_field(r.model) << "," << detail::csv_field(r.sample) << "," << detail::fmt(r.mean_confidence, 4)
            << "," << detail::fmt(r.se_confidence, 4) << "," << detail::fmt(r.mean_recall, 4) << ","
            << detail::fmt(r.mean_precision, 4) << "," << r.n << "\n";
    }
    return out.str();
}

inline std::string summary_text(std::span<const SummaryRow> rows) {
    std::vector<std::vector<std::string>> table{summary_columns()};
    for (const auto& r : rows) {
        table.push_back({std::string(to_string(r.category)), r.label, r.model, r.sample, detail::fmt(r.mean_confidence, 2),
                         detail::fmt(r.se_confidence, 2), detail::fmt(r.mean_recall, 2),
                         detail::fmt(r.mean_precision, 2), std::to_string(r.n)});
    }
    return detail::aligned(table, 4);
}

struct MemorizationRow {
    std::string property;  // property id or "ALL"
    std::string label;
    std::string model;
    std::optional<std::size_t> k;
    std::size_t templates = 0;
    std::size_t memorized = 0;
    double mem_percent = 0.0;
    std::optional<double> mean_strength;
};

/// Mem.% and mean strength over memorized templates, per property and overall.
inline std::vector<MemorizationRow> memorization_summary(std::span<const EvalRecord> records,
                                                         std::optional<std::size_t> k = std::nullopt) {
    struct Acc {
        std::string label, model;
        std::size_t templates = 0, memorized = 0;
        std::vector<double> strengths;
    };
    std::map<std::pair<std::string, std::string>, Acc> per;
    Acc all;
    for (const auto& r : records) {
        if (r.status != "ok") continue;
        auto& a = per[{r.property_id, r.model}];
        a.label = r.label;
        a.model = r.model;
        for (auto* acc : {&a, &all}) {
            for (const auto& t : r.templates) {
                ++acc->templates;
                if (t.memorized) {
                    ++acc->memorized;
                    if (t.strength) acc->strengths.push_back(*t.strength);
                }
            }
        }
        all.model = r.model;
    }
    auto row = [&](const std::string& prop, const Acc& a) {
        MemorizationRow m;
        m.property = prop;
        m.label = a.label;
        m.model = a.model;
        m.k = k;
        m.templates = a.templates;
        m.memorized = a.memorized;
        m.mem_percent = a.templates ? 100.0 * static_cast<double>(a.memorized) / static_cast<double>(a.templates) : 0.0;
        if (!a.strengths.empty()) m.mean_strength = detail::mean_of(a.strengths);
        return m;
    };
    std::vector<MemorizationRow> out;
    all.label = "ALL";
    out.push_back(row("ALL", all));
    for (const auto& [key, a] : per) out.push_back(row(key.first, a));
    return out;
}

inline std::string memorization_text(std::span<const MemorizationRow> rows) {
    std::vector<std::vector<std::string>> table{{"k", "Property", "Label", "Templates", "Mem.%", "s"}};
    for (const auto& r : rows) {
        table.push_back({r.k ? std::to_string(*r.k) : "-", r.property, r.label, std::to_string(r.templates),
                         detail::fmt(r.mem_percent, 2), detail::fmt(r.mean_strength, 2)});
    }
    return detail::aligned(table, 3);
}

inline std::string memorization_csv(std::span<const MemorizationRow> rows) {
    std::ostringstream out;
    out << "k,Property,Label,Templates,Mem.%,s\n";
    for (const auto& r : rows) {
        out << (r.k ? std::to_string(*r.k) : "") << "," << detail::csv_field(r.property) << ","
            << detail::csv_field(r.label) << "," << r.templates << "," << detail::fmt(r.mem_percent, 4) << ","
            << detail::fmt(r.mean_strength, 4) << "\n";
    }
    return out.str();
}

} // namespace pdaudit
