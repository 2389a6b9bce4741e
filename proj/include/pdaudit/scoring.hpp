#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "model_gateway.hpp"
#include "property_catalog.hpp"
#include "resources/function_words.hpp"
#include "text.hpp"

namespace pdaudit {

struct ScoringConfig {
    double alpha = 0.95;
    std::size_t top_k = 20;
    double threshold_floor = 0.1;
    double confidence_display_floor = 0.15;
    std::vector<std::string> artifact_filters{"unknown"};

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("scoring: alpha must be in [0, 1]");
        if (top_k < 1) throw InvalidArgument("scoring: top_k must be >= 1");
        if (!(threshold_floor >= 0.0 && threshold_floor <= 1.0)) {
            throw InvalidArgument("scoring: threshold_floor must be in [0, 1]");
        }
    }
};

struct CandidateAggregate {
    std::string value;    // normalized grouping key
    std::string display;  // most frequent raw spelling
    std::size_t count = 0;
    std::optional<double> mean_calibrated_prob;
    std::optional<double> mean_vote;
    double strength = 0.0;
    double rank_score = 0.0;

    bool operator==(const CandidateAggregate&) const = default;
};

struct DistributionEntry {
    std::string value;
    std::string display;
    double share = 0.0;

    bool operator==(const DistributionEntry&) const = default;
};

struct AssociationDistribution {
    std::vector<DistributionEntry> entries;
    double confidence = 0.0;
    Modality modality = Modality::logprob;
    std::size_t top_k_used = 20;

    bool low_confidence(const ScoringConfig& config = {}) const { return confidence < config.confidence_display_floor; }
};

/// One probe's contribution: its completion and either a calibrated
/// probability (logprob mode) or a 0/1 vote.
struct Observation {
    std::string completion;
    double weight = 0.0;
};

// ---------------------------------------------------------------------------
// Per-probe calibration

inline void check_same_key(const ProbeOutcome& outcome, const ProbeOutcome& baseline) {
    if (outcome.probe.property_id != baseline.probe.property_id ||
        outcome.probe.template_index != baseline.probe.template_index ||
        outcome.probe.prefix.text != baseline.probe.prefix.text) {
        throw InvalidArgument("baseline key does not match the probe (property, template, prefix)");
    }
}

inline double calibrate(const ProbeOutcome& outcome, const BaselineEntry& baseline) {
    if (!outcome.sequence_probability) throw InvalidArgument("calibrate: outcome carries no probability");
    const double p = *outcome.sequence_probability;
    if (text::normalize_value(outcome.completion) != text::normalize_value(baseline.completion)) return p;
    return p - baseline.probability.value_or(0.0);
}

/// p minus the baseline's p when both name the same value, p otherwise.
inline double calibrate(const ProbeOutcome& outcome, const ProbeOutcome& baseline) {
    check_same_key(outcome, baseline);
    return calibrate(outcome, BaselineEntry{baseline.completion, baseline.sequence_probability});
}

inline int vote(std::string_view completion, std::string_view baseline_completion) {
    auto v = text::normalize_value(completion);
    return (!v.empty() && v != text::normalize_value(baseline_completion)) ? 1 : 0;
}

inline int vote(const ProbeOutcome& outcome, const ProbeOutcome& baseline) {
    check_same_key(outcome, baseline);
    return vote(outcome.completion, baseline.completion);
}

// ---------------------------------------------------------------------------
// Artifact filtering

/// Values that carry no information about the subject: empty strings,
/// "unknown" and friends, function words, echoes of the subject or the
/// template wording, and property hypernyms when no logit bias kept them out.
class ArtifactFilter {
public:
    ArtifactFilter() : ArtifactFilter(ScoringConfig{}) {}

    explicit ArtifactFilter(const ScoringConfig& config) {
        for (const auto& v : config.artifact_filters) add(v);
        for (auto w : resources::function_words) add(w);
    }

    ArtifactFilter(const ScoringConfig& config, std::string_view subject, const PropertySpec& property,
                   bool bias_applied)
        : ArtifactFilter(config) {
        add(subject);
        for (const auto& w : text::words(subject)) add(w);
        add(baseline_subject);
        for (const auto& c : property.canaries) {
            auto plain = text::replace_all(text::replace_all(c.text, subject_placeholder, " "), value_placeholder, " ");
            for (const auto& w : text::words(plain)) add(w);
        }
        if (!bias_applied) {
            for (const auto& h : property.hypernyms) add(h);
        }
    }

    void add(std::string_view value) {
        auto key = text::normalize_value(value);
        if (!key.empty()) blocked_.insert(std::move(key));
    }

    bool rejects(std::string_view normalized) const { return normalized.empty() || blocked_.count(std::string(normalized)) != 0; }

private:
    std::set<std::string, std::less<>> blocked_;
};

// ---------------------------------------------------------------------------
// Aggregation and ranking

namespace detail {

inline double sorted_sum(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
}

} // namespace detail

/// Groups observations by normalized value. `total_probes` is |Q| for vote
/// support (defaults to the number of observations).
inline std::vector<CandidateAggregate> aggregate(std::span<const Observation> observations, Modality modality,
                                                 const ArtifactFilter& filter = {}, std::size_t total_probes = 0) {
    if (total_probes == 0) total_probes = observations.size();
    struct Group {
        std::vector<double> weights;
        std::map<std::string, std::size_t> spellings;
    };
    std::map<std::string, Group> groups;
    for (const auto& o : observations) {
        auto key = text::normalize_value(o.completion);
        if (filter.rejects(key)) continue;
        auto& g = groups[key];
        g.weights.push_back(o.weight);
        ++g.spellings[text::strip_edges(o.completion)];
    }

    std::vector<CandidateAggregate> out;
    out.reserve(groups.size());
    for (auto& [key, g] : groups) {
        CandidateAggregate a;
        a.value = key;
        // std::map iterates spellings in order, so the first maximum is the lexicographically smallest
        std::size_t best = 0;
        for (const auto& [spelling, n] : g.spellings) {
            if (n > best) {
                best = n;
                a.display = spelling;
            }
        }
        a.count = g.weights.size();
        const double sum = detail::sorted_sum(g.weights);
        const double mean = sum / static_cast<double>(a.count);
        if (modality == Modality::logprob) {
            a.mean_calibrated_prob = mean;
            a.strength = mean * static_cast<double>(a.count);
        } else {
            a.mean_vote = mean;
            a.strength = sum / static_cast<double>(total_probes);
        }
        out.push_back(std::move(a));
    }
    return out;
}

/// alpha * c/c_max + (1 - alpha) * (mean probability or mean vote), top_k by score.
inline std::vector<CandidateAggregate> rank(std::vector<CandidateAggregate> aggregates, const ScoringConfig& config = {}) {
    config.validate();
    if (aggregates.empty()) return aggregates;
    std::size_t c_max = 0;
    for (const auto& a : aggregates) c_max = std::max(c_max, a.count);
    for (auto& a : aggregates) {
        const double quality = a.mean_calibrated_prob ? *a.mean_calibrated_prob : a.mean_vote.value_or(0.0);
        a.rank_score = config.alpha * static_cast<double>(a.count) / static_cast<double>(c_max) +
                       (1.0 - config.alpha) * quality;
    }
    std::sort(aggregates.begin(), aggregates.end(), [](const auto& x, const auto& y) {
        if (x.rank_score != y.rank_score) return x.rank_score > y.rank_score;
        return x.value < y.value;
    });
    if (aggregates.size() > config.top_k) aggregates.resize(config.top_k);
    return aggregates;
}

/// Quantile level for m expected ground truths: 0.8, 0.7, ... floored.
inline double quantile_level(std::size_t m, const ScoringConfig& config = {}) {
    if (m < 1) throw InvalidArgument("expected ground-truth count must be >= 1");
    const double q = m >= 9 ? 0.0 : static_cast<double>(9 - m) / 10.0;
    return std::max(q, config.threshold_floor);
}

/// Inclusive linear-interpolation quantile of the values.
inline double linear_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw InvalidArgument("quantile of an empty set");
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

/// Ranked candidates at or above the q(m)-quantile of their rank scores; the
/// top-ranked candidate is always kept.
inline std::vector<CandidateAggregate> select_positives(std::span<const CandidateAggregate> ranked, std::size_t m,
                                                        const ScoringConfig& config = {}) {
    if (ranked.empty()) return {};
    std::vector<double> scores;
    scores.reserve(ranked.size());
    for (const auto& a : ranked) scores.push_back(a.rank_score);
    const double threshold = linear_quantile(scores, quantile_level(m, config));
    std::vector<CandidateAggregate> out;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (i == 0 || ranked[i].rank_score >= threshold) out.push_back(ranked[i]);
    }
    return out;
}

/// Shares of rank score over the positive-score selected candidates.
inline std::vector<DistributionEntry> normalize(std::span<const CandidateAggregate> selected) {
    std::vector<double> positive;
    for (const auto& a : selected) {
        if (a.rank_score > 0) positive.push_back(a.rank_score);
    }
    const double total = detail::sorted_sum(positive);
    std::vector<DistributionEntry> out;
    if (!(total > 0)) return out;
    for (const auto& a : selected) {
        if (a.rank_score > 0) out.push_back({a.value, a.display, a.rank_score / total});
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (x.share != y.share) return x.share > y.share;
        return x.value < y.value;
    });
    return out;
}

/// Biased sample skewness m3 / m2^(3/2); 0 for fewer than three values or no spread.
inline double sample_skewness(std::span<const double> xs) {
    const auto n = xs.size();
    if (n < 3) return 0.0;
    std::vector<double> v(xs.begin(), xs.end());
    const double mean = detail::sorted_sum(v) / static_cast<double>(n);
    double scale = 0.0;
    std::vector<double> d2, d3;
    for (double x : v) {
        const double d = x - mean;
        d2.push_back(d * d);
        d3.push_back(d * d * d);
        scale = std::max(scale, std::abs(x));
    }
    const double m2 = detail::sorted_sum(d2) / static_cast<double>(n);
    const double m3 = detail::sorted_sum(d3) / static_cast<double>(n);
    // spread that is pure rounding noise counts as no spread
    if (!(m2 > 1e-24 * scale * scale)) return 0.0;
    return m3 / std::pow(m2, 1.5);
}

/// Largest attainable |g1| for n points.
inline double max_skewness(std::size_t n) {
    if (n < 3) return 0.0;
    return static_cast<double>(n - 2) / std::sqrt(static_cast<double>(n - 1));
}

struct ConfidenceParts {
    double skew = 0.0;
    double dominance = 0.0;
    double confidence = 0.0;
};

/// Larger of rescaled |skewness| and the leader's share of positive strength,
/// over the (already truncated) top-k candidates.
inline ConfidenceParts confidence_parts(std::span<const CandidateAggregate> top_k) {
    ConfidenceParts parts;
    if (top_k.empty()) return parts;
    std::vector<double> s;
    std::vector<double> positive;
    double s_max = -std::numeric_limits<double>::infinity();
    for (const auto& a : top_k) {
        s.push_back(a.strength);
        if (a.strength > 0) positive.push_back(a.strength);
        s_max = std::max(s_max, a.strength);
    }
    const double total = detail::sorted_sum(positive);
    // skewness is scale-free, so normalizing by the total first would not change it
    if (s.size() >= 3) parts.skew = std::abs(sample_skewness(s)) / max_skewness(s.size());
    parts.dominance = total > 0 ? std::max(0.0, s_max) / total : 0.0;
    parts.confidence = std::clamp(std::max(parts.skew, parts.dominance), 0.0, 1.0);
    return parts;
}

inline double confidence(std::span<const CandidateAggregate> top_k) { return confidence_parts(top_k).confidence; }

/// Integer percentages by the largest-remainder method; sums to 100 when non-empty.
inline std::vector<int> display_percentages(std::span<const double> shares) {
    std::vector<int> out(shares.size(), 0);
    double total = 0.0;
    for (double s : shares) total += std::max(0.0, s);
    if (shares.empty() || !(total > 0)) return out;
    std::vector<std::pair<double, std::size_t>> remainders;
    int assigned = 0;
    for (std::size_t i = 0; i < shares.size(); ++i) {
        const double exact = 100.0 * std::max(0.0, shares[i]) / total;
        out[i] = static_cast<int>(std::floor(exact));
        assigned += out[i];
        remainders.push_back({exact - std::floor(exact), i});
    }
    std::stable_sort(remainders.begin(), remainders.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return shares[a.second] > shares[b.second];
    });
    for (std::size_t j = 0; assigned < 100; ++j, ++assigned) ++out[remainders[j % remainders.size()].second];
    return out;
}

// ---------------------------------------------------------------------------
// Whole pipeline

struct ScoringResult {
    std::vector<CandidateAggregate> ranked;
    std::vector<CandidateAggregate> selected;
    AssociationDistribution distribution;
    ConfidenceParts confidence;
    std::size_t probes_used = 0;
    std::size_t probes_without_baseline = 0;
};

using BaselineLookup = std::function<std::optional<BaselineEntry>(const Probe&)>;

/// Outcomes to distribution. Probes whose baseline is unavailable are left
/// out, like probes that failed outright.
inline ScoringResult score_outcomes(std::span<const ProbeOutcome> outcomes, const BaselineLookup& baseline,
                                    Modality modality, std::size_t expected_values, const ArtifactFilter& filter,
                                    const ScoringConfig& config = {}) {
    config.validate();
    ScoringResult result;
    std::vector<Observation> observations;
    observations.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        auto b = baseline(o.probe);
        if (!b) {
            ++result.probes_without_baseline;
            continue;
        }
        if (modality == Modality::logprob) {
            observations.push_back({o.completion, calibrate(o, *b)});
        } else {
            observations.push_back({o.completion, static_cast<double>(vote(o.completion, b->completion))});
        }
    }
    result.probes_used = observations.size();
    result.distribution.modality = modality;
    result.distribution.top_k_used = config.top_k;
    if (observations.empty()) return result;

    result.ranked = rank(aggregate(observations, modality, filter, observations.size()), config);
    if (result.ranked.empty()) return result;
    result.selected = select_positives(result.ranked, expected_values, config);
    result.distribution.entries = normalize(result.selected);
    if (result.distribution.entries.empty()) return result;
    result.confidence = confidence_parts(result.ranked);
    result.distribution.confidence = result.confidence.confidence;
    return result;
}

} // namespace pdaudit
