#pragma once

#include <optional>
#include <string>
#include <vector>

#include "datasets.hpp"
#include "evaluation.hpp"
#include "model_gateway.hpp"
#include "probe_gen.hpp"
#include "property_catalog.hpp"
#include "scoring.hpp"

namespace pdaudit {

struct AuditConfig {
    std::size_t k = default_counterfactual_budget;
    std::optional<std::uint64_t> seed;  // per-pair default when unset
    DecodingConfig decoding;
    ScoringConfig scoring;
    EvaluationConfig evaluation;
    RetryPolicy retry;
    bool memorization = true;
    MemorizationMode memorization_mode = MemorizationMode::semantic075;
};

/// Everything produced for one (subject, property) pair.
struct PairRun {
    ProbePlan plan;
    std::vector<ProbeOutcome> outcomes;
    ScoringResult scoring;
    EvalRecord record;
};

inline BaselineLookup lookup_in(const BaselineSlice& slice) {
    return [&slice](const Probe& p) -> std::optional<BaselineEntry> {
        auto it = slice.entries.find(baseline_key(p));
        if (it == slice.entries.end()) return std::nullopt;
        return it->second;
    };
}

/// Ground-truth cues for the values we can derive one from; values too short
/// for a cue still count as ground truths during evaluation.
inline std::vector<Prefix> usable_prefixes(std::span<const std::string> values) {
    std::vector<Prefix> out;
    for (const auto& v : values) {
        try {
            out.push_back(ground_truth_prefix(v));
        } catch (const PrefixTooShort&) {
        }
    }
    return out;
}

/// Baseline, probe and score an existing plan. Probes that still fail after
/// retries are left out and counted; when every probe fails the pair fails.
struct ScoredPlan {
    std::vector<ProbeOutcome> outcomes;
    ScoringResult scoring;
    std::size_t missing = 0;
    LogitBias bias;
    BaselineSlice baselines;
};

inline ScoredPlan probe_and_score(Backend& backend, BaselineStore& baselines, const PropertySpec& property,
                                  const ProbePlan& plan, std::size_t expected_values, const AuditConfig& config = {}) {
    const auto& caps = backend.capabilities();
    ScoredPlan out;
    out.bias = apply_logit_bias(caps, property);
    out.baselines = ensure_baseline(backend, property, plan.prefixes, baselines, config.decoding, out.bias, config.retry);
    for (const auto& probe : plan.probes) {
        try {
            out.outcomes.push_back(query(backend, probe, property, config.decoding, out.bias, config.retry));
        } catch (const TransportError&) {
            ++out.missing;
        }
    }
    if (out.outcomes.empty()) throw TransportError("every probe failed for " + plan.subject + " / " + property.id);

    ArtifactFilter filter(config.scoring, plan.subject, property, out.bias.applied());
    out.scoring = score_outcomes(out.outcomes, lookup_in(out.baselines), caps.modality(), expected_values, filter,
                                 config.scoring);
    return out;
}

/// Plan, baseline, probe, score and (when ground truths are known) evaluate
/// one pair.
inline PairRun audit_pair(Backend& backend, BaselineStore& baselines, const PropertySpec& property,
                          const SubjectRecord& subject, const std::string& model, const AuditConfig& config = {},
                          const EmbeddingProvider* embed = nullptr) {
    const auto& caps = backend.capabilities();
    const auto seed = config.seed.value_or(default_seed(subject.full_name, property.id));

    std::vector<std::string> gts;
    if (auto it = subject.ground_truths.find(property.id); it != subject.ground_truths.end()) {
        gts = dedup_ground_truths(it->second);
    }

    PairRun run;
    std::size_t expected_values = 1;
    if (gts.empty()) {
        run.plan = build_counterfactual_plan(subject.full_name, property, config.k, seed);
    } else {
        auto prefixes = usable_prefixes(gts);
        if (prefixes.empty()) throw PrefixTooShort("no ground truth of " + subject.full_name + " yields a cue");
        run.plan = build_plan_from_prefixes(subject.full_name, property, prefixes, config.k, seed);
        expected_values = gts.size();
    }

    auto scored = probe_and_score(backend, baselines, property, run.plan, expected_values, config);
    run.outcomes = std::move(scored.outcomes);
    run.scoring = std::move(scored.scoring);
    const std::size_t missing = scored.missing;
    const auto lookup = lookup_in(scored.baselines);
    ArtifactFilter filter(config.scoring, subject.full_name, property, scored.bias.applied());

    auto& r = run.record;
    r.subject = subject.full_name;
    r.property_id = property.id;
    r.label = property.label;
    r.category = property.category;
    r.model = model;
    r.sample = std::string(to_string(subject.cohort));
    r.modality = caps.modality();
    r.distribution = run.scoring.distribution.entries;
    r.confidence = run.scoring.distribution.confidence;
    for (const auto& e : run.scoring.distribution.entries) r.selected.push_back(e.display);
    r.probes = run.scoring.probes_used;
    r.probes_missing = missing + run.scoring.probes_without_baseline;

    if (!gts.empty()) {
        auto pr = precision_recall(r.selected, gts, embed, config.evaluation);
        r.precision = pr.precision;
        r.recall = pr.recall;
        r.f1 = pr.f1;
        r.empty_selection = pr.empty_selection;
        r.verdicts = std::move(pr.verdicts);

        if (config.memorization && caps.modality() == Modality::logprob) {
            auto rankings = rank_by_template(run.outcomes, lookup, filter);
            if (!rankings.empty()) {
                r.templates = evaluate_templates(rankings, gts, config.memorization_mode, embed, config.evaluation);
                r.memorized = memorization_decision(rankings, gts, config.memorization_mode, embed, config.evaluation);
                std::vector<double> strengths;
                for (const auto& t : r.templates) {
                    if (t.strength) strengths.push_back(*t.strength);
                }
                if (!strengths.empty()) r.memorization_strength = detail::mean_of(strengths);
            }
        }
    }
    return run;
}

} // namespace pdaudit
