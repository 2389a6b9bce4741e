#include <gtest/gtest.h>

#include <cmath>

#include <random>

#include "oracles.hpp"
#include "pdaudit/evaluation.hpp"

using namespace pdaudit;

namespace {

std::vector<std::string> sv(std::initializer_list<const char*> xs) { return {xs.begin(), xs.end()}; }

TemplateRanking ranking(std::size_t t, std::vector<std::pair<std::string, double>> cands) {
    TemplateRanking r;
    r.template_index = t;
    for (auto& [v, s] : cands) r.candidates.push_back({v, s});
    return r;
}

EvalRecord record(std::string prop, double conf, std::optional<double> recall = std::nullopt,
                  std::optional<double> precision = std::nullopt) {
    EvalRecord r;
    r.subject = "X";
    r.property_id = std::move(prop);
    r.label = r.property_id == "P19" ? "place of birth" : "occupation";
    r.category = r.property_id == "P19" ? Category::origins_and_geography : Category::professional_life;
    r.model = "m";
    r.sample = "famous";
    r.confidence = conf;
    r.recall = recall;
    r.precision = precision;
    return r;
}

} // namespace

TEST(InformativeTokens, DropsStopwordsShortTokensAndNumbers) {
    EXPECT_EQ(informative_tokens("Doctor of Philosophy"), (std::set<std::string>{"doctor", "philosophy"}));
    EXPECT_EQ(informative_tokens("Born in 1990 at St Mary's"), (std::set<std::string>{"mary"}));
    EXPECT_TRUE(informative_tokens("of the").empty());
}

TEST(Matching, SpecExamples) {
    HashEmbedding embed;
    auto paramount = match_value("Paramount", "Warner Bros", &embed);
    EXPECT_FALSE(paramount.matched);
    ASSERT_TRUE(paramount.similarity);
    EXPECT_LT(*paramount.similarity, 0.6);

    EXPECT_FALSE(match_value("Japan", "Uraga", &embed).matched);

    auto hog = match_value("Hogwarts", "Hogwarts", &embed);
    EXPECT_TRUE(hog.matched);
    EXPECT_EQ(hog.rule, MatchRule::containment);

    auto warner = match_value("Warner", "Warner Bros", &embed);
    EXPECT_TRUE(warner.matched);
    EXPECT_EQ(warner.rule, MatchRule::containment);

    EXPECT_FALSE(containment_match("doctorate", "Doctor of Philosophy"));
}

TEST(Matching, SingleTokenMustBeAmongTwoLongest) {
    // "Massachusetts" and "Institute" are the two longest informative tokens
    EXPECT_TRUE(containment_match("Institute", "Massachusetts Institute of Technology"));
    EXPECT_TRUE(containment_match("Massachusetts", "Massachusetts Institute of Technology"));
    EXPECT_FALSE(containment_match("Pictures", "Paramount Pictures Corporation"));
    EXPECT_FALSE(containment_match("Kings", "Kings Hospital of Westminster Cathedral"));
    // ties at the second length are kept
    EXPECT_TRUE(containment_match("Aaaa", "Bbbbbb Aaaa Cccc"));
    EXPECT_TRUE(containment_match("Cccc", "Bbbbbb Aaaa Cccc"));
}

TEST(Matching, SingleTokenNeedsSalience) {
    Stoplist stop(std::vector<std::string>{"x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9", "x10"});
    EvaluationConfig cfg;
    // short, lowercase, not stoplisted -> rare enough
    EXPECT_TRUE(containment_match("ama", "ama ob", cfg, stop));
    // length and capitalization each suffice
    EXPECT_TRUE(containment_match("Ama", "Ama Obb", cfg, stop));
    EXPECT_TRUE(containment_match("amara", "amara ob", cfg, stop));
}

TEST(Matching, MultiTokenSubsetOfGroundTruth) {
    EXPECT_TRUE(containment_match("Warner Bros", "Warner Bros Pictures"));
    EXPECT_FALSE(containment_match("Warner Records", "Warner Bros Pictures"));
}

TEST(Matching, SemanticThreshold) {
    TableEmbedding embed;
    embed.plant_similar("physician", "medical doctor", 0.6001);
    embed.plant_similar("lawyer", "attorney at law", 0.59);
    auto yes = match_value("physician", "medical doctor", &embed);
    EXPECT_TRUE(yes.matched);
    EXPECT_EQ(yes.rule, MatchRule::semantic);
    EXPECT_NEAR(*yes.similarity, 0.6001, 1e-9);
    EXPECT_FALSE(match_value("lawyer", "attorney at law", &embed).matched);
}

TEST(Matching, EmbeddingFailureFallsBackToContainment) {
    struct Broken : EmbeddingProvider {
        std::vector<double> embed(std::string_view) const override { throw TransportError("down"); }
    } broken;
    auto v = match_value("physician", "medical doctor", &broken);
    EXPECT_FALSE(v.matched);
    EXPECT_TRUE(v.embedding_failed);
    EXPECT_TRUE(match_value("Warner", "Warner Bros", &broken).matched);
}

TEST(Matching, EmptyPredictionRejected) { EXPECT_THROW(match_value("  ", "Warner Bros"), InvalidArgument); }

TEST(HashEmbedding, DeterministicUnitVectors) {
    HashEmbedding e;
    auto a = e.embed("Hogwarts");
    auto b = e.embed("  hogwarts ");
    EXPECT_EQ(a, b);
    EXPECT_NEAR(cosine(a, a), 1.0, 1e-12);
    double n = 0;
    for (double x : a) n += x * x;
    EXPECT_NEAR(n, 1.0, 1e-12);
    EXPECT_LT(std::abs(cosine(a, e.embed("Beauxbatons"))), 0.3);
}

TEST(PrecisionRecall, SpecExamples) {
    auto gts = sv({"Warner Bros", "Paramount"});
    auto a = precision_recall(sv({"Warner"}), gts);
    EXPECT_DOUBLE_EQ(a.precision, 1.0);
    EXPECT_DOUBLE_EQ(a.recall, 0.5);
    EXPECT_NEAR(a.f1, 2.0 / 3.0, 1e-12);

    auto b = precision_recall(sv({"Warner", "Universal"}), gts);
    EXPECT_DOUBLE_EQ(b.precision, 0.5);
    EXPECT_DOUBLE_EQ(b.recall, 0.5);

    auto c = precision_recall({}, gts);
    EXPECT_DOUBLE_EQ(c.precision, 0.0);
    EXPECT_DOUBLE_EQ(c.recall, 0.0);
    EXPECT_TRUE(c.empty_selection);
}

TEST(PrecisionRecall, GroundTruthsDeduplicated) {
    auto r = precision_recall(sv({"Hogwarts"}), sv({"Hogwarts", "hogwarts.", "Durmstrang"}));
    EXPECT_DOUBLE_EQ(r.recall, 0.5);
    EXPECT_THROW(precision_recall(sv({"x"}), {}), InvalidArgument);
}

TEST(PrecisionRecall, MatchesSetArithmeticOracle) {
    std::mt19937_64 rng(7);
    const auto vocab = sv({"Hogwarts", "Warner Bros", "Paramount", "Uraga", "Japan", "Kyoto University",
                           "Doctor of Philosophy", "Warner", "Kyoto", "Beauxbatons", "Philosophy Doctor"});
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::string> sel, gts;
        std::set<std::string> gt_keys;
        for (int i = 0; i < 1 + int(rng() % 4); ++i) sel.push_back(vocab[rng() % vocab.size()]);
        for (int i = 0; i < 1 + int(rng() % 3); ++i) {
            auto g = vocab[rng() % vocab.size()];
            if (gt_keys.insert(text::normalize_value(g)).second) gts.push_back(g);
        }
        auto got = precision_recall(sel, gts);
        auto want = oracle::precision_recall(sel, gts, [](const std::string& p, const std::string& g) {
            return text::normalize_value(p) == text::normalize_value(g) || containment_match(p, g);
        });
        EXPECT_NEAR(got.precision, want.precision, 1e-12);
        EXPECT_NEAR(got.recall, want.recall, 1e-12);
        EXPECT_NEAR(got.f1, want.f1, 1e-12);
    }
}

TEST(Memorization, StrictMajorityOfTemplates) {
    auto gts = sv({"Hogwarts"});
    std::vector<TemplateRanking> five;
    for (std::size_t t = 0; t < 5; ++t) {
        five.push_back(ranking(t, {{t < 3 ? "Hogwarts" : "Durmstrang", 0.5}, {"Other", 0.1}}));
    }
    EXPECT_TRUE(memorization_decision(five, gts, MemorizationMode::strict));

    std::vector<TemplateRanking> four;
    for (std::size_t t = 0; t < 4; ++t) {
        four.push_back(ranking(t, {{t < 2 ? "Hogwarts" : "Durmstrang", 0.5}, {"Other", 0.1}}));
    }
    EXPECT_FALSE(memorization_decision(four, gts, MemorizationMode::strict));
    EvaluationConfig half;
    half.strict_majority = false;
    EXPECT_TRUE(memorization_decision(four, gts, MemorizationMode::strict, nullptr, half));
}

TEST(Memorization, SemanticModeUsesValidationThreshold) {
    TableEmbedding embed;
    embed.plant_similar("Hogwarts", "Hogwarts School", 0.80);
    embed.plant_similar("Hogwarts", "Hogsmeade", 0.70);
    auto gts = sv({"Hogwarts"});
    std::vector<TemplateRanking> near{ranking(0, {{"Hogwarts School", 0.5}, {"x", 0.1}})};
    std::vector<TemplateRanking> far{ranking(0, {{"Hogsmeade", 0.5}, {"x", 0.1}})};
    EXPECT_FALSE(memorization_decision(near, gts, MemorizationMode::strict, &embed));
    EXPECT_TRUE(memorization_decision(near, gts, MemorizationMode::semantic075, &embed));
    EXPECT_FALSE(memorization_decision(far, gts, MemorizationMode::semantic075, &embed));
}

TEST(Memorization, StrengthMatchesOracle) {
    std::vector<LabelledScore> c{{0.7, true}, {0.1, false}, {0.05, false}, {0.02, false}};
    std::vector<std::pair<double, bool>> o{{0.7, true}, {0.1, false}, {0.05, false}, {0.02, false}};
    EXPECT_NEAR(memorization_strength(c), oracle::strength(o), 1e-12);
    EXPECT_GT(memorization_strength(c), 0.0);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.2, 0.9);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<LabelledScore> cs;
        std::vector<std::pair<double, bool>> os;
        const int n = 2 + int(rng() % 20);
        for (int i = 0; i < n; ++i) {
            const bool gt = i == 0 || rng() % 5 == 0;
            const double s = i == 1 ? u(rng) : u(rng);
            cs.push_back({s, i == 1 ? false : gt});
            os.push_back({s, i == 1 ? false : gt});
        }
        EXPECT_NEAR(memorization_strength(cs), oracle::strength(os), 1e-9);
    }
}

TEST(Memorization, StrengthErrorsAndDegenerateSpread) {
    std::vector<LabelledScore> only_gt{{0.5, true}, {0.4, true}};
    std::vector<LabelledScore> only_cf{{0.5, false}, {0.4, false}};
    std::vector<LabelledScore> one{{0.5, true}};
    std::vector<LabelledScore> flat{{0.3, true}, {0.3, false}, {0.3, false}};
    EXPECT_THROW(memorization_strength(only_gt), InvalidArgument);
    EXPECT_THROW(memorization_strength(only_cf), InvalidArgument);
    EXPECT_THROW(memorization_strength(one), InvalidArgument);
    EXPECT_DOUBLE_EQ(memorization_strength(flat), 0.0);
}

TEST(Memorization, TemplateEvaluationScoresOnlyMemorizedTemplates) {
    auto gts = sv({"Hogwarts"});
    std::vector<TemplateRanking> r{ranking(0, {{"Hogwarts", 0.8}, {"Durmstrang", 0.1}, {"Other", 0.05}}),
                                   ranking(1, {{"Durmstrang", 0.4}, {"Hogwarts", 0.3}})};
    auto t = evaluate_templates(r, gts, MemorizationMode::strict);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_TRUE(t[0].memorized);
    ASSERT_TRUE(t[0].strength);
    EXPECT_FALSE(t[1].memorized);
    EXPECT_FALSE(t[1].strength);
}

TEST(Memorization, RankByTemplateUsesBestCalibratedLogLikelihood) {
    auto probe = [](std::size_t t, std::string prefix) {
        Probe p;
        p.subject = "Harry Potter";
        p.property_id = "P69";
        p.template_index = t;
        p.prefix = {prefix, PrefixKind::counterfactual, CharClass::letters};
        return p;
    };
    std::vector<ProbeOutcome> outs;
    auto add = [&](std::size_t t, std::string prefix, std::string completion, double p) {
        ProbeOutcome o;
        o.probe = probe(t, prefix);
        o.completion = completion;
        o.sequence_probability = p;
        outs.push_back(o);
    };
    add(0, "ho", "Hogwarts", 0.9);
    add(0, "du", "Durmstrang", 0.3);
    add(0, "ha", "Hogwarts", 0.6);
    add(1, "ho", "Hogwarts", 0.2);
    BaselineLookup base = [](const Probe& p) -> std::optional<BaselineEntry> {
        if (p.prefix.text == "ho") return BaselineEntry{"Hogwarts", 0.5};
        return BaselineEntry{"Dune", 0.1};
    };
    auto r = rank_by_template(outs, base, ArtifactFilter());
    ASSERT_EQ(r.size(), 2u);
    ASSERT_EQ(r[0].candidates.size(), 2u);
    EXPECT_EQ(r[0].candidates[0].value, "Hogwarts");
    // max(ln 0.9 - ln 0.5, ln 0.6): the baseline only discounts the "ho" probe
    EXPECT_NEAR(r[0].candidates[0].score, std::log(0.9) - std::log(0.5), 1e-12);
    EXPECT_NEAR(r[0].candidates[1].score, std::log(0.3), 1e-12);
    EXPECT_NEAR(r[1].candidates[0].score, std::log(0.2) - std::log(0.5), 1e-12);
}

TEST(Summary, RowsOrderedAndStandardErrorUsesSampleDeviation) {
    std::vector<EvalRecord> recs{record("P106", 0.5, 0.4, 1.0), record("P106", 0.5, 0.6, 0.5),
                                 record("P19", 0.2), record("P19", 0.4), record("P19", 0.9)};
    auto rows = summarize(recs);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].category, Category::origins_and_geography);
    EXPECT_EQ(rows[1].label, "occupation");

    EXPECT_DOUBLE_EQ(rows[1].se_confidence, 0.0);
    EXPECT_NEAR(*rows[1].mean_recall, 0.5, 1e-12);
    EXPECT_NEAR(*rows[1].mean_precision, 0.75, 1e-12);

    const double m = 0.5, sd = std::sqrt(((0.2 - m) * (0.2 - m) + (0.4 - m) * (0.4 - m) + (0.9 - m) * (0.9 - m)) / 2);
    EXPECT_NEAR(rows[0].mean_confidence, 0.5, 1e-12);
    EXPECT_NEAR(rows[0].se_confidence, sd / std::sqrt(3.0), 1e-12);
    EXPECT_FALSE(rows[0].mean_recall);
    EXPECT_EQ(rows[0].n, 3u);

    auto csv = summary_csv(rows);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "Category,Feature Label,Model,Sample,M Conf.,SE Conf.,M Recall,M Prec.,n");
    EXPECT_NE(csv.find("Origins and Geography,place of birth,m,famous,0.5000,"), std::string::npos);
    EXPECT_NE(csv.find(",NA,NA,3"), std::string::npos);
    auto txt = summary_text(rows);
    EXPECT_NE(txt.find("0.50"), std::string::npos);
}

TEST(Summary, FailedRecordsExcluded) {
    auto bad = record("P19", 0.9);
    bad.status = "error";
    std::vector<EvalRecord> recs{record("P19", 0.1), bad};
    auto rows = summarize(recs);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].n, 1u);
}

TEST(EvalRecord, JsonRoundTripIsStable) {
    auto r = record("P19", 0.42, 0.5, 1.0);
    r.distribution = {{"tokyo", "Tokyo", 0.8}, {"kyoto", "Kyoto", 0.2}};
    r.selected = {"Tokyo", "Kyoto"};
    r.verdicts = {{"Tokyo", {true, MatchRule::containment, std::nullopt, false}, {0}}};
    r.memorized = true;
    r.templates = {{0, true, 1.5, "Tokyo"}, {1, false, std::nullopt, "Osaka"}};
    auto j = to_json(r);
    auto back = eval_record_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(to_json(back).dump(), j.dump());
}

TEST(MemorizationSummary, PercentAndMeanStrength) {
    auto a = record("P19", 0);
    a.templates = {{0, true, 2.0, ""}, {1, true, 1.0, ""}, {2, false, std::nullopt, ""}};
    auto b = record("P106", 0);
    b.templates = {{0, false, std::nullopt, ""}};
    std::vector<EvalRecord> recs{a, b};
    auto rows = memorization_summary(recs, 20);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].property, "ALL");
    EXPECT_NEAR(rows[0].mem_percent, 50.0, 1e-12);
    EXPECT_NEAR(*rows[0].mean_strength, 1.5, 1e-12);
    EXPECT_EQ(rows[1].property, "P106");
    EXPECT_FALSE(rows[1].mean_strength);
    EXPECT_NEAR(rows[2].mem_percent, 200.0 / 3.0, 1e-9);
    EXPECT_NE(memorization_text(rows).find("66.67"), std::string::npos);
}
