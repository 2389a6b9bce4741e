#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pdaudit/batch.hpp"

using namespace pdaudit;

namespace {

const PropertySpec& spouse() { return PropertyCatalog::shipped().at("P26"); }

SubjectRecord famous(std::string name, std::string prop, std::vector<std::string> values) {
    SubjectRecord s;
    s.full_name = std::move(name);
    s.cohort = Cohort::famous;
    s.ground_truths[prop] = std::move(values);
    return s;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("pdaudit_engine_" + name)).string();
}

std::string demo(const std::string& file) { return std::string(PDAUDIT_SOURCE_DIR) + "/data/demo/" + file; }

} // namespace

TEST(AuditPair, PlantedSpouseDominates) {
    MockBackend mock;
    mock.plant("Harry Potter", "P26", "*", "Ginny", 0.9);
    BaselineStore store;
    auto run = audit_pair(mock, store, spouse(), famous("Harry Potter", "P26", {"Ginny Weasley"}), "mock");
    ASSERT_FALSE(run.record.distribution.empty());
    EXPECT_EQ(run.record.distribution.front().display, "Ginny");
    EXPECT_NEAR(run.record.confidence, 1.0, 1e-12);
    EXPECT_EQ(run.plan.probes.size(), 5u * 21u);
    EXPECT_EQ(run.record.probes, 105u);
    EXPECT_EQ(run.record.probes_missing, 0u);
    ASSERT_TRUE(run.record.precision);
    EXPECT_DOUBLE_EQ(*run.record.precision, 1.0);
    EXPECT_DOUBLE_EQ(*run.record.recall, 1.0);
    EXPECT_EQ(run.record.sample, "famous");
    EXPECT_EQ(run.record.category, Category::family_and_relationships);
    // 105 subject probes + 105 baselines
    EXPECT_EQ(mock.calls(), 210u);
}

TEST(AuditPair, MemorizationPerTemplate) {
    MockBackend mock;
    mock.plant(MockRule{"Harry Potter", "P26", "gi", std::nullopt, {{"Ginny", 0.9}}});
    mock.plant(MockRule{"Harry Potter", "P26", "*", std::nullopt, {{"Cho", 0.3}, {"Luna", 0.2}}});
    // template 4 prefers a counterfactual answer everywhere
    mock.plant(MockRule{"Harry Potter", "P26", "*", 4, {{"Cho", 0.95}}});
    mock.plant(MockRule{"Harry Potter", "P26", "gi", 4, {{"Ginny", 0.5}}});
    BaselineStore store;
    AuditConfig cfg;
    cfg.memorization_mode = MemorizationMode::strict;
    auto run = audit_pair(mock, store, spouse(), famous("Harry Potter", "P26", {"Ginny"}), "mock", cfg);
    ASSERT_EQ(run.record.templates.size(), 5u);
    for (std::size_t t = 0; t < 4; ++t) {
        EXPECT_TRUE(run.record.templates[t].memorized) << t;
        EXPECT_TRUE(run.record.templates[t].strength);
    }
    EXPECT_FALSE(run.record.templates[4].memorized);
    EXPECT_EQ(run.record.templates[4].top_value, "Cho");
    ASSERT_TRUE(run.record.memorized);
    EXPECT_TRUE(*run.record.memorized);
    EXPECT_TRUE(run.record.memorization_strength);
}

TEST(AuditPair, SyntheticSubjectUsesCounterfactualsOnly) {
    MockBackend mock;
    mock.plant(MockRule{"Jussi Silva", "*", "*", std::nullopt, {{"Maria", 0.2}, {"Ana", 0.1}}});
    BaselineStore store;
    SubjectRecord s{"Jussi Silva", Cohort::synthetic, "", {}, std::nullopt};
    auto run = audit_pair(mock, store, spouse(), s, "mock");
    EXPECT_EQ(run.plan.prefixes.size(), 20u);
    for (const auto& p : run.plan.prefixes) EXPECT_EQ(p.kind, PrefixKind::counterfactual);
    EXPECT_FALSE(run.record.precision);
    EXPECT_FALSE(run.record.recall);
    EXPECT_TRUE(run.record.templates.empty());
    EXPECT_EQ(run.record.sample, "synthetic");
}

TEST(AuditPair, DigitPropertyForSyntheticUsesDigitCues) {
    const auto& dob = PropertyCatalog::shipped().at("P569");
    EXPECT_EQ(expected_char_class(dob), CharClass::digits);
    auto plan = build_counterfactual_plan("Jussi Silva", dob, 10, 1);
    for (const auto& p : plan.prefixes) EXPECT_EQ(p.char_class, CharClass::digits);
    EXPECT_THROW(build_counterfactual_plan("Jussi Silva", dob, 0, 1), InvalidArgument);
}

TEST(AuditPair, FailedProbesAreCountedNotScored) {
    MockBackend mock;
    mock.plant("Harry Potter", "P26", "*", "Ginny", 0.9);
    BaselineStore store;
    AuditConfig cfg;
    cfg.retry.max_retries = 0;
    cfg.retry.initial_backoff = std::chrono::milliseconds(0);
    // baselines are fetched first: the first two baseline keys fail
    mock.fail_next(2);
    auto run = audit_pair(mock, store, spouse(), famous("Harry Potter", "P26", {"Ginny Weasley"}), "mock", cfg);
    EXPECT_EQ(run.record.probes_missing, 2u);
    EXPECT_EQ(run.record.probes, 103u);
}

TEST(AuditPair, VoteBackendHasNoMemorization) {
    MockBackend mock({"vote-mock", false, false, false});
    mock.plant("Harry Potter", "P26", "*", "Ginny");
    BaselineStore store;
    auto run = audit_pair(mock, store, spouse(), famous("Harry Potter", "P26", {"Ginny Weasley"}), "vote");
    EXPECT_EQ(run.record.modality, Modality::vote);
    EXPECT_EQ(run.record.distribution.front().display, "Ginny");
    EXPECT_TRUE(run.record.templates.empty());
}

TEST(Fixture, RecordThenReplayIsIdentical) {
    const auto path = temp_path("fixture.jsonl");
    MockBackend mock;
    mock.plant(MockRule{"Harry Potter", "P26", "*", std::nullopt, {{"Ginny", 0.6}, {"Cho", 0.3}, {"Ginny", 0.4}}});
    mock.plant(MockRule{"Person", "*", "*", std::nullopt, {{"Smith", 0.2}, {"Ginny", 0.1}}});
    auto subject = famous("Harry Potter", "P26", {"Ginny Weasley"});
    std::string recorded;
    {
        FixtureWriter writer(path, mock.capabilities());
        RecordingBackend rec(mock, writer);
        BaselineStore store;
        recorded = to_json(audit_pair(rec, store, spouse(), subject, "mock").record).dump();
        EXPECT_EQ(writer.size(), 210u);
    }
    const auto live_calls = mock.calls();
    auto replay = ReplayBackend::from_file(path);
    EXPECT_EQ(replay.capabilities().name, "mock");
    EXPECT_FALSE(replay.created().empty());
    for (int i = 0; i < 2; ++i) {
        BaselineStore store;
        EXPECT_EQ(to_json(audit_pair(replay, store, spouse(), subject, "mock").record).dump(), recorded);
    }
    EXPECT_EQ(mock.calls(), live_calls);
    EXPECT_EQ(replay.calls(), 420u);
    std::remove(path.c_str());
}

TEST(Fixture, UnknownKeyAndCollisionsAreErrors) {
    const auto path = temp_path("collide.jsonl");
    {
        std::ofstream f(path);
        f << R"({"type":"meta","version":1,"backend":{"name":"m","logprobs":false}})" << "\n";
        f << R"({"type":"probe","subject":"A","property":"P26","template":0,"prefix":"gi","baseline":false,"text":"Ginny","tokens":null})" << "\n";
    }
    auto replay = ReplayBackend::from_file(path);
    ModelRequest req;
    req.context = {"A", "P26", 0, "gi", false};
    EXPECT_EQ(replay.complete(req).text, "Ginny");
    req.context.prefix = "ho";
    EXPECT_THROW(replay.complete(req), FixtureError);
    {
        std::ofstream f(path, std::ios::app);
        f << R"({"type":"probe","subject":"A","property":"P26","template":0,"prefix":"gi","baseline":false,"text":"Cho","tokens":null})" << "\n";
    }
    EXPECT_THROW(ReplayBackend::from_file(path), FixtureError);
    {
        std::ofstream f(path);
        f << R"({"type":"probe","subject":"A","property":"P26","template":0,"prefix":"gi","text":"x"})" << "\n";
    }
    EXPECT_THROW(ReplayBackend::from_file(path), FixtureError);
    std::remove(path.c_str());
}

TEST(Fixture, ZeroProbabilityTokenSurvivesRoundTrip) {
    const auto path = temp_path("zero.jsonl");
    MockBackend mock;  // the filler reply has probability 0
    {
        FixtureWriter writer(path, mock.capabilities());
        RecordingBackend rec(mock, writer);
        ModelRequest req;
        req.context = {"Person", "P26", 0, "gi", true};
        rec.complete(req);
    }
    auto replay = ReplayBackend::from_file(path);
    ModelRequest req;
    req.context = {"Person", "P26", 0, "gi", true};
    auto resp = replay.complete(req);
    ASSERT_TRUE(resp.tokens);
    ASSERT_EQ(resp.tokens->size(), 1u);
    EXPECT_TRUE(std::isinf(resp.tokens->front().logprob));
    EXPECT_LT(resp.tokens->front().logprob, 0.0);
    std::remove(path.c_str());
}

TEST(RunAudit, DemoManifestRecordReplayRoundTrip) {
    auto manifest = RunManifest::from_file(demo("manifest.json"));
    RunOptions rec;
    rec.mode = RunMode::record;
    rec.fixture = temp_path("demo_fixture.jsonl");
    auto recorded = run_audit(manifest, rec);
    EXPECT_TRUE(recorded.complete());
    // 2 famous subjects x 3 properties + 1 synthetic x 3
    EXPECT_EQ(recorded.records.size(), 9u);
    EXPECT_GT(recorded.backend_calls, 0u);

    RunOptions rep = rec;
    rep.mode = RunMode::replay;
    auto a = run_audit(manifest, rep);
    rep.jobs = 3;
    auto b = run_audit(manifest, rep);
    EXPECT_EQ(a.backend_calls, 0u);
    EXPECT_GT(a.replay_calls, 0u);
    EXPECT_EQ(records_jsonl(a.records), records_jsonl(recorded.records));
    EXPECT_EQ(records_jsonl(b.records), records_jsonl(a.records));
    EXPECT_EQ(report(a.records, TableFormat::csv), report(b.records, TableFormat::csv));
    std::remove(rec.fixture.c_str());
}

TEST(RunAudit, ShippedFixtureReplays) {
    auto manifest = RunManifest::from_file(demo("manifest.json"));
    RunOptions rep;
    rep.mode = RunMode::replay;
    auto a = run_audit(manifest, rep);
    auto b = run_audit(manifest, rep);
    EXPECT_TRUE(a.complete());
    EXPECT_EQ(a.records.size(), 9u);
    EXPECT_EQ(a.backend_calls, 0u);
    EXPECT_EQ(records_jsonl(a.records), records_jsonl(b.records));
}

TEST(RunAudit, ValidateRefusesVoteBackend) {
    auto manifest = RunManifest::from_file(demo("manifest.json"));
    RunOptions opt;
    opt.backend = "demo-vote";
    EXPECT_THROW(validate_memorization(manifest, opt), CapabilityError);
}

TEST(RunAudit, SweepEmitsOneRowPerK) {
    auto manifest = RunManifest::from_file(demo("manifest.json"));
    RunOptions rep;
    rep.mode = RunMode::replay;
    auto rows = sweep_k(manifest, rep);
    ASSERT_EQ(rows.size(), 6u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].k, sweep_grid()[i]);
        EXPECT_EQ(rows[i].failures, 0u);
        EXPECT_EQ(rows[i].cells.front().property, "ALL");
    }
    auto table = sweep_table(rows, MemorizationMode::semantic075, TableFormat::text);
    EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 7);
}

TEST(RunAudit, PerPairFailuresAreIsolated) {
    auto manifest = RunManifest::from_file(demo("manifest.json"));
    RunOptions rep;
    rep.mode = RunMode::replay;
    rep.k = 60;  // prefixes beyond what the fixture holds
    auto run = run_audit(manifest, rep);
    EXPECT_FALSE(run.complete());
    EXPECT_EQ(run.records.size() + run.failures.size(), 9u);
}

TEST(RunManifest, DefaultBackendChoice) {
    nlohmann::json j{{"cohort", "c.jsonl"},
                     {"backends", {{"zeta", {{"type", "mock"}}}, {"alpha", {{"type", "mock"}}}}}};
    EXPECT_EQ(RunManifest::from_json(j).default_backend, "alpha");
    j["default_backend"] = "zeta";
    EXPECT_EQ(RunManifest::from_json(j).default_backend, "zeta");
    j["default_backend"] = "missing";
    EXPECT_THROW(RunManifest::from_json(j), InvalidArgument);
}
