// Acceptance checks, one PASS/FAIL line each. Exit status is nonzero when any
// check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pdaudit/audit_service.hpp"
#include "pdaudit/batch.hpp"
#include "pdaudit/engine.hpp"
#include "pdaudit/fixture.hpp"

using namespace pdaudit;
using namespace std::chrono_literals;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string num(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

const PropertySpec& spouse() { return PropertyCatalog::shipped().at("P26"); }

Outcome scoring_oracle() {
    const auto started = Clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(-0.3, 1.0);
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const bool vote_mode = trial % 2 == 1;
        const int n_probes = 1 + static_cast<int>(rng() % 100);
        const int n_values = 1 + static_cast<int>(rng() % 10);
        std::vector<Observation> obs;
        std::vector<std::pair<std::string, double>> raw;
        for (int i = 0; i < n_probes; ++i) {
            std::string v = "val" + std::to_string(rng() % n_values);
            double w = vote_mode ? static_cast<double>(rng() % 2) : u(rng);
            obs.push_back({v, w});
            raw.push_back({v, w});
        }
        const int m = 1 + static_cast<int>(rng() % 10);
        auto ranked = rank(aggregate(obs, vote_mode ? Modality::vote : Modality::logprob));
        auto selected = select_positives(ranked, m);
        auto entries = normalize(selected);
        auto expect = oracle::run(raw, vote_mode, m);

        auto fail = [&](const std::string& what) { return Outcome{false, "trial " + std::to_string(trial) + ": " + what}; };
        if (ranked.size() != expect.top.size()) return fail("ranked size");
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            if (ranked[i].value != expect.top[i].value) return fail("rank order");
            worst = std::max({worst, std::fabs(ranked[i].rank_score - expect.top[i].score),
                              std::fabs(ranked[i].strength - expect.top[i].strength)});
        }
        if (selected.size() != expect.selected.size()) return fail("selection size");
        if (entries.size() != expect.shares.size()) return fail("entry count");
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (entries[i].value != expect.shares[i].first) return fail("entry order");
            worst = std::max(worst, std::fabs(entries[i].share - expect.shares[i].second));
        }
        if (!entries.empty()) worst = std::max(worst, std::fabs(confidence(ranked) - expect.confidence));
    }
    const double secs = seconds_since(started);
    return {worst <= 1e-12 && secs < 5.0, "200 sets, max error " + num(worst) + ", " + num(secs) + " s"};
}

Outcome threshold_table() {
    const std::vector<std::pair<std::size_t, double>> table{{1, 0.80}, {2, 0.70}, {3, 0.60}, {4, 0.50},
                                                            {5, 0.40}, {9, 0.10}, {10, 0.10}, {50, 0.10}};
    for (const auto& [m, q] : table) {
        if (quantile_level(m) != q) return {false, "m=" + std::to_string(m) + " gives " + num(quantile_level(m))};
    }
    return {true, "m=1..5 -> 0.8..0.4, m>=9 -> 0.1"};
}

Outcome confidence_extremes() {
    auto agg = [](std::string v, int count, double mean) {
        std::vector<Observation> obs(count, Observation{std::move(v), mean});
        return aggregate(obs, Modality::logprob).front();
    };
    const double single = confidence(std::vector<CandidateAggregate>{agg("solo", 3, 0.4)});
    std::vector<CandidateAggregate> flat;
    for (int i = 0; i < 20; ++i) flat.push_back(agg("v" + std::to_string(i), 2, 0.35));
    const double twenty = confidence(flat);
    return {single == 1.0 && std::fabs(twenty - 0.05) <= 1e-12,
            "single " + num(single) + ", twenty equal " + num(twenty)};
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const auto n = xs.size();
    return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2;
}

Outcome separation() {
    const auto started = Clock::now();
    MockBackend mock;
    std::vector<SubjectRecord> planted, diffuse;
    for (int i = 0; i < 10; ++i) {
        SubjectRecord p{"Planted Subject " + std::to_string(i), Cohort::synthetic, "", {}, std::nullopt};
        SubjectRecord d{"Diffuse Subject " + std::to_string(i), Cohort::synthetic, "", {}, std::nullopt};
        std::vector<MockAnswer> peaked(9, MockAnswer{"Marguerite", 0.6});
        peaked.push_back({"Odile", 0.6});
        mock.plant(MockRule{p.full_name, "P26", "*", std::nullopt, peaked});
        std::vector<MockAnswer> flat;
        for (int v = 0; v < 15; ++v) flat.push_back({"Name" + std::string(1, static_cast<char>('a' + v)) + "son", 0.6});
        mock.plant(MockRule{d.full_name, "P26", "*", std::nullopt, flat});
        planted.push_back(std::move(p));
        diffuse.push_back(std::move(d));
    }
    BaselineStore baselines;
    std::vector<double> cp, cd;
    double min_share = 1.0;
    for (const auto& s : planted) {
        auto run = audit_pair(mock, baselines, spouse(), s, "mock");
        const auto hits = std::count_if(run.outcomes.begin(), run.outcomes.end(),
                                        [](const auto& o) { return o.completion == "Marguerite"; });
        min_share = std::min(min_share, static_cast<double>(hits) / static_cast<double>(run.outcomes.size()));
        cp.push_back(run.record.confidence);
    }
    for (const auto& s : diffuse) cd.push_back(audit_pair(mock, baselines, spouse(), s, "mock").record.confidence);
    const double gap = median(cp) - median(cd);
    const double secs = seconds_since(started);
    return {min_share >= 0.8 && gap >= 0.5 && secs < 10.0,
            "median " + num(median(cp)) + " vs " + num(median(cd)) + " (planted share >= " + num(min_share) + "), " +
                num(secs) + " s"};
}

Outcome prefix_pool() {
    const auto pool = letter_prefix_pool();
    if (pool.size() != 235) return {false, "pool has " + std::to_string(pool.size())};
    const std::vector<std::string> gts{"Ginny Weasley", "Cho Chang", "Luna Lovegood", "Zacharias Smith"};
    for (std::size_t k : {0, 10, 20, 30, 40, 50}) {
        for (std::uint64_t seed : {1ULL, 7ULL, 42ULL, 1234567ULL}) {
            auto plan = build_plan("Harry Potter", spouse(), gts, k, seed);
            for (const auto& g : gts) {
                const auto cue = ground_truth_prefix(g).text;
                auto it = std::find_if(plan.prefixes.begin(), plan.prefixes.end(),
                                       [&](const Prefix& p) { return p.text == cue; });
                if (it == plan.prefixes.end() || it->kind != PrefixKind::ground_truth) {
                    return {false, "cue " + cue + " lost at k=" + std::to_string(k)};
                }
            }
            if (plan.prefixes.size() != gts.size() + k) {
                return {false, "k=" + std::to_string(k) + " gives " + std::to_string(plan.prefixes.size()) + " cues"};
            }
        }
    }
    return {true, "235 cues; ground-truth cues kept for k in {0,...,50}"};
}

Outcome probe_bound() {
    const std::vector<std::string> values{"Ginny Weasley", "Cho Chang", "Luna Lovegood", "Romilda Vane", "Hannah Abbott",
                                          "Gabrielle Delacour"};
    std::size_t smallest_slack = SIZE_MAX;
    for (std::size_t n = 1; n <= values.size(); ++n) {
        std::vector<std::string> gts(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n));
        auto plan = build_plan("Harry Potter", spouse(), gts, 20, 11);
        if (spouse().canaries.size() != 5) return {false, "catalog entry without 5 canaries"};
        const auto bound = 5 * (n + 20);
        if (plan.probes.size() < bound) {
            return {false, "n=" + std::to_string(n) + ": " + std::to_string(plan.probes.size()) + " < " + std::to_string(bound)};
        }
        smallest_slack = std::min(smallest_slack, plan.probes.size() - bound);
    }
    return {true, "n=1..6, k=20, min slack " + std::to_string(smallest_slack)};
}

Outcome matching_verdicts() {
    struct Case {
        const char* prediction;
        const char* truth;
        bool expect;
    };
    const Case cases[] = {{"Paramount", "Warner Bros", false},
                          {"Japan", "Uraga", false},
                          {"Warner", "Warner Bros", true},
                          {"doctorate", "Doctor of Philosophy", false}};
    for (const auto& c : cases) {
        if (match_value(c.prediction, c.truth).matched != c.expect) {
            return {false, std::string(c.prediction) + " / " + c.truth};
        }
    }
    // the semantic path with a deterministic embedder
    TableEmbedding embed;
    embed.plant_similar("Doctor of Philosophy", "doctorate", 0.8);
    auto v = match_value("doctorate", "Doctor of Philosophy", &embed);
    if (!v.matched || v.rule != MatchRule::semantic) return {false, "semantic path did not match doctorate"};
    return {true, "4 containment verdicts; doctorate matches only semantically"};
}

Outcome precision_recall_oracle() {
    const std::vector<std::string> vocab{"Warner Bros",  "Warner",        "Bros",      "Paramount",   "Ginny Weasley",
                                         "Ginny",        "Weasley",       "Cho Chang", "Paris",       "Paris Texas",
                                         "Oxford",       "University of Oxford",       "Japan",       "Uraga",
                                         "Luna Lovegood", "Lovegood"};
    std::mt19937_64 rng(99);
    auto match = [](const std::string& s, const std::string& g) { return match_value(s, g).matched; };
    std::size_t shared_hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto pick = [&](std::size_t lo, std::size_t hi) {
            auto shuffled = vocab;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            shuffled.resize(lo + rng() % (hi - lo + 1));
            return shuffled;
        };
        const auto selected = pick(0, 8);
        const auto gts = pick(1, 8);
        auto got = precision_recall(selected, gts);
        auto want = oracle::precision_recall(selected, gts, match);
        if (got.precision != want.precision || got.recall != want.recall || got.f1 != want.f1) {
            return {false, "trial " + std::to_string(trial) + " differs"};
        }
        if (got.recall > 1.0) return {false, "recall above 1 in trial " + std::to_string(trial)};
        // several predictions landing on one ground truth
        for (std::size_t g = 0; g < gts.size(); ++g) {
            const auto n = std::count_if(selected.begin(), selected.end(), [&](const auto& s) { return match(s, gts[g]); });
            if (n > 1) ++shared_hits;
        }
    }
    // a direct double-count probe
    const std::vector<std::string> sel{"Warner", "Warner Bros"}, gt{"Warner Bros", "Paramount"};
    auto pr = precision_recall(sel, gt);
    if (pr.recall != 0.5 || pr.precision != 1.0) return {false, "shared ground truth counted twice"};
    return {true, "100 pairs exact; " + std::to_string(shared_hits) + " shared-ground-truth cases, recall <= 1"};
}

// One canary template of a planted subject.
enum class Plant { exact, paraphrase75, paraphrase74, lost, buried75 };

struct PlantedSubject {
    std::string name;
    std::string truth;
    std::string near;     // planted at cosine 0.75
    std::string farther;  // planted at cosine 0.74
    std::vector<Plant> templates;
};

Outcome memorization_harness() {
    const std::vector<PlantedSubject> subjects{
        {"Elena Marsh", "Tomas Reyes", "Tommy Reyes", "Tomasz Reyez",
         {Plant::exact, Plant::exact, Plant::paraphrase75, Plant::lost, Plant::exact}},
        {"Idris Cole", "Nadia Okafor", "Nadine Okafor", "Nadia Okafur",
         {Plant::exact, Plant::paraphrase74, Plant::exact, Plant::paraphrase75, Plant::buried75}},
        {"Wren Halloway", "Priya Natarajan", "Priya N Natarajan", "Pria Natarajen",
         {Plant::lost, Plant::lost, Plant::exact, Plant::paraphrase75, Plant::lost}},
        {"Otto Brandt", "Lucia Ferraro", "Lucy Ferraro", "Lucie Ferrara",
         {Plant::exact, Plant::exact, Plant::exact, Plant::exact, Plant::paraphrase74}},
    };
    constexpr std::uint64_t seed = 7;
    AuditConfig cfg;
    cfg.seed = seed;

    MockBackend mock;
    TableEmbedding embed;
    struct Expected {
        bool strict = false, semantic = false;
        double strength = 0;  // over the three planted scores, when memorized
    };
    std::vector<Expected> expected;
    for (std::size_t s = 0; s < subjects.size(); ++s) {
        const auto& subj = subjects[s];
        embed.plant_similar(subj.truth, subj.near, 0.75);
        embed.plant_similar(subj.truth, subj.farther, 0.74);
        const std::vector<std::string> gts{subj.truth};
        auto plan = build_plan(subj.name, spouse(), gts, cfg.k, seed);
        const auto gt_cue = plan.prefixes.at(0).text;
        const auto odd_cue = plan.prefixes.at(1).text;  // first counterfactual cue

        for (std::size_t t = 0; t < subj.templates.size(); ++t) {
            const auto kind = subj.templates[t];
            const double shift = 0.02 * static_cast<double>(s + t);
            double p_gt = 0.85 - shift, p_cf = 0.30 + shift / 2, p_odd = 0.12 + shift / 4;
            std::string gt_reply = subj.truth;
            if (kind == Plant::paraphrase75 || kind == Plant::buried75) gt_reply = subj.near;
            if (kind == Plant::paraphrase74) gt_reply = subj.farther;
            if (kind == Plant::lost || kind == Plant::buried75) std::swap(p_gt, p_cf);

            mock.plant(MockRule{subj.name, "P26", "*", t, {{"Marco Silva", p_cf}}});
            mock.plant(MockRule{subj.name, "P26", odd_cue, t, {{"Henrik Dahl", p_odd}}});
            mock.plant(MockRule{subj.name, "P26", gt_cue, t, {{gt_reply, p_gt}}});

            Expected e;
            e.strict = kind == Plant::exact;
            e.semantic = kind == Plant::exact || kind == Plant::paraphrase75;
            if (e.semantic) {
                e.strength = oracle::strength({{std::log(p_gt), true}, {std::log(p_cf), false}, {std::log(p_odd), false}});
            }
            expected.push_back(e);
        }
    }

    std::vector<SubjectRecord> cohort;
    for (const auto& subj : subjects) {
        SubjectRecord r{subj.name, Cohort::famous, "P26", {{"P26", {subj.truth}}}, std::nullopt};
        cohort.push_back(std::move(r));
    }

    // record the planted corpus, then score only from the fixture
    const auto fixture = (std::filesystem::temp_directory_path() / "pdaudit_acceptance_memorization.jsonl").string();
    {
        FixtureWriter writer(fixture, mock.capabilities());
        RecordingBackend recorder(mock, writer);
        BaselineStore baselines;
        for (const auto& r : cohort) audit_pair(recorder, baselines, spouse(), r, "planted", cfg);
    }
    auto replay = ReplayBackend::from_file(fixture);
    std::filesystem::remove(fixture);

    auto run_mode = [&](MemorizationMode mode) {
        AuditConfig c = cfg;
        c.memorization_mode = mode;
        BaselineStore baselines;
        std::vector<EvalRecord> records;
        for (const auto& r : cohort) records.push_back(audit_pair(replay, baselines, spouse(), r, "planted", c, &embed).record);
        return records;
    };
    const auto strict = run_mode(MemorizationMode::strict);
    const auto semantic = run_mode(MemorizationMode::semantic075);

    auto check = [&](const std::vector<EvalRecord>& records, bool semantic_mode, std::string& detail) {
        std::size_t hits = 0, total = 0;
        std::vector<double> strengths;
        for (const auto& e : expected) {
            ++total;
            if (semantic_mode ? e.semantic : e.strict) {
                ++hits;
                strengths.push_back(e.strength);
            }
        }
        const double want_pct = 100.0 * static_cast<double>(hits) / static_cast<double>(total);
        long double sum = 0;
        for (double v : strengths) sum += v;
        const double want_strength = static_cast<double>(sum / strengths.size());
        const auto row = memorization_summary(records).front();
        detail += (semantic_mode ? "semantic075 " : "strict ") + num(row.mem_percent) + "% s=" +
                  (row.mean_strength ? num(*row.mean_strength) : "NA") + " (hand " + num(want_pct) + "%, " +
                  num(want_strength) + "); ";
        return row.templates == total && row.mem_percent == want_pct && row.mean_strength &&
               std::fabs(*row.mean_strength - want_strength) <= 1e-12;
    };
    std::string detail;
    bool ok = check(strict, false, detail);
    ok = check(semantic, true, detail) && ok;

    // flips between the modes are exactly the top-ranked 0.75 paraphrases
    std::size_t idx = 0, flips = 0;
    for (std::size_t s = 0; s < subjects.size(); ++s) {
        for (std::size_t t = 0; t < subjects[s].templates.size(); ++t, ++idx) {
            const bool flipped = !strict[s].templates.at(t).memorized && semantic[s].templates.at(t).memorized;
            const bool back = strict[s].templates.at(t).memorized && !semantic[s].templates.at(t).memorized;
            const bool planted = subjects[s].templates[t] == Plant::paraphrase75;
            flips += flipped;
            if (flipped != planted || back) {
                ok = false;
                detail += "unexpected flip at " + subjects[s].name + " template " + std::to_string(t) + "; ";
            }
        }
    }
    detail += std::to_string(flips) + " flips";
    return {ok, detail};
}

Outcome famousness_check() {
    if (famousness(0, 0) != 0.0) return {false, "f(0,0) = " + num(famousness(0, 0))};
    double worst = 0;
    for (int i = 1; i < 100; ++i) {
        const std::int64_t v0 = (i - 1) * 5000, v1 = i * 5000, w = 12345;
        if (!(famousness(v1, w) > famousness(v0, w))) return {false, "not increasing in page views at " + std::to_string(i)};
        if (!(famousness(w, v1) > famousness(w, v0))) return {false, "not increasing in word count at " + std::to_string(i)};
        worst = std::max(worst, std::fabs(famousness(v1, w) - (10 * std::log(1.0 + v1) + w / 1000.0)));
    }
    if (worst > 1e-12) return {false, "formula off by " + num(worst)};

    // scores straddling the cut: 349.999, exactly 350, 350.001 and a clear pass
    FixtureEntities entities;
    FixturePageStats pages;
    const std::vector<std::pair<std::string, PageStats>> people{
        {"Below Line", {0, 349999}}, {"On Line", {0, 350000}}, {"Above Line", {0, 350001}}, {"Well Known", {2000000, 300000}}};
    int id = 0;
    for (const auto& [name, st] : people) {
        entities.add(EntityRecord{"Q" + std::to_string(++id), name, true, {{"P26", {"Someone Else"}}}});
        pages.set(name, st);
    }
    FamousConfig cfg;
    cfg.properties = {"P26"};
    auto build = build_famous(entities, entities, pages, cfg);
    std::vector<std::string> admitted;
    for (const auto& r : build.records) {
        if (!r.famousness || *r.famousness <= 350.0) return {false, r.full_name + " admitted at or below 350"};
        admitted.push_back(r.full_name);
    }
    std::sort(admitted.begin(), admitted.end());
    const bool right = admitted == std::vector<std::string>{"Above Line", "Well Known"};
    return {right, "f(0,0)=0, monotone on 100 points, admitted " + std::to_string(admitted.size()) + " of 4 near the cut"};
}

struct TimedEvent {
    std::string name;
    json data;
    Clock::time_point at;
};

// Streams one discovery request, timestamping events as they arrive.
// stop_after > 0 disconnects after that many events.
std::vector<TimedEvent> stream(int port, const json& body, int* status, std::size_t stop_after = 0) {
    httplib::Client cli("127.0.0.1", port);
    cli.set_read_timeout(30s);
    std::vector<TimedEvent> events;
    std::string buffer;
    httplib::Request req;
    req.method = "POST";
    req.path = "/api/discover";
    req.body = body.dump();
    req.set_header("Content-Type", "application/json");
    req.content_receiver = [&](const char* data, std::size_t n, std::uint64_t, std::uint64_t) {
        buffer.append(data, n);
        for (std::size_t end; (end = buffer.find("\n\n")) != std::string::npos;) {
            std::istringstream block(buffer.substr(0, end));
            buffer.erase(0, end + 2);
            std::string line, name, payload;
            while (std::getline(block, line)) {
                if (line.rfind("event: ", 0) == 0) name = line.substr(7);
                if (line.rfind("data: ", 0) == 0) payload = line.substr(6);
            }
            events.push_back({name, json::parse(payload), Clock::now()});
        }
        return stop_after == 0 || events.size() < stop_after;
    };
    auto res = cli.send(req);
    *status = res ? res->status : (events.empty() ? -1 : 200);
    return events;
}

Outcome service_protocol() {
    const auto started = Clock::now();
    const auto db_path = (std::filesystem::temp_directory_path() / "pdaudit_acceptance_study.db").string();
    std::filesystem::remove(db_path);

    // what the participants typed locally; only two-character cues leave the browser
    struct Typed {
        std::string subject, value, model_says;
    };
    const std::vector<Typed> typed{{"Harry Potter", "Ginevra Weasley", "Ginny"},
                                   {"Ron Weasley", "Lavender Brown", "Lav"},
                                   {"Hermione Granger", "Viktor Krum", "Vicky"}};
    MockBackend mock;
    for (const auto& t : typed) mock.plant(MockRule{t.subject, "P26", "*", std::nullopt, {{t.model_says, 0.9}}});
    mock.set_latency(6ms);  // about 1.3 s per request
    BaselineStore baselines;
    const auto& catalog = PropertyCatalog::shipped();

    std::string detail;
    bool ok = true;
    auto fail = [&](const std::string& why) {
        ok = false;
        detail += why + "; ";
    };
    std::size_t gaps = 0;
    double worst_gap = 0;
    {
        StudyStore store(db_path);
        AuditServer server(engine_runner(mock, baselines, catalog), store, catalog);
        const int port = server.start();

        auto body = [&](const Typed& t) {
            return json{{"subject", t.subject}, {"property_id", "P26"}, {"prefixes", {t.value.substr(0, 2)}}};
        };
        std::vector<int> statuses(3);
        std::vector<std::future<std::vector<TimedEvent>>> streams;
        streams.push_back(std::async(std::launch::async, stream, port, body(typed[0]), &statuses[0], 0));
        // the first request is running before the other two queue behind it
        while (mock.calls() == 0 && seconds_since(started) < 5) std::this_thread::sleep_for(5ms);
        for (int i = 1; i < 3; ++i) {
            streams.push_back(std::async(std::launch::async, stream, port, body(typed[i]), &statuses[i], 0));
            std::this_thread::sleep_for(50ms);
        }
        std::vector<std::vector<TimedEvent>> all;
        for (auto& s : streams) all.push_back(s.get());

        for (std::size_t i = 0; i < all.size(); ++i) {
            const auto& events = all[i];
            if (statuses[i] != 200) fail("stream " + std::to_string(i) + " status " + std::to_string(statuses[i]));
            std::size_t terminals = 0;
            std::optional<long long> prev;
            for (std::size_t e = 0; e < events.size(); ++e) {
                if (events[e].name != "position") {
                    ++terminals;
                    if (e + 1 != events.size()) fail("event after terminal");
                    continue;
                }
                const auto pos = events[e].data.at("position").get<long long>();
                if (prev && pos > *prev) fail("position increased");
                prev = pos;
                if (e > 0 && events[e - 1].name == "position") {
                    const double gap = std::chrono::duration<double>(events[e].at - events[e - 1].at).count();
                    ++gaps;
                    worst_gap = std::max(worst_gap, std::fabs(gap - 1.0));
                }
            }
            if (terminals != 1) fail("stream " + std::to_string(i) + " had " + std::to_string(terminals) + " terminal events");
            if (events.empty() || events.back().name != "result") fail("stream " + std::to_string(i) + " did not end in a result");
        }
        if (gaps < 2) fail("only " + std::to_string(gaps) + " position intervals observed");
        if (worst_gap > 0.3) fail("position interval off by " + num(worst_gap) + " s");

        // study logging for each result, then feedback
        httplib::Client cli("127.0.0.1", port);
        for (std::size_t i = 0; i < all.size() && ok; ++i) {
            const auto& result = all[i].back().data;
            json log{{"participant_id", "P-0042"}, {"property_id", "P26"}, {"request_id", result.at("request_id")},
                     {"confidence", result.at("confidence")}, {"candidates", result.at("entries")}};
            auto r = cli.Post("/api/user-study", log.dump(), "application/json");
            if (!r || r->status != 201) {
                fail("study result not stored");
                continue;
            }
            json fb{{"result_id", json::parse(r->body).at("result_id")}, {"top_correct", "no"}, {"any_correct", "no"},
                    {"privacy_violation", "unsure"}};
            auto f = cli.Post("/api/user-study", fb.dump(), "application/json");
            if (!f || f->status != 200) fail("feedback not stored");
        }

        // 17 more admitted requests (disconnecting after the first event), then the 21st
        for (int i = 0; i < 17; ++i) {
            int status = 0;
            auto events = stream(port, body(typed[i % 3]), &status, 1);
            if (events.empty() || events.front().name != "position") fail("request " + std::to_string(i + 4) + " not admitted");
        }
        auto throttled = cli.Post("/api/discover", body(typed[0]).dump(), "application/json");
        if (!throttled || throttled->status != 429 || !throttled->has_header("Retry-After")) fail("21st request not throttled");
        server.stop();
    }

    std::ifstream in(db_path, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::filesystem::remove(db_path);
    if (bytes.empty()) fail("study database is empty");
    std::size_t scanned = 0;
    for (const auto& t : typed) {
        std::vector<std::string> needles{t.subject, t.value};
        for (const auto* s : {&t.subject, &t.value}) {
            std::istringstream words(*s);
            for (std::string w; words >> w;) needles.push_back(w);
        }
        for (const auto& n : needles) {
            ++scanned;
            if (n.size() > 2 && bytes.find(n) != std::string::npos) fail("storage holds '" + n + "'");
        }
    }
    const double secs = seconds_since(started);
    if (secs >= 30) fail("took " + num(secs) + " s");
    detail += std::to_string(gaps) + " intervals within " + num(worst_gap) + " s of 1 Hz, 21st throttled, " +
              std::to_string(scanned) + " user strings absent from storage, " + num(secs) + " s";
    return {ok, detail};
}

Outcome replay_determinism() {
    const std::string dir = PDAUDIT_SOURCE_DIR "/data/demo";
    auto manifest = RunManifest::from_file(dir + "/manifest.json");
    RunOptions options;
    options.mode = RunMode::replay;
    auto a = run_audit(manifest, options);
    options.jobs = 3;
    auto b = run_audit(manifest, options);
    if (!a.complete() || !b.complete()) return {false, "replay reported pair failures"};
    const bool same = records_jsonl(a.records) == records_jsonl(b.records) &&
                      report(a.records, TableFormat::text) == report(b.records, TableFormat::text) &&
                      report(a.records, TableFormat::csv) == report(b.records, TableFormat::csv) &&
                      memorization_report(a.records, TableFormat::text) == memorization_report(b.records, TableFormat::text);
    const auto live = a.backend_calls + b.backend_calls;
    return {same && live == 0 && a.replay_calls > 0,
            std::to_string(a.records.size()) + " records identical, " + std::to_string(a.replay_calls) +
                " replayed replies per run, " + std::to_string(live) + " live calls"};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
        {"scoring-oracle", scoring_oracle},
        {"threshold-table", threshold_table},
        {"confidence-extremes", confidence_extremes},
        {"separation", separation},
        {"prefix-pool", prefix_pool},
        {"probe-count-bound", probe_bound},
        {"matching-verdicts", matching_verdicts},
        {"precision-recall-oracle", precision_recall_oracle},
        {"memorization-harness", memorization_harness},
        {"famousness", famousness_check},
        {"service-protocol", service_protocol},
        {"replay-determinism", replay_determinism},
    };
    int failed = 0;
    for (const auto& [name, check] : checks) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
