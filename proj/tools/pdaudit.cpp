#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pdaudit/batch.hpp"

namespace fs = std::filesystem;
using namespace pdaudit;

namespace {

struct Common {
    std::string manifest;
    std::string mode = "live";
    std::size_t jobs = 1;
    std::string out;
    std::optional<std::size_t> k;
    std::optional<std::uint64_t> seed;
    std::string backend;
    std::string fixture;
    std::string format = "text";
    std::string memorization = "semantic075";
};

void add_common(CLI::App* cmd, Common& c, bool with_mode) {
    cmd->add_option("--manifest", c.manifest, "run manifest (JSON)")->required()->check(CLI::ExistingFile);
    if (with_mode) cmd->add_option("--mode", c.mode, "live, record or replay")->check(CLI::IsMember({"live", "record", "replay"}));
    cmd->add_option("--jobs", c.jobs, "concurrent pairs")->check(CLI::PositiveNumber);
    cmd->add_option("--out", c.out, "output directory (manifest 'out' by default)");
    cmd->add_option("--k", c.k, "counterfactual prefixes per pair");
    cmd->add_option("--seed", c.seed, "sampling seed");
    cmd->add_option("--backend", c.backend, "backend name from the manifest");
    cmd->add_option("--fixture", c.fixture, "fixture path for record/replay");
    cmd->add_option("--format", c.format, "table format")->check(CLI::IsMember({"text", "csv"}));
    cmd->add_option("--memorization", c.memorization, "strict or semantic075")
        ->check(CLI::IsMember({"strict", "semantic075"}));
}

RunOptions options_from(const Common& c) {
    RunOptions o;
    o.mode = parse_run_mode(c.mode);
    o.jobs = c.jobs;
    o.k = c.k;
    o.seed = c.seed;
    o.backend = c.backend;
    o.fixture = c.fixture.empty() ? "" : fs::absolute(c.fixture).string();
    o.memorization_mode = c.memorization == "strict" ? MemorizationMode::strict : MemorizationMode::semantic075;
    return o;
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidArgument("cannot write " + path.string());
    f << body;
}

fs::path out_dir(const RunManifest& m, const Common& c) {
    fs::path dir = c.out.empty() ? fs::path(m.resolve(m.out)) : fs::path(c.out);
    fs::create_directories(dir);
    return dir;
}

void report_failures(const RunResult& r) {
    for (const auto& f : r.failures) std::cerr << "failed: " << f.subject << " / " << f.property_id << ": " << f.error << "\n";
}

int finish(const RunResult& r, const RunManifest& m, const Common& c, bool memorization) {
    const auto fmt = parse_format(c.format);
    const auto dir = out_dir(m, c);
    const auto ext = fmt == TableFormat::csv ? ".csv" : ".txt";
    write_file(dir / "records.jsonl", records_jsonl(r.records));
    auto summary = report(r.records, fmt);
    write_file(dir / (std::string("summary") + ext), summary);
    std::cout << summary;
    if (memorization) {
        auto mem = memorization_report(r.records, fmt, c.k.value_or(m.k));
        write_file(dir / (std::string("memorization") + ext), mem);
        std::cout << "\n" << mem;
    }
    report_failures(r);
    std::cerr << r.records.size() << " pairs audited, " << r.failures.size() << " failed, " << r.backend_calls
              << " backend calls, " << r.replay_calls << " replayed\n";
    return r.complete() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Audit which personal attributes a language model associates with a name"};
    app.require_subcommand(1);

    Common run_opts, replay_opts, sweep_opts, validate_opts;
    auto* run = app.add_subcommand("run", "audit every (subject, property) pair of a manifest");
    add_common(run, run_opts, true);
    auto* replay = app.add_subcommand("replay", "run against a recorded fixture; no network");
    add_common(replay, replay_opts, false);
    auto* sweep = app.add_subcommand("sweep-k", "memorization rate and strength across counterfactual budgets");
    add_common(sweep, sweep_opts, true);
    sweep_opts.mode = "replay";
    auto* validate = app.add_subcommand("validate", "memorization validation over the famous subjects");
    add_common(validate, validate_opts, true);

    std::string records_path, report_format = "text";
    std::optional<std::size_t> report_k;
    auto* rep = app.add_subcommand("report", "tables from a records.jsonl");
    rep->add_option("records", records_path, "records.jsonl from a run")->required()->check(CLI::ExistingFile);
    rep->add_option("--format", report_format)->check(CLI::IsMember({"text", "csv"}));
    rep->add_option("--k", report_k, "k column for the memorization table");

    std::string cohort_config, cohort_out;
    std::optional<std::uint64_t> cohort_seed;
    auto* cohort = app.add_subcommand("build-cohort", "assemble famous and synthetic subjects from client fixtures");
    cohort->add_option("--config", cohort_config, "cohort config (JSON)")->required()->check(CLI::ExistingFile);
    cohort->add_option("--out", cohort_out, "cohort manifest to write")->required();
    cohort->add_option("--seed", cohort_seed, "sampling seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed() || replay->parsed()) {
            auto& c = run->parsed() ? run_opts : replay_opts;
            if (replay->parsed()) c.mode = "replay";
            auto m = RunManifest::from_file(c.manifest);
            return finish(run_audit(m, options_from(c)), m, c, false);
        }
        if (validate->parsed()) {
            auto m = RunManifest::from_file(validate_opts.manifest);
            return finish(validate_memorization(m, options_from(validate_opts)), m, validate_opts, true);
        }
        if (sweep->parsed()) {
            auto m = RunManifest::from_file(sweep_opts.manifest);
            auto o = options_from(sweep_opts);
            auto rows = sweep_k(m, o);
            auto table = sweep_table(rows, o.memorization_mode, parse_format(sweep_opts.format));
            write_file(out_dir(m, sweep_opts) / (sweep_opts.format == "csv" ? "sweep_k.csv" : "sweep_k.txt"), table);
            std::cout << table;
            std::size_t failures = 0;
            for (const auto& r : rows) failures += r.failures;
            if (failures) std::cerr << failures << " pair runs failed across the sweep\n";
            return failures == 0 ? 0 : 1;
        }
        if (rep->parsed()) {
            auto records = read_records(records_path);
            auto fmt = parse_format(report_format);
            std::cout << report(records, fmt) << "\n" << memorization_report(records, fmt, report_k);
            return 0;
        }
        if (cohort->parsed()) {
            std::ifstream in(cohort_config);
            auto config = nlohmann::json::parse(in);
            auto built = build_cohort(config, fs::path(cohort_config).parent_path(), cohort_seed);
            write_cohort_manifest(cohort_out, built.records, built.metadata);
            for (const auto& n : built.notes) std::cerr << n << "\n";
            std::cerr << built.records.size() << " subjects written to " << cohort_out << "\n";
            return 0;
        }
    } catch (const CapabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
