#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "pdaudit/audit_service.hpp"
#include "pdaudit/batch.hpp"

using namespace pdaudit;

int main(int argc, char** argv) {
    CLI::App app{"Discovery and study-logging service"};
    std::string manifest_path, backend_name, listen = "127.0.0.1:8080", baseline_cache, db = "study.db";
    ServiceConfig cfg;
    std::size_t k = default_counterfactual_budget;
    long long interval_ms = cfg.position_interval.count();

    app.add_option("--manifest", manifest_path, "run manifest naming the backends")
        ->required()
        ->envname("PDAUDIT_MANIFEST")
        ->check(CLI::ExistingFile);
    app.add_option("--backend", backend_name, "backend name (manifest default when empty)")->envname("PDAUDIT_BACKEND");
    app.add_option("--listen", listen, "host:port")->envname("PDAUDIT_LISTEN");
    app.add_option("--rate-limit", cfg.rate_limit, "discovery requests per minute, global")->envname("PDAUDIT_RATE_LIMIT");
    app.add_option("--queue-cap", cfg.queue_cap, "waiting requests before rejecting")->envname("PDAUDIT_QUEUE_CAP");
    app.add_option("--baseline-cache", baseline_cache, "persistent generic-subject cache")
        ->envname("PDAUDIT_BASELINE_CACHE");
    app.add_option("--db", db, "SQLite file for study logging")->envname("PDAUDIT_DB");
    app.add_option("--k", k, "counterfactual prefixes per request")->envname("PDAUDIT_K");
    app.add_option("--position-interval-ms", interval_ms, "queue position update period")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);
    cfg.position_interval = std::chrono::milliseconds(interval_ms);

    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) {
        std::cerr << "error: --listen expects host:port\n";
        return 2;
    }
    const auto host = listen.substr(0, colon);
    const int port = std::stoi(listen.substr(colon + 1));

    // handled by sigwait below, after the worker threads inherit the mask
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    try {
        auto manifest = RunManifest::from_file(manifest_path);
        const auto name = backend_name.empty() ? manifest.default_backend : backend_name;
        auto it = manifest.backends.find(name);
        if (it == manifest.backends.end()) throw InvalidArgument("manifest has no backend named '" + name + "'");
        auto backend = make_backend(it->second, manifest);
        std::unique_ptr<BaselineStore> baselines =
            baseline_cache.empty()
                ? std::make_unique<BaselineStore>()
                : std::make_unique<BaselineStore>(baseline_cache, backend.backend().capabilities().name);

        const auto& catalog = PropertyCatalog::shipped();
        AuditConfig audit;
        audit.k = k;
        audit.decoding = manifest.decoding;
        StudyStore store(db);
        AuditServer server(engine_runner(backend.backend(), *baselines, catalog, audit), store, catalog, cfg);
        const int bound = server.start(host, port);
        std::cerr << "listening on " << host << ":" << bound << " (backend " << backend.backend().capabilities().name
                  << ", " << cfg.rate_limit << " requests/min, queue cap " << cfg.queue_cap << ")\n";

        int sig = 0;
        sigwait(&signals, &sig);
        std::cerr << "shutting down\n";
        server.stop();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
