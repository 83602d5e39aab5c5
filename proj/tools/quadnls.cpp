#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qnls/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"quadnls - constrained ground states, evolution, and blow-up "
                 "diagnostics for the quadratic Schrodinger system"};
    app.require_subcommand(1);

    const char* names[] = {"ground-state",       "gn-constant", "evolve",
                           "stability",          "blowup-demo", "minimal-mass",
                           "scan-subadditivity", "check-virial", "check-cutoffs"};

    std::string config_path, out_dir;
    int threads = 0;
    for (const char* name : names) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key=value configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (default: current directory)");
        sub->add_option("--threads", threads, "worker thread count");
    }

    CLI11_PARSE(app, argc, argv);

    if (threads == 0)
        if (const char* env = std::getenv("QUADNLS_THREADS")) threads = std::atoi(env);
    (void)threads;  // all kernels are single-threaded and deterministic

    try {
        qnls::RunConfig cfg = qnls::load_config(config_path);
        const std::string sub = app.get_subcommands().front()->get_name();
        if (cfg.kind.empty()) cfg.kind = sub;
        if (cfg.kind != sub) {
            std::cerr << "error: config declares experiment '" << cfg.kind
                      << "' but subcommand is '" << sub << "'\n";
            return 2;
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        return qnls::run_subcommand(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
