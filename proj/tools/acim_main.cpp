#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "acim/artifacts.hpp"
#include "acim/config.hpp"
#include "acim/replicate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

int run_with_config(const std::string& command, const std::string& config_path,
                    const std::string& out_override, long long seed_override, bool seed_set) {
    acim::ExperimentConfig cfg;
    try {
        cfg = acim::load_config_file(config_path);
        if (seed_set) {
            cfg.seed = static_cast<uint64_t>(seed_override);
            cfg.seed_present = true;
            cfg.raw["seed"] = cfg.seed;
        }
        if (!out_override.empty()) cfg.out_dir = out_override;
        acim::validate_for_command(cfg, command);
    } catch (const acim::Error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        return acim::run_command(cfg, command) == 0 ? kExitOk : kExitNumeric;
    } catch (const acim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == acim::ErrorCode::BadConfig ? kExitConfig : kExitNumeric;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"invariant-density toolkit for piecewise-expanding maps with neutral fixed points"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    long long seed_override = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* copt = sub->add_option("--config", config_path, "JSON experiment configuration");
        if (config_required) copt->required();
        sub->add_option("--out", out_dir, "output directory override");
        sub->add_option("--seed", seed_override, "seed override")->each([&](const std::string&) {
            seed_set = true;
        });
    };

    const char* commands[] = {"classify", "density", "induce-stats", "asymptotics", "seminorm",
                              "audit"};
    for (const char* name : commands) add_common(app.add_subcommand(name), true);
    auto* rep = app.add_subcommand("replicate-paper", "run the full replication suite");
    add_common(rep, false);

    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    std::string command = sub->get_name();

    if (command == "replicate-paper") {
        uint64_t seed = seed_set ? static_cast<uint64_t>(seed_override) : 20240614ULL;
        std::string dir = out_dir.empty() ? "out" : out_dir;
        if (!config_path.empty()) {
            try {
                acim::ExperimentConfig cfg = acim::load_config_file(config_path);
                if (cfg.seed_present && !seed_set) seed = cfg.seed;
                if (out_dir.empty() && !cfg.out_dir.empty()) dir = cfg.out_dir;
            } catch (const std::exception& e) {
                std::cerr << "configuration error: " << e.what() << "\n";
                return kExitConfig;
            }
        }
        try {
            acim::ReplicateSummary summary = acim::replicate_paper(dir, seed);
            acim::print_summary(summary, std::cout);
            return summary.all_passed() ? kExitOk : kExitNumeric;
        } catch (const acim::Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitNumeric;
        }
    }
    return run_with_config(command, config_path, out_dir, seed_override, seed_set);
}
