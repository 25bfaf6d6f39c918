#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "lrq/errors.hpp"
#include "lrq/parallel.hpp"

namespace {

using namespace lrq::cli;

struct Command {
    const char* name;
    const char* help;
    void (*run)(const RunContext&);
};

constexpr Command kCommands[] = {
    {"solve", "value iteration to convergence; caches Q* for later commands", cmd_solve},
    {"svp", "structured value-based planning with partial backups and Soft-Impute", cmd_svp},
    {"rank", "approximate-rank trace of a VI/SVP run, or batch rank histogram of a Q table", cmd_rank},
    {"lowrank-study", "subsample cached Q*, reconstruct it, and compare the two policies", cmd_lowrank_study},
    {"rollout", "roll a stored policy out on the continuous task", cmd_rollout},
    {"svrl", "tabular Q-learning with SV-reconstructed targets", cmd_svrl},
};

std::filesystem::path default_out_dir(const std::string& command) {
    const char* env = std::getenv("LRQ_OUT_DIR");
    const std::filesystem::path base = env && *env ? env : "lrq_out";
    return base / command;
}

int run(int argc, char** argv) {
    CLI::App app{"Low-rank structure in Q-value matrices: planning and RL experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "lrq 0.1.0");

    ExperimentConfig cfg;
    std::map<std::string, std::vector<Parameter>> params;
    std::map<std::string, std::filesystem::path> config_files;
    for (const auto& c : kCommands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        params[c.name] = register_parameters(*sub, cfg);
        sub->add_option("--config", config_files[c.name], "JSON config file or a previous manifest.json");
        const std::string name = c.name;
        sub->preparse_callback([&cfg, name](std::size_t) { cfg.apply_command_defaults(name); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalidConfig;
    }

    const Command* chosen = nullptr;
    for (const auto& c : kCommands) {
        if (app.got_subcommand(c.name)) chosen = &c;
    }
    RunContext ctx;
    ctx.command = chosen->name;
    try {
        auto& ps = params[ctx.command];
        if (const auto& file = config_files[ctx.command]; !file.empty()) apply_config_file(file, ps);
        if (cfg.out.empty()) cfg.out = default_out_dir(ctx.command);
        cfg.validate();
        ctx.cfg = cfg;
        ctx.config_echo = echo_config(ps);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "lrq %s: invalid config: %s\n", ctx.command.c_str(), e.what());
        return kInvalidConfig;
    }

    try {
        lrq::set_num_threads(ctx.cfg.threads);
        chosen->run(ctx);
    } catch (const lrq::ArgumentError& e) {
        std::fprintf(stderr, "lrq %s: invalid config: %s\n", ctx.command.c_str(), e.what());
        return kInvalidConfig;
    } catch (const lrq::NumericalError& e) {
        std::fprintf(stderr, "lrq %s: numerical failure: %s\n", ctx.command.c_str(), e.what());
        return kNumericalFailure;
    } catch (const MissingArtifact& e) {
        std::fprintf(stderr, "lrq %s: missing artifact: %s\n", ctx.command.c_str(), e.what());
        return kMissingArtifact;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "lrq %s: error: %s\n", ctx.command.c_str(), e.what());
        return kFailure;
    }
    std::printf("%s\n", (ctx.cfg.out / "manifest.json").string().c_str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
