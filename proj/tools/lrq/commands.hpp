#pragma once

#include <string>

#include "config.hpp"

namespace lrq::cli {

/// Everything a command needs: the resolved config and its JSON echo for the manifest.
struct RunContext {
    std::string command;
    ExperimentConfig cfg;
    Json config_echo;
};

void cmd_solve(const RunContext& run);
void cmd_svp(const RunContext& run);
void cmd_rank(const RunContext& run);
void cmd_lowrank_study(const RunContext& run);
void cmd_rollout(const RunContext& run);
void cmd_svrl(const RunContext& run);

}  // namespace lrq::cli
