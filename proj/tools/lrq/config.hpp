#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lrq/control_tasks.hpp"
#include "lrq/soft_impute.hpp"

namespace CLI {
class App;
class Option;
}  // namespace CLI

namespace lrq::cli {

using Json = nlohmann::ordered_json;

/// Exit codes shared by every command.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kInvalidConfig = 2,
    kNumericalFailure = 3,
    kMissingArtifact = 4,
};

/// A file another command must produce first (cached Q*, policy CSV, Q table).
class MissingArtifact : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every tunable of every command. Field names mirror the config-file keys.
struct ExperimentConfig {
    // Problem
    std::string task = "pendulum";
    std::string grid;            // "NxM[x...]"; empty means the task default
    std::size_t actions = 0;     // 0 means the task default
    double gamma = 0.95;
    std::size_t toy_states = 1000;
    std::uint64_t seed = 0;
    int threads = 0;
    std::filesystem::path out;
    std::filesystem::path cache_dir;  // empty means <out>/../cache

    // Value iteration
    double vi_tol = 1e-6;
    int vi_max_iters = 10000;

    // SVP and matrix estimation
    double p = -1.0;       // negative means the command default
    int iters = 100;
    double lambda = -1.0;  // negative means the command default
    std::string lambda_scale = "relative";  // relative (x sigma_1) or absolute
    int me_iters = 100;
    double me_tol = 1e-4;
    double max_mse = -1.0;  // svp: compare final MSE with cached Q* when >= 0

    // Rank analysis
    std::string rank_mode = "trace";  // trace or histogram
    std::filesystem::path q_file;     // histogram source; empty means cached Q*
    std::size_t batch = 32;
    std::size_t repeats = 10000;

    // Rollouts
    std::filesystem::path policy_file;
    std::size_t starts = 100;
    std::size_t horizon = 0;  // 0 means the task default
    std::string lookup;       // nearest or interpolated; empty means the task default

    // SV-RL harness
    int episodes = 200;
    int episode_length = 200;
    double alpha = 0.1;
    std::int64_t target_sync = 1000;
    std::int64_t train_every = 4;
    std::size_t learning_starts = 1000;
    bool compare_vanilla = false;

    bool is_toy() const { return task == "toy"; }
    ControlTask control_task() const;
    GridSpec grid_spec() const;
    SoftImputeConfig me_config() const;
    std::filesystem::path resolved_cache_dir() const;
    /// Short label such as "20x20x100" (toy: "1000x100").
    std::string shape_label() const;
    /// Fills p and lambda left unset (negative) with the defaults of `command`.
    void apply_command_defaults(const std::string& command);
    /// Throws ArgumentError when a value is outside its documented range.
    void validate() const;
};

/// Binds one config field to a command-line flag and a config-file key.
struct Parameter {
    std::string key;
    CLI::Option* option = nullptr;
    std::function<void(const Json&)> load;
    std::function<Json()> save;
};

/// Declares every parameter on `app`; values are written into `cfg`.
std::vector<Parameter> register_parameters(CLI::App& app, ExperimentConfig& cfg);

/// Fills `cfg` from a JSON config file (or a previous run manifest), skipping
/// keys whose flag was given explicitly. Unknown keys are rejected.
void apply_config_file(const std::filesystem::path& path, std::vector<Parameter>& params);

/// Every parameter as a flat JSON object, in registration order.
Json echo_config(const std::vector<Parameter>& params);

}  // namespace lrq::cli
