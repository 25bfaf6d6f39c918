#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "lrq/errors.hpp"

namespace lrq::cli {

namespace {

std::vector<std::size_t> parse_grid(const std::string& text) {
    std::vector<std::size_t> dims;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find('x', start), text.size());
        std::size_t value = 0;
        const auto* first = text.data() + start;
        const auto* last = text.data() + end;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (first == last || ec != std::errc{} || ptr != last) {
            throw ArgumentError("grid must look like 20x20, got '" + text + "'");
        }
        dims.push_back(value);
        start = end + 1;
    }
    return dims;
}

std::vector<std::size_t> default_grid(const std::string& task) {
    if (task == "cartpole") return {10, 10, 10, 10};
    return {20, 20};
}

std::size_t default_actions(const std::string& task) { return task == "cartpole" ? 10 : 100; }

template <typename T>
Parameter bind_option(CLI::App& app, const std::string& key, const std::string& flag, T& field, const std::string& help) {
    Parameter p;
    p.key = key;
    p.option = app.add_option(flag, field, help);
    p.load = [&field, key](const Json& j) {
        try {
            field = j.get<T>();
        } catch (const Json::exception&) {
            throw ArgumentError("config key '" + key + "' has the wrong type");
        }
    };
    p.save = [&field] { return Json(field); };
    return p;
}

Parameter bind_path(CLI::App& app, const std::string& key, const std::string& flag, std::filesystem::path& field,
                    const std::string& help) {
    Parameter p;
    p.key = key;
    p.option = app.add_option(flag, field, help);
    p.load = [&field, key](const Json& j) {
        if (!j.is_string()) throw ArgumentError("config key '" + key + "' must be a string");
        field = j.get<std::string>();
    };
    p.save = [&field] { return Json(field.generic_string()); };
    return p;
}

}  // namespace

ControlTask ExperimentConfig::control_task() const { return task_by_name(task); }

GridSpec ExperimentConfig::grid_spec() const {
    GridSpec spec;
    spec.points_per_dim = grid.empty() ? default_grid(task) : parse_grid(grid);
    spec.n_actions = actions == 0 ? default_actions(task) : actions;
    return spec;
}

SoftImputeConfig ExperimentConfig::me_config() const {
    return {lambda, lambda_scale == "absolute" ? LambdaScale::Absolute : LambdaScale::TopSingularValue, me_iters,
            me_tol};
}

std::filesystem::path ExperimentConfig::resolved_cache_dir() const {
    if (!cache_dir.empty()) return cache_dir;
    return out.parent_path() / "cache";
}

std::string ExperimentConfig::shape_label() const {
    const auto spec = grid_spec();
    if (is_toy()) return std::to_string(toy_states) + "x" + std::to_string(spec.n_actions);
    std::string label;
    for (auto d : spec.points_per_dim) label += std::to_string(d) + "x";
    return label + std::to_string(spec.n_actions);
}

void ExperimentConfig::apply_command_defaults(const std::string& command) {
    if (p < 0.0) {
        if (command == "svp") p = 0.2;
        else if (command == "lowrank-study") p = 0.5;
        else if (command == "svrl") p = 0.9;
        else p = 1.0;
    }
    if (lambda < 0.0) {
        // SVP warm-starts every sweep, so shrinkage bias accumulates and wants a
        // tiny lambda; one-shot completions tolerate more.
        if (command == "svp" || command == "rank") lambda = 1e-6;
        else if (command == "lowrank-study") lambda = 1e-3;
        else lambda = SoftImputeConfig{}.lambda;
    }
}

void ExperimentConfig::validate() const {
    const auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ArgumentError(what);
    };
    require(task == "toy" || task == "pendulum" || task == "mountain-car" || task == "double-integrator" ||
                task == "cartpole",
            "task must be one of pendulum, mountain-car, double-integrator, cartpole, toy; got '" + task + "'");
    require(gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0, 1)");
    const auto spec = grid_spec();
    if (is_toy()) {
        require(toy_states >= 1, "toy-states must be positive");
        require(spec.n_actions >= 1, "actions must be positive");
    } else {
        require(spec.points_per_dim.size() == control_task().state_bounds.size(),
                "grid for " + task + " needs " + std::to_string(control_task().state_bounds.size()) + " dimensions");
        for (auto d : spec.points_per_dim) require(d >= 2, "every grid dimension needs at least 2 points");
        require(spec.n_actions >= 2, "actions must be at least 2 for a control task");
    }
    require(threads >= 0, "threads must be >= 0 (0 = auto)");
    require(!out.empty(), "output directory is empty; pass --out or set LRQ_OUT_DIR");
    require(vi_tol > 0.0, "vi-tol must be > 0");
    require(vi_max_iters >= 1, "vi-max-iters must be positive");
    require(p > 0.0 && p <= 1.0, "p must lie in (0, 1]");
    require(iters >= 1, "iters must be positive");
    require(lambda >= 0.0, "lambda must be >= 0");
    require(lambda_scale == "relative" || lambda_scale == "absolute", "lambda-scale must be relative or absolute");
    require(me_iters >= 1, "me-iters must be positive");
    require(me_tol > 0.0, "me-tol must be > 0");
    require(rank_mode == "trace" || rank_mode == "histogram", "mode must be trace or histogram");
    require(batch >= 1, "batch must be positive");
    require(repeats >= 1, "repeats must be positive");
    require(starts >= 1, "starts must be positive");
    require(lookup.empty() || lookup == "nearest" || lookup == "interpolated",
            "lookup must be nearest or interpolated");
    require(episodes >= 1, "episodes must be positive");
    require(episode_length >= 1, "episode-length must be positive");
    require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
    require(target_sync >= 1, "target-sync must be positive");
    require(train_every >= 1, "train-every must be positive");
}

std::vector<Parameter> register_parameters(CLI::App& app, ExperimentConfig& cfg) {
    std::vector<Parameter> ps;
    ps.push_back(bind_option(app, "task", "--task", cfg.task, "pendulum, mountain-car, double-integrator, cartpole or toy"));
    ps.push_back(bind_option(app, "grid", "--grid", cfg.grid, "state grid points per dimension, e.g. 20x20"));
    ps.push_back(bind_option(app, "actions", "--actions", cfg.actions, "number of discretized actions"));
    ps.push_back(bind_option(app, "gamma", "--gamma", cfg.gamma, "discount factor in [0, 1)"));
    ps.push_back(bind_option(app, "toy_states", "--toy-states", cfg.toy_states, "number of states of the toy MDP"));
    ps.push_back(bind_option(app, "seed", "--seed", cfg.seed, "master seed"));
    ps.push_back(bind_option(app, "threads", "--threads", cfg.threads, "cap on internal parallelism (0 = auto)"));
    ps.push_back(bind_path(app, "out", "--out", cfg.out, "output directory (default: $LRQ_OUT_DIR/<command>)"));
    ps.push_back(bind_path(app, "cache_dir", "--cache-dir", cfg.cache_dir, "MDP and Q* cache (default: <out>/../cache)"));
    ps.push_back(bind_option(app, "vi_tol", "--vi-tol", cfg.vi_tol, "value iteration stops when ||dQ||_inf <= tol"));
    ps.push_back(bind_option(app, "vi_max_iters", "--vi-max-iters", cfg.vi_max_iters, "value iteration sweep cap"));
    ps.push_back(bind_option(app, "p", "--p", cfg.p, "observation probability in (0, 1] (default depends on the command)"));
    ps.push_back(bind_option(app, "iters", "--iters", cfg.iters, "SVP iterations"));
    ps.push_back(bind_option(app, "lambda", "--lambda", cfg.lambda, "Soft-Impute shrinkage (default depends on the command)"));
    ps.push_back(bind_option(app, "lambda_scale", "--lambda-scale", cfg.lambda_scale,
                      "relative (lambda x top singular value) or absolute"));
    ps.push_back(bind_option(app, "me_iters", "--me-iters", cfg.me_iters, "Soft-Impute iteration cap"));
    ps.push_back(bind_option(app, "me_tol", "--me-tol", cfg.me_tol, "Soft-Impute relative-change tolerance"));
    ps.push_back(bind_option(app, "max_mse", "--max-mse", cfg.max_mse, "svp: check final MSE against cached Q*"));
    ps.push_back(bind_option(app, "mode", "--mode", cfg.rank_mode, "rank: trace or histogram"));
    ps.push_back(bind_path(app, "q_file", "--q", cfg.q_file, "rank histogram source Q table (default: cached Q*)"));
    ps.push_back(bind_option(app, "batch", "--batch", cfg.batch, "rank histogram batch size"));
    ps.push_back(bind_option(app, "repeats", "--repeats", cfg.repeats, "rank histogram repeats"));
    ps.push_back(bind_path(app, "policy", "--policy", cfg.policy_file, "policy CSV for rollouts"));
    ps.push_back(bind_option(app, "starts", "--starts", cfg.starts, "number of uniform initial states"));
    ps.push_back(bind_option(app, "horizon", "--horizon", cfg.horizon, "rollout steps (0 = task default)"));
    ps.push_back(bind_option(app, "lookup", "--lookup", cfg.lookup, "off-grid action lookup: nearest or interpolated"));
    ps.push_back(bind_option(app, "episodes", "--episodes", cfg.episodes, "Q-learning episodes"));
    ps.push_back(bind_option(app, "episode_length", "--episode-length", cfg.episode_length, "Q-learning steps per episode"));
    ps.push_back(bind_option(app, "alpha", "--alpha", cfg.alpha, "Q-learning step size"));
    ps.push_back(bind_option(app, "target_sync", "--target-sync", cfg.target_sync, "steps between target-table syncs"));
    ps.push_back(bind_option(app, "train_every", "--train-every", cfg.train_every, "environment steps per update"));
    ps.push_back(bind_option(app, "learning_starts", "--learning-starts", cfg.learning_starts,
                      "replay size before updates begin"));
    {
        Parameter p;
        p.key = "compare_vanilla";
        p.option = app.add_flag("--compare-vanilla", cfg.compare_vanilla, "svrl: also run vanilla targets");
        p.load = [&cfg](const Json& j) {
            if (!j.is_boolean()) throw ArgumentError("config key 'compare_vanilla' must be a boolean");
            cfg.compare_vanilla = j.get<bool>();
        };
        p.save = [&cfg] { return Json(cfg.compare_vanilla); };
        ps.push_back(std::move(p));
    }
    return ps;
}

void apply_config_file(const std::filesystem::path& path, std::vector<Parameter>& params) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open config file " + path.string());
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ArgumentError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    // A run manifest carries its parameters under "config".
    if (doc.is_object() && doc.contains("config") && doc["config"].is_object()) doc = doc["config"];
    if (!doc.is_object()) throw ArgumentError("config file " + path.string() + " must hold a JSON object");
    for (const auto& [key, value] : doc.items()) {
        auto it = std::find_if(params.begin(), params.end(), [&](const Parameter& p) { return p.key == key; });
        if (it == params.end()) throw ArgumentError("unknown config key '" + key + "'");
        if (it->option->count() > 0) continue;  // flags win
        it->load(value);
    }
}

Json echo_config(const std::vector<Parameter>& params) {
    Json j = Json::object();
    for (const auto& p : params) j[p.key] = p.save();
    return j;
}

}  // namespace lrq::cli
