#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>

#include "lrq/csv.hpp"
#include "lrq/errors.hpp"
#include "lrq/experiments.hpp"
#include "lrq/linalg.hpp"
#include "lrq/mdp_io.hpp"
#include "lrq/q_learning.hpp"
#include "lrq/rank_histogram.hpp"
#include "lrq/svp.hpp"
#include "lrq/value_iteration.hpp"

namespace lrq::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kManifestVersion = 1;

/// The MDP a command runs on, plus the grid when it came from a control task.
struct Problem {
    TabularMdp mdp;
    std::optional<ControlTask> task;
    std::optional<StateGrid> grid;
};

/// Cache entries are keyed by everything that determines the MDP and by the file format version.
std::string cache_key(const ExperimentConfig& cfg) {
    std::string key = cfg.task + "-" + cfg.shape_label() + "-g" + format_double(cfg.gamma);
    if (cfg.is_toy()) key += "-s" + std::to_string(cfg.seed);
    return key + "-v" + std::to_string(kMdpFormatVersion);
}

fs::path cached_mdp_path(const ExperimentConfig& cfg) { return cfg.resolved_cache_dir() / (cache_key(cfg) + ".mdp"); }

fs::path cached_qstar_path(const ExperimentConfig& cfg) {
    return cfg.resolved_cache_dir() / (cache_key(cfg) + ".qstar.bin");
}

Problem load_problem(const ExperimentConfig& cfg) {
    Problem problem{[&] {
        const auto path = cached_mdp_path(cfg);
        if (fs::exists(path)) return load_mdp(path);
        TabularMdp mdp = cfg.is_toy() ? toy_mdp(cfg.toy_states, cfg.grid_spec().n_actions, cfg.gamma, cfg.seed)
                                      : discretize(cfg.control_task(), cfg.grid_spec(), cfg.gamma);
        fs::create_directories(path.parent_path());
        save_mdp(path, mdp);
        return mdp;
    }(), std::nullopt, std::nullopt};
    if (!cfg.is_toy()) {
        problem.task = cfg.control_task();
        problem.grid.emplace(*problem.task, cfg.grid_spec());
    }
    return problem;
}

DenseMatrix load_cached_qstar(const ExperimentConfig& cfg) {
    const auto path = cached_qstar_path(cfg);
    if (!fs::exists(path)) {
        throw MissingArtifact("no cached Q* at " + path.string() + "; run `lrq solve` with the same --task, --grid, "
                              "--actions, --gamma (and --seed for toy) first");
    }
    return load_matrix(path);
}

std::optional<DenseMatrix> try_cached_qstar(const ExperimentConfig& cfg) {
    const auto path = cached_qstar_path(cfg);
    if (!fs::exists(path)) return std::nullopt;
    return load_matrix(path);
}

EvalProtocol protocol_for(const ExperimentConfig& cfg, const ControlTask& task) {
    auto protocol = default_protocol(task);
    protocol.n_starts = cfg.starts;
    protocol.seed = cfg.seed;
    if (cfg.horizon > 0) protocol.horizon = cfg.horizon;
    if (cfg.lookup == "nearest") protocol.lookup = ActionLookup::Nearest;
    if (cfg.lookup == "interpolated") protocol.lookup = ActionLookup::Interpolated;
    if (protocol.burn_in >= protocol.horizon) protocol.burn_in = 0;
    return protocol;
}

/// The task's performance metric: rollout score for control tasks, mean exact
/// policy value for the toy MDP.
Json policy_metric(const Problem& problem, const ExperimentConfig& cfg, const Policy& pi) {
    Json j;
    if (problem.task) {
        const auto score = score_policy(*problem.task, *problem.grid, pi, protocol_for(cfg, *problem.task));
        j["metric"] = score.metric;
        j["value"] = score.value;
        j["n_starts"] = score.n_starts;
        if (score.metric == "time_to_goal_steps") j["reached"] = score.reached;
    } else {
        const auto v = policy_evaluation(problem.mdp, pi);
        j["metric"] = "mean_policy_value";
        j["value"] = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    }
    return j;
}

std::string hex64(std::uint64_t x) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(x));
    return buf;
}

/// Collects outputs and results; writes manifest.json when finished.
class Run {
public:
    explicit Run(const RunContext& ctx) : ctx_(ctx), start_(std::chrono::steady_clock::now()) {
        fs::create_directories(ctx.cfg.out);
    }

    fs::path output(const std::string& name) {
        outputs_.push_back(name);
        return ctx_.cfg.out / name;
    }

    Json& results() { return results_; }

    void finish() {
        Json m;
        m["format"] = "lrq-manifest";
        m["version"] = kManifestVersion;
        m["command"] = ctx_.command;
        m["seed"] = ctx_.cfg.seed;
        m["config"] = ctx_.config_echo;
        m["outputs"] = outputs_;
        m["results"] = results_;
        m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::ofstream out(ctx_.cfg.out / "manifest.json", std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write manifest in " + ctx_.cfg.out.string());
        out << m.dump(2) << '\n';
    }

private:
    const RunContext& ctx_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> outputs_;
    Json results_ = Json::object();
};

void write_returns_csv(const fs::path& path, const std::vector<std::pair<std::string, const QLearningResult*>>& runs) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "episode";
    for (const auto& [name, _] : runs) out << ',' << name << "_return";
    out << '\n';
    const std::size_t n = runs.front().second->episode_returns.size();
    for (std::size_t e = 0; e < n; ++e) {
        out << e;
        for (const auto& [_, r] : runs) out << ',' << format_double(r->episode_returns[e]);
        out << '\n';
    }
}

double mean_greedy_value(const TabularMdp& mdp, const DenseMatrix& q) {
    const auto v = policy_evaluation(mdp, extract_policy(q));
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

void cmd_solve(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    Run run(ctx);
    const auto problem = load_problem(cfg);
    ValueIterationOptions opts;
    opts.tol_inf = cfg.vi_tol;
    opts.max_iters = cfg.vi_max_iters;
    const auto vi = value_iteration(problem.mdp, DenseMatrix(problem.mdp.n_states(), problem.mdp.n_actions()), opts);
    const auto policy = extract_policy(vi.q);

    save_matrix(run.output("q.bin"), vi.q);
    save_policy_csv(run.output("policy.csv"), policy);
    write_trace_csv(run.output("trace.csv"), vi.trace);
    const auto qstar = cached_qstar_path(cfg);
    fs::create_directories(qstar.parent_path());
    save_matrix(qstar, vi.q);

    auto& r = run.results();
    r["sweeps"] = vi.trace.size();
    r["converged"] = vi.converged;
    r["approx_rank"] = approximate_rank_or_zero(vi.q);
    r["policy_metric"] = policy_metric(problem, cfg, policy);
    r["cached_qstar"] = qstar.generic_string();
    run.finish();
}

void cmd_svp(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    Run run(ctx);
    const auto problem = load_problem(cfg);
    const auto reference = cfg.max_mse >= 0.0 ? std::optional(load_cached_qstar(cfg)) : try_cached_qstar(cfg);

    SvpConfig svp;
    svp.observe_prob = cfg.p;
    svp.n_iterations = cfg.iters;
    svp.me = cfg.me_config();
    svp.seed = cfg.seed;
    const auto result = svp_plan(problem.mdp, svp, reference ? &*reference : nullptr);

    save_matrix(run.output("q.bin"), result.q);
    save_policy_csv(run.output("policy.csv"), result.policy);
    write_trace_csv(run.output("trace.csv"), result.trace);

    std::size_t backups = 0;
    for (const auto& rec : result.trace) backups += rec.n_updated;
    auto& r = run.results();
    r["iterations"] = result.trace.size();
    r["total_backups"] = backups;
    r["backup_fraction"] = static_cast<double>(backups) /
                           (static_cast<double>(problem.mdp.n_pairs()) * static_cast<double>(result.trace.size()));
    r["approx_rank"] = approximate_rank_or_zero(result.q);
    if (reference) {
        const double final_mse = mse(result.q, *reference);
        r["final_mse"] = final_mse;
        if (cfg.max_mse >= 0.0) r["mse_within_threshold"] = final_mse <= cfg.max_mse;
    }
    r["policy_metric"] = policy_metric(problem, cfg, result.policy);
    run.finish();
}

void cmd_rank(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    Run run(ctx);
    auto& r = run.results();
    if (cfg.rank_mode == "trace") {
        const auto problem = load_problem(cfg);
        const auto reference = try_cached_qstar(cfg);
        std::vector<IterationRecord> trace;
        DenseMatrix q;
        if (cfg.p >= 1.0) {  // full observation: exact sweeps
            ValueIterationOptions opts;
            opts.max_iters = cfg.iters;
            opts.tol_inf = cfg.vi_tol;
            opts.track_rank = true;
            opts.reference = reference ? &*reference : nullptr;
            auto vi = value_iteration(problem.mdp, DenseMatrix(problem.mdp.n_states(), problem.mdp.n_actions()), opts);
            trace = std::move(vi.trace);
            q = std::move(vi.q);
            r["method"] = "value_iteration";
        } else {
            SvpConfig svp;
            svp.observe_prob = cfg.p;
            svp.n_iterations = cfg.iters;
            svp.me = cfg.me_config();
            svp.seed = cfg.seed;
            auto result = svp_plan(problem.mdp, svp, reference ? &*reference : nullptr);
            trace = std::move(result.trace);
            q = std::move(result.q);
            r["method"] = "svp";
        }
        write_trace_csv(run.output("rank_trace.csv"), trace);
        r["iterations"] = trace.size();
        r["final_approx_rank"] = approximate_rank_or_zero(q);
    } else {
        const auto q = cfg.q_file.empty() ? load_cached_qstar(cfg) : [&] {
            if (!fs::exists(cfg.q_file)) throw MissingArtifact("Q table " + cfg.q_file.string() + " does not exist");
            return load_matrix(cfg.q_file);
        }();
        const auto n_states = q.rows();
        const auto eval = [&q](std::uint32_t s, std::uint32_t a) { return q(s, a); };
        const auto sampler = [n_states](Rng& rng) { return static_cast<std::uint32_t>(rng.index(n_states)); };
        const auto h = rank_histogram(eval, sampler, q.cols(), cfg.batch, cfg.repeats, cfg.seed);
        write_rank_histogram_csv(run.output("rank_histogram.csv"), h);
        r["repeats"] = h.repeats;
        r["max_batch_rank"] = h.max_rank();
        r["full_matrix_approx_rank"] = approximate_rank_or_zero(q);
    }
    run.finish();
}

void cmd_lowrank_study(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    const auto qstar = load_cached_qstar(cfg);
    Run run(ctx);
    const auto problem = load_problem(cfg);
    if (qstar.rows() != problem.mdp.n_states() || qstar.cols() != problem.mdp.n_actions()) {
        throw FormatError("cached Q* shape does not match the problem");
    }
    const auto study = lowrank_policy_study(qstar, cfg.p, cfg.me_config(), cfg.seed);
    const auto optimal = policy_metric(problem, cfg, study.optimal);
    const auto low_rank = policy_metric(problem, cfg, study.low_rank);

    const std::vector<MetricRow> rows{
        {cfg.task, cfg.shape_label(), "optimal", 1.0, optimal["metric"], optimal["value"], 1},
        {cfg.task, cfg.shape_label(), "low_rank", cfg.p, low_rank["metric"], low_rank["value"], 1},
    };
    write_metric_table(run.output("comparison.csv"), rows);
    save_policy_csv(run.output("policy_low_rank.csv"), study.low_rank);

    auto& r = run.results();
    r["n_observed"] = study.n_observed;
    r["relative_error"] = study.relative_error;
    r["policy_agreement"] = study.policy_agreement;
    r["reconstructed_approx_rank"] = approximate_rank_or_zero(study.reconstructed);
    r["optimal"] = optimal;
    r["low_rank"] = low_rank;
    run.finish();
}

void cmd_rollout(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    if (cfg.is_toy()) throw ArgumentError("rollout needs a control task; the toy MDP has no continuous dynamics");
    if (cfg.policy_file.empty()) throw ArgumentError("rollout needs --policy <policy.csv>");
    if (!fs::exists(cfg.policy_file)) {
        throw MissingArtifact("policy file " + cfg.policy_file.string() + " does not exist; run solve or svp first");
    }
    const auto policy = load_policy_csv(cfg.policy_file);
    const auto task = cfg.control_task();
    const StateGrid grid(task, cfg.grid_spec());
    if (policy.size() != grid.n_states()) {
        throw ArgumentError("policy has " + std::to_string(policy.size()) + " states but the grid has " +
                            std::to_string(grid.n_states()));
    }
    for (auto a : policy.action) {
        if (a >= grid.n_actions()) throw ArgumentError("policy action index exceeds --actions");
    }

    Run run(ctx);
    const auto protocol = protocol_for(cfg, task);
    std::vector<Trajectory> trajectories;
    for (const auto& s0 : uniform_starts(task, protocol.n_starts, protocol.seed)) {
        trajectories.push_back(rollout(task, grid, policy, s0, protocol.horizon, protocol.lookup));
    }
    write_trajectories_csv(run.output("trajectories.csv"), task, trajectories);

    auto& r = run.results();
    r["n_starts"] = trajectories.size();
    r["horizon"] = protocol.horizon;
    if (task.angle_dim >= 0) {
        r["metric"] = "avg_angular_deviation_deg";
        r["value"] = avg_angular_deviation(trajectories, static_cast<std::size_t>(task.angle_dim), protocol.burn_in);
    } else {
        const auto t = time_to_goal(trajectories, goal_predicate(task));
        r["metric"] = "time_to_goal_steps";
        r["value"] = t.mean_steps;
        r["reached"] = t.reached;
    }
    run.finish();
}

void cmd_svrl(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    Run run(ctx);
    const auto problem = load_problem(cfg);

    QLearningConfig ql;
    ql.episodes = cfg.episodes;
    ql.episode_length = cfg.episode_length;
    ql.alpha = cfg.alpha;
    ql.target_sync_every = cfg.target_sync;
    ql.train_every = cfg.train_every;
    ql.learning_starts = cfg.learning_starts;
    ql.seed = cfg.seed;

    std::optional<QLearningResult> vanilla;
    if (cfg.compare_vanilla) vanilla = tabular_q_learning(problem.mdp, ql);

    SvTargetConfig sv;
    sv.observe_prob = cfg.p;
    sv.me = cfg.me_config();
    sv.gamma = problem.mdp.gamma();
    ql.sv = sv;
    const auto with_sv = tabular_q_learning(problem.mdp, ql);

    std::vector<std::pair<std::string, const QLearningResult*>> runs{{"sv", &with_sv}};
    if (vanilla) runs.emplace_back("vanilla", &*vanilla);
    write_returns_csv(run.output("returns.csv"), runs);
    save_matrix(run.output("q_sv.bin"), with_sv.q);
    if (vanilla) save_matrix(run.output("q_vanilla.bin"), vanilla->q);

    auto& r = run.results();
    for (const auto& [name, res] : runs) {
        Json j;
        j["updates"] = res->updates;
        j["update_digest"] = hex64(res->update_digest);
        j["mean_greedy_value"] = mean_greedy_value(problem.mdp, res->q);
        j["approx_rank"] = approximate_rank_or_zero(res->q);
        r[name] = j;
    }
    if (vanilla) {
        const double v = r["vanilla"]["mean_greedy_value"], s = r["sv"]["mean_greedy_value"];
        r["relative_difference"] = v != 0.0 ? std::abs(s - v) / std::abs(v) : std::abs(s - v);
    }
    run.finish();
}

}  // namespace lrq::cli
