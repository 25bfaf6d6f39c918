#include "lrq/experiments.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "lrq/csv.hpp"
#include "lrq/errors.hpp"
#include "lrq/rng.hpp"
#include "lrq/svp.hpp"
#include "lrq/value_iteration.hpp"

namespace lrq {

double mse(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw ArgumentError("mse: shape mismatch");
    if (a.empty()) return 0.0;
    const double d = frobenius_distance(a, b);
    return d * d / static_cast<double>(a.size());
}

Trajectory rollout(const ControlTask& task, const StateGrid& grid, const Policy& policy, std::span<const double> s0,
                   std::size_t horizon, ActionLookup lookup) {
    if (s0.size() != task.state_dim()) throw ArgumentError("rollout: initial state has wrong dimension");
    if (policy.size() != grid.n_states()) throw ArgumentError("rollout: policy size does not match grid");
    for (std::size_t d = 0; d < s0.size(); ++d) {
        if (!task.state_bounds[d].contains(s0[d])) throw ArgumentError("rollout: initial state outside bounds");
    }

    Trajectory traj;
    traj.initial_state.assign(s0.begin(), s0.end());
    traj.horizon = horizon;
    traj.steps.reserve(horizon);
    std::vector<double> x(s0.begin(), s0.end());
    std::vector<double> next(x.size());
    std::vector<Successor> corners;
    for (std::size_t t = 0; t < horizon; ++t) {
        double u;
        if (lookup == ActionLookup::Nearest) {
            u = grid.action_value(policy[grid.nearest(x)]);
        } else {
            grid.interpolate(x, corners);
            u = 0.0;
            for (const auto& c : corners) u += c.probability * grid.action_value(policy[c.state]);
        }
        const double r = task.reward(x, u);
        traj.steps.push_back({x, u, r});
        task.step(x, u, next);
        for (double v : next) {
            if (!std::isfinite(v)) throw NumericalError("rollout: non-finite state");
        }
        x.swap(next);
    }
    traj.final_state = x;
    return traj;
}

double avg_angular_deviation(std::span<const Trajectory> trajectories, std::size_t angle_dim, std::size_t burn_in) {
    if (trajectories.empty()) throw ArgumentError("avg_angular_deviation: no trajectories");
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& traj : trajectories) {
        for (std::size_t t = burn_in; t < traj.steps.size(); ++t) {
            sum += std::abs(traj.steps[t].state.at(angle_dim));
            ++count;
        }
    }
    if (count == 0) throw ArgumentError("avg_angular_deviation: no steps after burn-in");
    return sum / static_cast<double>(count) * 180.0 / std::numbers::pi;
}

TimeToGoal time_to_goal(std::span<const Trajectory> trajectories,
                        const std::function<bool(std::span<const double>)>& goal) {
    if (trajectories.empty()) throw ArgumentError("time_to_goal: no trajectories");
    TimeToGoal out;
    out.total = trajectories.size();
    double sum = 0.0;
    for (const auto& traj : trajectories) {
        std::size_t hit_at = traj.horizon;
        bool hit = false;
        for (std::size_t t = 0; t < traj.steps.size() && !hit; ++t) {
            if (goal(traj.steps[t].state)) {
                hit_at = t;
                hit = true;
            }
        }
        if (!hit && !traj.final_state.empty() && goal(traj.final_state)) {
            hit_at = traj.steps.size();
            hit = true;
        }
        if (!hit && traj.steps.empty() && goal(traj.initial_state)) {
            hit_at = 0;
            hit = true;
        }
        out.first_hit.push_back(hit_at);
        out.hit.push_back(hit);
        out.reached += hit ? 1 : 0;
        sum += static_cast<double>(hit_at);
    }
    out.mean_steps = sum / static_cast<double>(out.total);
    return out;
}

std::vector<std::vector<double>> uniform_starts(const ControlTask& task, std::size_t count, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x57));
    std::vector<std::vector<double>> starts(count, std::vector<double>(task.state_dim()));
    for (auto& s : starts) {
        for (std::size_t d = 0; d < s.size(); ++d) {
            s[d] = rng.uniform(task.state_bounds[d].lo, task.state_bounds[d].hi);
            if (task.boundary[d] == Boundary::Wrap) s[d] = wrap_into(s[d], task.state_bounds[d]);
        }
    }
    return starts;
}

EvalProtocol default_protocol(const ControlTask& task) {
    EvalProtocol p;
    if (task.angle_dim >= 0) {
        // Angle tasks are scored on the stabilised phase under the interpolated
        // policy; nearest-node lookup lets a few starts settle at off-grid
        // torque-balance points that the grid model does not contain.
        p.horizon = 200;
        p.burn_in = 50;
        p.lookup = ActionLookup::Interpolated;
    } else {
        p.horizon = 500;
    }
    return p;
}

std::function<bool(std::span<const double>)> goal_predicate(const ControlTask& task) {
    if (task.name == "mountain-car") return [](std::span<const double> x) { return x[0] >= 0.5; };
    if (task.name == "double-integrator") {
        return [](std::span<const double> x) { return std::hypot(x[0], x[1]) <= 0.05; };
    }
    return {};
}

PolicyScore score_policy(const ControlTask& task, const StateGrid& grid, const Policy& policy,
                         const EvalProtocol& protocol) {
    const auto starts = uniform_starts(task, protocol.n_starts, protocol.seed);
    std::vector<Trajectory> trajs(starts.size());
    const auto n = static_cast<std::int64_t>(starts.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        trajs[k] = rollout(task, grid, policy, starts[k], protocol.horizon, protocol.lookup);
    }

    PolicyScore score;
    score.n_starts = starts.size();
    if (task.angle_dim >= 0) {
        score.metric = "avg_angular_deviation_deg";
        score.value = avg_angular_deviation(trajs, static_cast<std::size_t>(task.angle_dim), protocol.burn_in);
    } else {
        const auto goal = goal_predicate(task);
        if (!goal) throw ArgumentError("score_policy: task '" + task.name + "' has no metric");
        const auto ttg = time_to_goal(trajs, goal);
        score.metric = "time_to_goal_steps";
        score.value = ttg.mean_steps;
        score.reached = ttg.reached;
    }
    return score;
}

LowRankStudy lowrank_policy_study(const DenseMatrix& q_star, double observe_prob, const SoftImputeConfig& me_cfg,
                                  std::uint64_t seed) {
    if (!(observe_prob > 0.0 && observe_prob <= 1.0)) throw ArgumentError("lowrank_policy_study: p must lie in (0, 1]");
    Rng rng(seed);
    const auto mask = sample_nonempty_mask(q_star.rows(), q_star.cols(), observe_prob, rng);
    ObservationSet obs(q_star.rows(), q_star.cols());
    for (const auto& c : mask) obs.push_unchecked(c.row, c.col, q_star(c.row, c.col));

    LowRankStudy study;
    study.n_observed = mask.size();
    study.reconstructed = soft_impute(obs, me_cfg, obs.row_mean_filled());
    study.optimal = extract_policy(q_star);
    study.low_rank = extract_policy(study.reconstructed);
    const double norm = frobenius_norm(q_star);
    study.relative_error = norm > 0.0 ? frobenius_distance(study.reconstructed, q_star) / norm : 0.0;
    std::size_t same = 0;
    for (std::size_t s = 0; s < study.optimal.size(); ++s) same += study.optimal[s] == study.low_rank[s] ? 1 : 0;
    study.policy_agreement = static_cast<double>(same) / static_cast<double>(study.optimal.size());
    return study;
}

void write_metric_table(const std::filesystem::path& path, std::span<const MetricRow> rows) {
    CsvWriter csv(path, {"task", "grid", "method", "p", "metric", "value", "seed_count"});
    for (const auto& r : rows) {
        csv.cell(r.task).cell(r.grid).cell(r.method).cell(r.p).cell(r.metric).cell(r.value).cell(r.seed_count);
        csv.end_row();
    }
}

void write_trajectories_csv(const std::filesystem::path& path, const ControlTask& task,
                            std::span<const Trajectory> trajectories) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "start,step";
    for (const auto& name : task.state_names) out << ',' << name;
    out << ",action,reward\n";
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const auto& traj = trajectories[i];
        for (std::size_t t = 0; t < traj.steps.size(); ++t) {
            out << i << ',' << t;
            for (double v : traj.steps[t].state) out << ',' << format_double(v);
            out << ',' << format_double(traj.steps[t].action) << ',' << format_double(traj.steps[t].reward) << '\n';
        }
    }
}

}  // namespace lrq
