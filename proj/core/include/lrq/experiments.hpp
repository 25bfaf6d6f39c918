#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lrq/control_tasks.hpp"
#include "lrq/dense_matrix.hpp"
#include "lrq/mdp.hpp"
#include "lrq/soft_impute.hpp"

namespace lrq {

/// Mean squared entry difference; shapes must match.
double mse(const DenseMatrix& a, const DenseMatrix& b);

struct TrajectoryStep {
    std::vector<double> state;  // state before the action
    double action;
    double reward;
};

struct Trajectory {
    std::vector<double> initial_state;
    std::vector<TrajectoryStep> steps;
    std::vector<double> final_state;  // state after the last step
    std::size_t horizon = 0;
};

/// How a grid policy picks the action at an off-grid state.
enum class ActionLookup {
    Nearest,       // action of the nearest grid node
    Interpolated,  // multilinear blend of the enclosing nodes' action values
};

/// Runs the continuous dynamics for `horizon` steps under a grid policy. Deterministic.
Trajectory rollout(const ControlTask& task, const StateGrid& grid, const Policy& policy, std::span<const double> s0,
                   std::size_t horizon, ActionLookup lookup = ActionLookup::Nearest);

/// Mean |angle| in degrees over all trajectories and steps at index >= burn_in.
double avg_angular_deviation(std::span<const Trajectory> trajectories, std::size_t angle_dim = 0,
                             std::size_t burn_in = 0);

struct TimeToGoal {
    double mean_steps = 0.0;  // unreached trajectories count as their horizon
    std::size_t reached = 0;
    std::size_t total = 0;
    std::vector<std::size_t> first_hit;  // horizon when never reached
    std::vector<bool> hit;
};

/// First step index whose state satisfies `goal` (the initial state is step 0,
/// the final state step `horizon`).
TimeToGoal time_to_goal(std::span<const Trajectory> trajectories,
                        const std::function<bool(std::span<const double>)>& goal);

/// `count` states drawn uniformly from the task's state box.
std::vector<std::vector<double>> uniform_starts(const ControlTask& task, std::size_t count, std::uint64_t seed);

struct EvalProtocol {
    std::size_t n_starts = 100;
    std::size_t horizon = 200;
    std::size_t burn_in = 0;
    std::uint64_t seed = 0;
    ActionLookup lookup = ActionLookup::Nearest;
};

/// 100 uniform starts. Angle tasks: horizon 200, burn-in 50, interpolated action lookup.
/// Goal tasks: horizon 500, nearest-node lookup.
EvalProtocol default_protocol(const ControlTask& task);

/// Goal predicate for goal-reaching tasks (mountain car: x >= 0.5; double
/// integrator: ||(x, x_dot)|| <= 0.05). Empty for angle tasks.
std::function<bool(std::span<const double>)> goal_predicate(const ControlTask& task);

struct PolicyScore {
    std::string metric;  // "avg_angular_deviation_deg" or "time_to_goal_steps"
    double value = 0.0;
    std::size_t reached = 0;  // goal tasks only
    std::size_t n_starts = 0;
};

/// The task's performance metric for `policy` under `protocol`.
PolicyScore score_policy(const ControlTask& task, const StateGrid& grid, const Policy& policy,
                         const EvalProtocol& protocol);

struct LowRankStudy {
    DenseMatrix reconstructed;
    Policy optimal;
    Policy low_rank;
    std::size_t n_observed = 0;
    double relative_error = 0.0;    // ||Q_hat - Q*||_F / ||Q*||_F
    double policy_agreement = 0.0;  // fraction of states with identical actions
};

/// Masks q_star with probability p, soft-imputes (warm-started at the observed
/// row means), and extracts the greedy policy.
LowRankStudy lowrank_policy_study(const DenseMatrix& q_star, double observe_prob, const SoftImputeConfig& me_cfg,
                                  std::uint64_t seed);

struct MetricRow {
    std::string task;
    std::string grid;
    std::string method;
    double p = 1.0;
    std::string metric;
    double value = 0.0;
    std::size_t seed_count = 1;
};

/// CSV columns: task,grid,method,p,metric,value,seed_count
void write_metric_table(const std::filesystem::path& path, std::span<const MetricRow> rows);

/// Steps: start,step,<state names...>,action,reward
void write_trajectories_csv(const std::filesystem::path& path, const ControlTask& task,
                            std::span<const Trajectory> trajectories);

}  // namespace lrq
