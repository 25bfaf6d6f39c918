#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "lrq/control_tasks.hpp"
#include "lrq/csv.hpp"
#include "lrq/errors.hpp"
#include "lrq/experiments.hpp"
#include "lrq/value_iteration.hpp"

using namespace lrq;

namespace {

Trajectory constant_angle(double theta, std::size_t steps) {
    Trajectory t;
    t.initial_state = {theta, 0.0};
    t.horizon = steps;
    for (std::size_t i = 0; i < steps; ++i) t.steps.push_back({{theta, 0.0}, 0.0, 0.0});
    t.final_state = {theta, 0.0};
    return t;
}

Trajectory scalar_path(const std::vector<double>& xs) {
    Trajectory t;
    t.initial_state = {xs.front(), 0.0};
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) t.steps.push_back({{xs[i], 0.0}, 0.0, 0.0});
    t.final_state = {xs.back(), 0.0};
    t.horizon = xs.size() - 1;
    return t;
}

struct SolvedPendulum {
    ControlTask task = pendulum_task();
    GridSpec spec{{20, 20}, 100};
    DenseMatrix q;
    Policy policy;
};

const SolvedPendulum& solved_pendulum() {
    static const SolvedPendulum p = [] {
        SolvedPendulum s;
        s.q = value_iteration(discretize(s.task, s.spec, 0.95), DenseMatrix(400, 100)).q;
        s.policy = extract_policy(s.q);
        return s;
    }();
    return p;
}

}  // namespace

TEST(Mse, Examples) {
    EXPECT_EQ(mse(DenseMatrix{{1, 2}}, DenseMatrix{{1, 2}}), 0.0);
    EXPECT_EQ(mse(DenseMatrix(2, 2, 1.0), DenseMatrix(2, 2)), 1.0);
    EXPECT_THROW(mse(DenseMatrix(2, 2), DenseMatrix(2, 3)), ArgumentError);
}

TEST(AngularDeviation, Examples) {
    const std::vector<Trajectory> zero{constant_angle(0.0, 10)};
    EXPECT_EQ(avg_angular_deviation(zero), 0.0);
    const std::vector<Trajectory> tenth{constant_angle(0.1, 10), constant_angle(-0.1, 5)};
    EXPECT_NEAR(avg_angular_deviation(tenth), 5.729577951308232, 1e-12);
    EXPECT_THROW(avg_angular_deviation(std::vector<Trajectory>{}), ArgumentError);
}

TEST(AngularDeviation, BurnInSkipsEarlySteps) {
    Trajectory t = constant_angle(0.0, 10);
    t.steps[0].state[0] = 1.0;
    t.steps[1].state[0] = -1.0;
    const std::vector<Trajectory> ts{t};
    EXPECT_GT(avg_angular_deviation(ts), 0.0);
    EXPECT_EQ(avg_angular_deviation(ts, 0, 2), 0.0);
}

TEST(TimeToGoal, StartInsideAndNeverReach) {
    const auto goal = [](std::span<const double> x) { return x[0] >= 1.0; };
    const std::vector<Trajectory> inside{scalar_path({1.0, 0.0, 0.0})};
    const auto a = time_to_goal(inside, goal);
    EXPECT_EQ(a.mean_steps, 0.0);
    EXPECT_EQ(a.reached, 1u);

    const std::vector<Trajectory> never{scalar_path({0.0, 0.1, 0.2, 0.3})};
    const auto b = time_to_goal(never, goal);
    EXPECT_EQ(b.mean_steps, 3.0);
    EXPECT_EQ(b.reached, 0u);
    EXPECT_FALSE(b.hit[0]);

    const std::vector<Trajectory> mixed{scalar_path({0.0, 0.5, 1.0, 1.0}), scalar_path({0.0, 0.0, 0.0, 0.0})};
    const auto c = time_to_goal(mixed, goal);
    EXPECT_EQ(c.first_hit[0], 2u);
    EXPECT_EQ(c.mean_steps, 2.5);
}

TEST(TimeToGoal, LongerHorizonNeverLowersHitRate) {
    const auto task = mountain_car_task();
    const GridSpec spec{{25, 25}, 3};
    const StateGrid grid(task, spec);
    const auto policy = extract_policy(value_iteration(discretize(task, spec), DenseMatrix(625, 3)).q);
    const auto starts = uniform_starts(task, 10, 3);
    std::size_t prev = 0;
    for (std::size_t horizon : {20u, 60u, 150u, 400u}) {
        std::vector<Trajectory> ts;
        for (const auto& s0 : starts) ts.push_back(rollout(task, grid, policy, s0, horizon));
        const auto r = time_to_goal(ts, goal_predicate(task));
        EXPECT_GE(r.reached, prev);
        prev = r.reached;
    }
}

TEST(Rollout, ZeroHorizonIsEmpty) {
    const auto task = double_integrator_task();
    const StateGrid grid(task, GridSpec{{5, 5}, 3});
    const Policy pi{std::vector<std::uint32_t>(25, 1)};
    const auto t = rollout(task, grid, pi, std::vector<double>{1.0, 0.0}, 0);
    EXPECT_TRUE(t.steps.empty());
    EXPECT_EQ(t.final_state, (std::vector<double>{1.0, 0.0}));
}

TEST(Rollout, DoubleIntegratorStaysAtOrigin) {
    const auto task = double_integrator_task();
    const StateGrid grid(task, GridSpec{{5, 5}, 3});  // action 1 is u = 0
    const Policy pi{std::vector<std::uint32_t>(25, 1)};
    const auto t = rollout(task, grid, pi, std::vector<double>{0.0, 0.0}, 50);
    ASSERT_EQ(t.steps.size(), 50u);
    for (const auto& s : t.steps) {
        EXPECT_EQ(s.state[0], 0.0);
        EXPECT_EQ(s.state[1], 0.0);
        EXPECT_EQ(s.action, 0.0);
    }
}

TEST(Rollout, RejectsOutOfBoundsStartAndWrongPolicySize) {
    const auto task = double_integrator_task();
    const StateGrid grid(task, GridSpec{{5, 5}, 3});
    const Policy pi{std::vector<std::uint32_t>(25, 1)};
    EXPECT_THROW(rollout(task, grid, pi, std::vector<double>{4.0, 0.0}, 5), ArgumentError);
    EXPECT_THROW(rollout(task, grid, Policy{{0}}, std::vector<double>{0.0, 0.0}, 5), ArgumentError);
}

TEST(Rollout, OptimalPendulumHoldsUprightFromRest) {
    // A 20-point angle grid has 18 degree cells; the policy must keep the pole
    // within one cell of upright.
    const auto& p = solved_pendulum();
    const StateGrid grid(p.task, p.spec);
    for (auto lookup : {ActionLookup::Nearest, ActionLookup::Interpolated}) {
        const auto t = rollout(p.task, grid, p.policy, std::vector<double>{0.0, 0.0}, 200, lookup);
        for (std::size_t i = 1; i < t.steps.size(); ++i) {
            EXPECT_LE(std::abs(t.steps[i].state[0]) * 180.0 / std::numbers::pi, 18.0) << "step " << i;
        }
    }
}

TEST(Rollout, Deterministic) {
    const auto& p = solved_pendulum();
    const StateGrid grid(p.task, p.spec);
    const std::vector<double> s0{1.0, -2.0};
    const auto a = rollout(p.task, grid, p.policy, s0, 100, ActionLookup::Interpolated);
    const auto b = rollout(p.task, grid, p.policy, s0, 100, ActionLookup::Interpolated);
    ASSERT_EQ(a.steps.size(), b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) EXPECT_EQ(a.steps[i].state, b.steps[i].state);
}

TEST(UniformStarts, InsideBoxAndSeeded) {
    const auto task = cartpole_task();
    const auto a = uniform_starts(task, 50, 4);
    const auto b = uniform_starts(task, 50, 4);
    EXPECT_EQ(a, b);
    for (const auto& s : a)
        for (std::size_t d = 0; d < 4; ++d) EXPECT_TRUE(task.state_bounds[d].contains(s[d]));
}

TEST(DefaultProtocol, HorizonsByTask) {
    EXPECT_EQ(default_protocol(pendulum_task()).horizon, 200u);
    EXPECT_EQ(default_protocol(cartpole_task()).horizon, 200u);
    EXPECT_EQ(default_protocol(mountain_car_task()).horizon, 500u);
    EXPECT_EQ(default_protocol(double_integrator_task()).horizon, 500u);
    EXPECT_EQ(default_protocol(pendulum_task()).n_starts, 100u);
}

TEST(LowRankStudy, FullObservationZeroLambdaKeepsPolicy) {
    const auto& p = solved_pendulum();
    const auto study = lowrank_policy_study(p.q, 1.0, SoftImputeConfig::absolute(0.0), 0);
    EXPECT_EQ(study.low_rank, study.optimal);
    EXPECT_EQ(study.policy_agreement, 1.0);
    EXPECT_EQ(study.n_observed, p.q.size());
}

TEST(LowRankStudy, PendulumHalfObservationStaysCloseToOptimal) {
    const auto& p = solved_pendulum();
    const StateGrid grid(p.task, p.spec);
    const auto protocol = default_protocol(p.task);
    SoftImputeConfig cfg;
    cfg.lambda = 1e-3;
    double optimal = 0.0, low_rank = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto study = lowrank_policy_study(p.q, 0.5, cfg, seed);
        optimal += score_policy(p.task, grid, study.optimal, protocol).value / 5.0;
        low_rank += score_policy(p.task, grid, study.low_rank, protocol).value / 5.0;
    }
    EXPECT_LE(std::abs(low_rank - optimal), 1.0);
}

TEST(LowRankStudy, MountainCarHalfObservationTimeToGoal) {
    const auto task = mountain_car_task();
    const GridSpec spec{{30, 30}, 10};
    const StateGrid grid(task, spec);
    const auto q = value_iteration(discretize(task, spec), DenseMatrix(900, 10)).q;
    const auto protocol = default_protocol(task);
    SoftImputeConfig cfg;
    cfg.lambda = 1e-3;
    double optimal = 0.0, low_rank = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto study = lowrank_policy_study(q, 0.5, cfg, seed);
        const auto a = score_policy(task, grid, study.optimal, protocol);
        EXPECT_EQ(a.metric, "time_to_goal_steps");
        optimal += a.value / 5.0;
        low_rank += score_policy(task, grid, study.low_rank, protocol).value / 5.0;
    }
    EXPECT_LE(std::abs(low_rank - optimal), 0.15 * optimal);
}

TEST(MetricTable, CsvHeaderAndLocaleFreeNumbers) {
    const auto path = std::filesystem::temp_directory_path() / "lrq_metrics.csv";
    const std::vector<MetricRow> rows{{"pendulum", "20x20x100", "svp", 0.2, "avg_angular_deviation_deg", 1.25, 1}};
    write_metric_table(path, rows);
    std::ifstream in(path);
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);
    EXPECT_EQ(header, "task,grid,method,p,metric,value,seed_count");
    EXPECT_EQ(line, "pendulum,20x20x100,svp,0.2,avg_angular_deviation_deg,1.25,1");
}

TEST(Csv, FormatAndSplit) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(-2.5e-7), "-2.5e-07");
    EXPECT_EQ(split_csv_line("a,b,,c"), (std::vector<std::string>{"a", "b", "", "c"}));
}
