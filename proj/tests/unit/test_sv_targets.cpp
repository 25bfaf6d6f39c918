#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "lrq/control_tasks.hpp"
#include "lrq/errors.hpp"
#include "lrq/linalg.hpp"
#include "lrq/q_learning.hpp"
#include "lrq/rank_histogram.hpp"
#include "lrq/sv_targets.hpp"
#include "lrq/svp.hpp"
#include "lrq/value_iteration.hpp"
#include "support/oracles.hpp"

using namespace lrq;

namespace {

QEvaluator table_eval(const DenseMatrix& q) {
    return [&q](std::uint32_t s, std::uint32_t a) { return q(s, a); };
}

TransitionBatch random_batch(std::size_t b, std::size_t n_states, std::size_t n_actions, std::uint32_t seed,
                             double terminal_rate = 0.0) {
    std::mt19937 gen(seed);
    std::uniform_int_distribution<std::uint32_t> state(0, static_cast<std::uint32_t>(n_states - 1));
    std::uniform_int_distribution<std::uint32_t> action(0, static_cast<std::uint32_t>(n_actions - 1));
    std::uniform_real_distribution<double> reward(-1.0, 1.0);
    std::bernoulli_distribution terminal(terminal_rate);
    TransitionBatch batch;
    for (std::size_t i = 0; i < b; ++i) batch.push_back({state(gen), action(gen), reward(gen), state(gen), terminal(gen)});
    return batch;
}

// 5-state chain: action 1 moves right, action 0 moves left; reward 1 for
// taking action 1 at the right end.
TabularMdp chain5() {
    MdpBuilder b(5, 2, 0.9);
    for (std::uint32_t s = 0; s < 5; ++s) {
        b.add_pair(0.0, {{s == 0 ? 0u : s - 1, 1.0}});
        b.add_pair(s == 4 ? 1.0 : 0.0, {{std::min<std::uint32_t>(s + 1, 4), 1.0}});
    }
    return std::move(b).build();
}

}  // namespace

TEST(SvReconstruct, FullObservationZeroLambdaIsTheTable) {
    const auto q = lrq::testing::random_dense(30, 6, 4);
    const std::vector<std::uint32_t> rows{3, 7, 7, 29, 0};
    Rng rng(1);
    const auto out = sv_reconstruct(table_eval(q), rows, 6, 1.0, SoftImputeConfig::absolute(0.0), rng);
    ASSERT_EQ(out.rows(), 5u);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t a = 0; a < 6; ++a) EXPECT_NEAR(out(i, a), q(rows[i], a), 1e-6);
}

TEST(SvReconstruct, SingleRowUsesOnlyItsObservations) {
    const DenseMatrix q{{1, 2, 3, 4}};
    const std::vector<std::uint32_t> rows{0};
    Rng rng(8);
    Rng replay(8);
    const auto mask = sample_nonempty_mask(1, 4, 0.5, replay);
    const auto out = sv_reconstruct(table_eval(q), rows, 4, 0.5, SoftImputeConfig::absolute(0.0), rng);
    ASSERT_EQ(out.rows(), 1u);
    for (const auto& c : mask) EXPECT_DOUBLE_EQ(out(0, c.col), q(0, c.col));
}

TEST(SvReconstruct, EvaluatesOnlyObservedCells) {
    const auto q = lrq::testing::random_dense(10, 8, 1);
    std::size_t calls = 0;
    const QEvaluator counting = [&](std::uint32_t s, std::uint32_t a) {
        ++calls;
        return q(s, a);
    };
    const std::vector<std::uint32_t> rows{1, 2, 3, 4};
    Rng rng(3), replay(3);
    const auto expected = sample_nonempty_mask(4, 8, 0.4, replay).size();
    sv_reconstruct(counting, rows, 8, 0.4, SoftImputeConfig{}, rng);
    EXPECT_EQ(calls, expected);
}

TEST(SvReconstruct, RankOneTableRecoveredAtThreeQuarters) {
    std::vector<double> errors;
    for (std::uint32_t seed = 0; seed < 100; ++seed) {
        const auto table = lrq::testing::random_low_rank(20, 3, 1, seed);
        std::mt19937 gen(seed);
        std::vector<std::uint32_t> rows(4);
        for (auto& r : rows) r = gen() % 20;
        Rng rng(mix_seed(seed));
        SoftImputeConfig cfg;
        cfg.max_iters = 20000;
        cfg.rel_tol = 1e-12;
        const auto est = sv_reconstruct(table_eval(table), rows, 3, 0.75, cfg, rng);
        DenseMatrix full(4, 3);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t a = 0; a < 3; ++a) full(i, a) = table(rows[i], a);
        errors.push_back(frobenius_distance(est, full) / frobenius_norm(full));
    }
    std::nth_element(errors.begin(), errors.begin() + 50, errors.end());
    EXPECT_LE(errors[50], 5e-2);
}

TEST(SvReconstruct, RejectsEmptyBatch) {
    const DenseMatrix q(2, 2);
    Rng rng(0);
    EXPECT_THROW(sv_reconstruct(table_eval(q), {}, 2, 0.5, SoftImputeConfig{}, rng), ArgumentError);
}

TEST(SvTargets, AllTerminalReturnsRewards) {
    const auto q = lrq::testing::random_dense(10, 4, 2);
    auto batch = random_batch(8, 10, 4, 5, 1.0);
    SvTargetConfig cfg;
    Rng rng(0);
    const auto y = sv_targets(batch, table_eval(q), 4, cfg, rng);
    for (std::size_t i = 0; i < batch.size(); ++i) EXPECT_EQ(y[i], batch[i].reward);
}

TEST(SvTargets, TerminalRowsNeverConsultReconstruction) {
    const auto q = lrq::testing::random_dense(10, 4, 2);
    auto batch = random_batch(16, 10, 4, 6, 0.5);
    std::vector<std::uint32_t> consulted;
    const QEvaluator spy = [&](std::uint32_t s, std::uint32_t a) {
        consulted.push_back(s);
        return q(s, a);
    };
    SvTargetConfig cfg;
    cfg.observe_prob = 1.0;
    Rng rng(0);
    const auto y = sv_targets(batch, spy, 4, cfg, rng);
    std::size_t live = 0;
    for (const auto& t : batch) live += !t.terminal;
    EXPECT_EQ(consulted.size(), live * 4);
    for (std::size_t i = 0; i < batch.size(); ++i)
        if (batch[i].terminal) EXPECT_EQ(y[i], batch[i].reward);
}

TEST(SvTargets, DegenerateConfigMatchesVanilla) {
    const auto q = lrq::testing::random_dense(50, 6, 9);
    SvTargetConfig cfg;
    cfg.observe_prob = 1.0;
    cfg.me = SoftImputeConfig::absolute(0.0);
    cfg.gamma = 0.97;
    for (std::uint32_t seed = 0; seed < 50; ++seed) {
        const auto batch = random_batch(32, 50, 6, seed, 0.1);
        Rng rng(seed);
        const auto sv = sv_targets(batch, table_eval(q), 6, cfg, rng);
        const auto vanilla = vanilla_targets(batch, table_eval(q), 6, 0.97);
        for (std::size_t i = 0; i < batch.size(); ++i) EXPECT_NEAR(sv[i], vanilla[i], 1e-6);
    }
}

TEST(SvTargets, CloseToVanillaOnConvergedToyQ) {
    const auto mdp = toy_mdp(300, 30, 0.95, 2);
    ValueIterationOptions opts;
    opts.tol_inf = 1e-8;
    const auto star = value_iteration(mdp, DenseMatrix(300, 30), opts).q;
    SvTargetConfig cfg;
    cfg.gamma = 0.95;
    double diff = 0.0, scale = 0.0;
    for (std::uint32_t seed = 0; seed < 100; ++seed) {
        const auto batch = random_batch(32, 300, 30, seed);
        Rng rng(mix_seed(seed, 3));
        const auto sv = sv_targets(batch, table_eval(star), 30, cfg, rng);
        const auto vanilla = vanilla_targets(batch, table_eval(star), 30, 0.95);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            diff += std::abs(sv[i] - vanilla[i]);
            scale += std::abs(vanilla[i]);
        }
    }
    EXPECT_LE(diff, 0.05 * scale);
}

TEST(SvTargets, ReconstructionRankNotAboveFullRank) {
    const auto table = lrq::testing::random_low_rank(40, 10, 3, 1);
    int ok = 0;
    const int trials = 100;
    for (int seed = 0; seed < trials; ++seed) {
        std::mt19937 gen(seed);
        std::vector<std::uint32_t> rows(32);
        for (auto& r : rows) r = gen() % 40;
        DenseMatrix full(32, 10);
        for (std::size_t i = 0; i < 32; ++i)
            for (std::size_t a = 0; a < 10; ++a) full(i, a) = table(rows[i], a);
        Rng rng(mix_seed(seed, 9));
        const auto est = sv_reconstruct(table_eval(table), rows, 10, 0.9, SoftImputeConfig{}, rng);
        ok += approximate_rank(est) <= approximate_rank(full);
    }
    EXPECT_GE(ok, 95);
}

TEST(SvTargets, DeterministicGivenSeed) {
    const auto q = lrq::testing::random_dense(20, 5, 3);
    const auto batch = random_batch(16, 20, 5, 1);
    SvTargetConfig cfg;
    Rng a(7), b(7);
    EXPECT_EQ(sv_targets(batch, table_eval(q), 5, cfg, a), sv_targets(batch, table_eval(q), 5, cfg, b));
}

TEST(SvTargetConfig, ScheduleSemantics) {
    SvTargetConfig cfg;
    cfg.observe_prob = 0.8;
    EXPECT_EQ(cfg.p_at(1000), 0.8);
    cfg.schedule = SvTargetConfig::quarterly_schedule(400);
    ASSERT_EQ(cfg.schedule.size(), 4u);
    EXPECT_DOUBLE_EQ(cfg.p_at(0), 0.9);
    EXPECT_DOUBLE_EQ(cfg.p_at(99), 0.9);
    EXPECT_DOUBLE_EQ(cfg.p_at(100), 0.95);
    EXPECT_DOUBLE_EQ(cfg.p_at(200), 1.0);
    EXPECT_DOUBLE_EQ(cfg.p_at(399), 1.0);
    cfg.schedule = {{0, 0.9}, {10, 0.8}};
    EXPECT_THROW(cfg.validate(), ArgumentError);
    cfg.schedule = {{0, 1.2}};
    EXPECT_THROW(cfg.validate(), ArgumentError);
}

TEST(ReplayBuffer, RingOverwriteAndUniformSampling) {
    ReplayBuffer buf(3);
    for (std::uint32_t i = 0; i < 5; ++i) buf.push({i, 0, 0.0, 0, false});
    EXPECT_EQ(buf.size(), 3u);
    Rng rng(0);
    const auto batch = buf.sample(300, rng);
    std::vector<int> counts(5, 0);
    for (const auto& t : batch) ++counts[t.state];
    EXPECT_EQ(counts[0] + counts[1], 0);
    for (int s = 2; s < 5; ++s) EXPECT_GT(counts[s], 60);
    EXPECT_THROW(ReplayBuffer(0), ArgumentError);
}

TEST(QLearning, LearnsChainOptimalPolicy) {
    const auto mdp = chain5();
    ValueIterationOptions opts;
    opts.tol_inf = 1e-10;
    const auto optimal = extract_policy(value_iteration(mdp, DenseMatrix(5, 2), opts).q);
    QLearningConfig cfg;
    cfg.episodes = 300;
    cfg.episode_length = 50;
    cfg.learning_starts = 100;
    cfg.target_sync_every = 200;
    cfg.seed = 1;
    const auto r = tabular_q_learning(mdp, cfg);
    EXPECT_EQ(extract_policy(r.q), optimal);
    EXPECT_EQ(r.episode_returns.size(), 300u);
    EXPECT_GT(r.updates, 0u);
}

TEST(QLearning, DegenerateSvTargetsReproduceVanillaUpdates) {
    const auto mdp = toy_mdp(60, 8, 0.9, 5);
    QLearningConfig cfg;
    cfg.episodes = 20;
    cfg.episode_length = 50;
    cfg.learning_starts = 64;
    cfg.target_sync_every = 100;
    cfg.seed = 12;
    const auto vanilla = tabular_q_learning(mdp, cfg);
    SvTargetConfig sv;
    sv.observe_prob = 1.0;
    sv.me = SoftImputeConfig::absolute(0.0);
    cfg.sv = sv;
    const auto degenerate = tabular_q_learning(mdp, cfg);
    EXPECT_EQ(vanilla.update_digest, degenerate.update_digest);
    EXPECT_EQ(vanilla.q, degenerate.q);
    EXPECT_EQ(vanilla.episode_returns, degenerate.episode_returns);

    sv.observe_prob = 0.9;
    sv.me = SoftImputeConfig{};
    cfg.sv = sv;
    EXPECT_NE(tabular_q_learning(mdp, cfg).update_digest, vanilla.update_digest);
}

TEST(QLearning, RejectsInvalidConfig) {
    const auto mdp = chain5();
    QLearningConfig cfg;
    cfg.alpha = 0.0;
    EXPECT_THROW(tabular_q_learning(mdp, cfg), ArgumentError);
    cfg = QLearningConfig{};
    cfg.train_every = 0;
    EXPECT_THROW(tabular_q_learning(mdp, cfg), ArgumentError);
}

TEST(RankHistogram, ConstantTableIsRankOne) {
    const DenseMatrix q(50, 6, 2.5);
    const StateSampler uniform = [](Rng& rng) { return static_cast<std::uint32_t>(rng.index(50)); };
    const auto h = rank_histogram(table_eval(q), uniform, 6, 32, 200, 1);
    EXPECT_EQ(h.counts[1], 200u);
    EXPECT_DOUBLE_EQ(h.cdf[1], 1.0);
    EXPECT_EQ(h.max_rank(), 1u);
}

TEST(RankHistogram, FactorRankBoundsEveryBatch) {
    const auto q = lrq::testing::random_low_rank(80, 10, 2, 3);
    const StateSampler uniform = [](Rng& rng) { return static_cast<std::uint32_t>(rng.index(80)); };
    const auto h = rank_histogram(table_eval(q), uniform, 10, 32, 300, 2);
    EXPECT_LE(h.max_rank(), 2u);
    EXPECT_EQ(h.repeats, 300u);
    std::size_t total = 0;
    for (auto c : h.counts) total += c;
    EXPECT_EQ(total, 300u);
    for (std::size_t k = 1; k < h.cdf.size(); ++k) EXPECT_GE(h.cdf[k], h.cdf[k - 1]);
}

TEST(RankHistogram, CsvExport) {
    const DenseMatrix q(10, 3, 1.0);
    const StateSampler uniform = [](Rng& rng) { return static_cast<std::uint32_t>(rng.index(10)); };
    const auto h = rank_histogram(table_eval(q), uniform, 3, 4, 10, 0);
    const auto path = std::filesystem::temp_directory_path() / "lrq_rank_hist.csv";
    write_rank_histogram_csv(path, h);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "rank,count,cdf");
}
