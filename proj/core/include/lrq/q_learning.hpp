#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lrq/dense_matrix.hpp"
#include "lrq/mdp.hpp"
#include "lrq/rng.hpp"
#include "lrq/sv_targets.hpp"

namespace lrq {

/// Fixed-capacity ring buffer of transitions with uniform sampling.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(const Transition& t);
    /// `count` transitions drawn uniformly with replacement.
    TransitionBatch sample(std::size_t count, Rng& rng) const;

    std::size_t size() const noexcept { return items_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }

private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<Transition> items_;
};

struct QLearningConfig {
    int episodes = 200;
    int episode_length = 200;
    double alpha = 0.1;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    /// Linear decay length in environment steps; 0 means half of all steps.
    std::int64_t epsilon_decay_steps = 0;
    std::int64_t target_sync_every = 1000;
    /// One batch update every `train_every` environment steps (DQN convention: 4).
    std::int64_t train_every = 4;
    std::size_t batch_size = 32;
    std::size_t replay_capacity = 50000;
    /// Updates start once the buffer holds this many transitions (at least batch_size).
    std::size_t learning_starts = 1000;
    std::uint64_t seed = 0;
    /// When set, update targets are formed by sv_targets with the target table as evaluator.
    std::optional<SvTargetConfig> sv;

    void validate() const;
};

struct QLearningResult {
    DenseMatrix q;
    std::vector<double> episode_returns;  // undiscounted reward sum per episode
    std::uint64_t updates = 0;
    /// FNV-1a digest over (state, action, target bits) of every table update in order.
    std::uint64_t update_digest = 0;
};

/// Tabular Q-learning on a known MDP used as a simulator: epsilon-greedy acting,
/// uniform replay, a target table synced every target_sync_every steps.
/// Acting, replay sampling, and SV masks use independent seeded streams.
QLearningResult tabular_q_learning(const TabularMdp& mdp, const QLearningConfig& cfg);

/// Samples s' ~ P(.|s, a).
std::uint32_t sample_successor(const TabularMdp& mdp, std::size_t s, std::size_t a, Rng& rng);

}  // namespace lrq
