#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "lrq/dense_matrix.hpp"
#include "lrq/rng.hpp"
#include "lrq/soft_impute.hpp"

namespace lrq {

/// Q-value oracle over (state, action); e.g. a target table.
using QEvaluator = std::function<double(std::uint32_t state, std::uint32_t action)>;

struct Transition {
    std::uint32_t state;
    std::uint32_t action;
    double reward;
    std::uint32_t next_state;
    bool terminal;
};

using TransitionBatch = std::vector<Transition>;

struct SvTargetConfig {
    double observe_prob = 0.9;
    SoftImputeConfig me{};
    double gamma = 0.99;
    /// (training-step threshold, p) pairs; p at step t is that of the last
    /// threshold <= t, or observe_prob before the first threshold.
    std::vector<std::pair<std::int64_t, double>> schedule;

    double p_at(std::int64_t step) const;
    void validate() const;

    /// Starts at `start`, adds `increment` at each quarter of `total_steps`, capped at 1.
    static std::vector<std::pair<std::int64_t, double>> quarterly_schedule(std::int64_t total_steps,
                                                                           double start = 0.9,
                                                                           double increment = 0.05);
};

/// Q-dagger: samples Omega over (rows x actions) with per-cell probability p, evaluates
/// q_eval on Omega only, and soft-imputes the B x n_actions matrix. One redraw on an
/// empty mask, then ArgumentError.
DenseMatrix sv_reconstruct(const QEvaluator& q_eval, std::span<const std::uint32_t> next_states,
                           std::size_t n_actions, double observe_prob, const SoftImputeConfig& me, Rng& rng);

/// y_i = r_i for terminal transitions, else r_i + gamma * max_a Q-dagger[i, a]. Terminal
/// transitions are left out of the reconstructed matrix entirely.
std::vector<double> sv_targets(const TransitionBatch& batch, const QEvaluator& q_eval, std::size_t n_actions,
                               const SvTargetConfig& cfg, Rng& rng, double observe_prob);

inline std::vector<double> sv_targets(const TransitionBatch& batch, const QEvaluator& q_eval,
                                      std::size_t n_actions, const SvTargetConfig& cfg, Rng& rng) {
    return sv_targets(batch, q_eval, n_actions, cfg, rng, cfg.observe_prob);
}

/// y_i = r_i + gamma * max_a q_eval(s'_i, a) (r_i when terminal).
std::vector<double> vanilla_targets(const TransitionBatch& batch, const QEvaluator& q_eval, std::size_t n_actions,
                                    double gamma);

}  // namespace lrq
