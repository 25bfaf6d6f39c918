#include "lrq/sv_targets.hpp"

#include <algorithm>
#include <cmath>

#include "lrq/errors.hpp"
#include "lrq/svp.hpp"

namespace lrq {

double SvTargetConfig::p_at(std::int64_t step) const {
    double p = observe_prob;
    for (const auto& [threshold, value] : schedule) {
        if (step >= threshold) p = value;
    }
    return p;
}

void SvTargetConfig::validate() const {
    if (!(observe_prob > 0.0 && observe_prob <= 1.0)) throw ArgumentError("SvTargetConfig: observe_prob must lie in (0, 1]");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ArgumentError("SvTargetConfig: gamma must lie in [0, 1]");
    double prev = 0.0;
    for (const auto& [threshold, value] : schedule) {
        (void)threshold;
        if (!(value > 0.0 && value <= 1.0)) throw ArgumentError("SvTargetConfig: schedule p must lie in (0, 1]");
        if (value < prev) throw ArgumentError("SvTargetConfig: schedule p must be non-decreasing");
        prev = value;
    }
    me.validate();
}

std::vector<std::pair<std::int64_t, double>> SvTargetConfig::quarterly_schedule(std::int64_t total_steps, double start,
                                                                                 double increment) {
    std::vector<std::pair<std::int64_t, double>> out;
    for (int q = 0; q < 4; ++q) out.emplace_back(total_steps * q / 4, std::min(1.0, start + increment * q));
    return out;
}

DenseMatrix sv_reconstruct(const QEvaluator& q_eval, std::span<const std::uint32_t> next_states,
                           std::size_t n_actions, double observe_prob, const SoftImputeConfig& me, Rng& rng) {
    if (next_states.empty()) throw ArgumentError("sv_reconstruct: batch is empty");
    if (n_actions == 0) throw ArgumentError("sv_reconstruct: n_actions must be positive");
    if (!(observe_prob > 0.0 && observe_prob <= 1.0)) throw ArgumentError("sv_reconstruct: p must lie in (0, 1]");

    const auto mask = sample_nonempty_mask(next_states.size(), n_actions, observe_prob, rng);
    ObservationSet obs(next_states.size(), n_actions);
    for (const auto& c : mask) obs.push_unchecked(c.row, c.col, q_eval(next_states[c.row], c.col));
    return soft_impute(obs, me);
}

std::vector<double> sv_targets(const TransitionBatch& batch, const QEvaluator& q_eval, std::size_t n_actions,
                               const SvTargetConfig& cfg, Rng& rng, double observe_prob) {
    if (batch.empty()) throw ArgumentError("sv_targets: batch is empty");
    std::vector<double> y(batch.size());
    std::vector<std::uint32_t> rows;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (batch[i].terminal) {
            y[i] = batch[i].reward;
        } else {
            rows.push_back(batch[i].next_state);
            where.push_back(i);
        }
    }
    if (rows.empty()) return y;

    const DenseMatrix q_dagger = sv_reconstruct(q_eval, rows, n_actions, observe_prob, cfg.me, rng);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto row = q_dagger.row(k);
        const double best = *std::max_element(row.begin(), row.end());
        y[where[k]] = batch[where[k]].reward + cfg.gamma * best;
    }
    return y;
}

std::vector<double> vanilla_targets(const TransitionBatch& batch, const QEvaluator& q_eval, std::size_t n_actions,
                                    double gamma) {
    std::vector<double> y(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& t = batch[i];
        if (t.terminal) {
            y[i] = t.reward;
            continue;
        }
        double best = q_eval(t.next_state, 0);
        for (std::uint32_t a = 1; a < n_actions; ++a) best = std::max(best, q_eval(t.next_state, a));
        y[i] = t.reward + gamma * best;
    }
    return y;
}

}  // namespace lrq
