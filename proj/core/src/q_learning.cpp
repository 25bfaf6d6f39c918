#include "lrq/q_learning.hpp"

#include <algorithm>
#include <bit>

#include "lrq/errors.hpp"

namespace lrq {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ArgumentError("ReplayBuffer: capacity must be positive");
    items_.reserve(std::min<std::size_t>(capacity, 1 << 20));
}

void ReplayBuffer::push(const Transition& t) {
    if (items_.size() < capacity_) {
        items_.push_back(t);
    } else {
        items_[next_] = t;
    }
    next_ = (next_ + 1) % capacity_;
}

TransitionBatch ReplayBuffer::sample(std::size_t count, Rng& rng) const {
    if (items_.empty()) throw ArgumentError("ReplayBuffer::sample: buffer is empty");
    TransitionBatch batch;
    batch.reserve(count);
    for (std::size_t i = 0; i < count; ++i) batch.push_back(items_[rng.index(items_.size())]);
    return batch;
}

void QLearningConfig::validate() const {
    if (episodes < 1 || episode_length < 1) throw ArgumentError("QLearningConfig: episodes and episode_length must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("QLearningConfig: alpha must lie in (0, 1]");
    if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 && epsilon_end <= 1.0)) {
        throw ArgumentError("QLearningConfig: epsilon values must lie in [0, 1]");
    }
    if (target_sync_every < 1) throw ArgumentError("QLearningConfig: target_sync_every must be positive");
    if (train_every < 1) throw ArgumentError("QLearningConfig: train_every must be positive");
    if (batch_size < 1) throw ArgumentError("QLearningConfig: batch_size must be positive");
    if (replay_capacity < batch_size) throw ArgumentError("QLearningConfig: replay_capacity must be >= batch_size");
    if (sv) sv->validate();
}

std::uint32_t sample_successor(const TabularMdp& mdp, std::size_t s, std::size_t a, Rng& rng) {
    const auto next = mdp.next_states(s, a);
    const auto prob = mdp.probabilities(s, a);
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < next.size(); ++k) {
        acc += prob[k];
        if (u < acc) return next[k];
    }
    return next.back();
}

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (i * 8)) & 0xFFu;
        h *= kFnvPrime;
    }
    return h;
}

std::uint32_t greedy_action(const DenseMatrix& q, std::size_t s) {
    const auto row = q.row(s);
    return static_cast<std::uint32_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

}  // namespace

QLearningResult tabular_q_learning(const TabularMdp& mdp, const QLearningConfig& cfg) {
    cfg.validate();
    const std::size_t n_states = mdp.n_states();
    const std::size_t n_actions = mdp.n_actions();

    Rng act_rng(mix_seed(cfg.seed, 10));
    Rng replay_rng(mix_seed(cfg.seed, 11));
    Rng sv_rng(mix_seed(cfg.seed, 12));

    SvTargetConfig sv_cfg;
    if (cfg.sv) {
        sv_cfg = *cfg.sv;
        sv_cfg.gamma = mdp.gamma();
    }

    QLearningResult result;
    result.q = DenseMatrix(n_states, n_actions);
    result.update_digest = kFnvOffset;
    DenseMatrix target = result.q;
    const QEvaluator target_eval = [&target](std::uint32_t s, std::uint32_t a) { return target(s, a); };

    ReplayBuffer replay(cfg.replay_capacity);
    const std::int64_t total_steps = std::int64_t{cfg.episodes} * cfg.episode_length;
    const std::int64_t decay = cfg.epsilon_decay_steps > 0 ? cfg.epsilon_decay_steps : std::max<std::int64_t>(1, total_steps / 2);
    const std::size_t learning_starts = std::max(cfg.learning_starts, cfg.batch_size);

    std::int64_t step = 0;
    for (int ep = 0; ep < cfg.episodes; ++ep) {
        auto s = static_cast<std::uint32_t>(act_rng.index(n_states));
        double ret = 0.0;
        for (int k = 0; k < cfg.episode_length; ++k, ++step) {
            const double frac = std::min(1.0, static_cast<double>(step) / static_cast<double>(decay));
            const double eps = cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac;
            const std::uint32_t a = act_rng.bernoulli(eps) ? static_cast<std::uint32_t>(act_rng.index(n_actions))
                                                           : greedy_action(result.q, s);
            const std::uint32_t next = sample_successor(mdp, s, a, act_rng);
            const double r = mdp.reward(s, a);
            ret += r;
            replay.push({s, a, r, next, false});
            s = next;

            if (replay.size() >= learning_starts && (step + 1) % cfg.train_every == 0) {
                const auto batch = replay.sample(cfg.batch_size, replay_rng);
                const auto y = cfg.sv ? sv_targets(batch, target_eval, n_actions, sv_cfg, sv_rng, sv_cfg.p_at(step))
                                      : vanilla_targets(batch, target_eval, n_actions, mdp.gamma());
                for (std::size_t i = 0; i < batch.size(); ++i) {
                    double& cell = result.q(batch[i].state, batch[i].action);
                    cell += cfg.alpha * (y[i] - cell);
                    result.update_digest = fnv_mix(result.update_digest, batch[i].state);
                    result.update_digest = fnv_mix(result.update_digest, batch[i].action);
                    result.update_digest = fnv_mix(result.update_digest, std::bit_cast<std::uint64_t>(y[i]));
                }
                ++result.updates;
            }
            if ((step + 1) % cfg.target_sync_every == 0) target = result.q;
        }
        result.episode_returns.push_back(ret);
    }
    return result;
}

}  // namespace lrq
