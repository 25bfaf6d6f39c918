#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lrq/dense_matrix.hpp"
#include "lrq/mdp.hpp"

namespace lrq {

/// max_a q(s, a) for every row.
std::vector<double> greedy_values(const DenseMatrix& q);

/// sum_{s'} P(s'|s,a) [r(s,a) + gamma * v(s')], summed in successor-list order.
inline double bellman_backup(const TabularMdp& mdp, std::span<const double> v, std::size_t s, std::size_t a) {
    const auto next = mdp.next_states(s, a);
    const auto prob = mdp.probabilities(s, a);
    const double r = mdp.reward(s, a);
    const double g = mdp.gamma();
    double acc = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) acc += prob[k] * (r + g * v[next[k]]);
    return acc;
}

/// One synchronous Bellman optimality sweep over every (s, a).
DenseMatrix vi_step(const TabularMdp& mdp, const DenseMatrix& q);

struct ValueIterationOptions {
    int max_iters = 10000;
    double tol_inf = 1e-6;
    /// When set, each trace row records MSE against this matrix.
    const DenseMatrix* reference = nullptr;
    /// Record approximate_rank(Q^t) per iteration (one SVD per sweep).
    bool track_rank = false;
    double rank_energy = 0.99;
};

struct IterationRecord {
    int iteration = 0;            // t of Q^t, starting at 1
    std::size_t n_updated = 0;    // Bellman backups evaluated in this sweep
    double delta_inf = 0.0;       // ||Q^t - Q^{t-1}||_inf
    std::optional<double> mse;    // vs reference
    std::optional<std::size_t> approx_rank;
    double wall_ms = 0.0;
};

struct ValueIterationResult {
    DenseMatrix q;
    std::vector<IterationRecord> trace;
    bool converged = false;
};

/// Iterates vi_step from q0 until ||dQ||_inf <= tol_inf or max_iters sweeps.
ValueIterationResult value_iteration(const TabularMdp& mdp, const DenseMatrix& q0,
                                     const ValueIterationOptions& opts = {});

/// Q^0 with i.i.d. uniform [0, 1) entries.
DenseMatrix random_q(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Row-wise argmax, lowest action index on ties.
Policy extract_policy(const DenseMatrix& q);

/// V(s) = r(s, pi(s)) + gamma sum P(s'|s,pi(s)) V(s'), iterated to ||dV||_inf <= tol.
std::vector<double> policy_evaluation(const TabularMdp& mdp, const Policy& pi, double tol = 1e-9,
                                      int max_iters = 1000000);

}  // namespace lrq
