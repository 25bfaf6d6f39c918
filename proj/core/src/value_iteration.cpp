#include "lrq/value_iteration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "lrq/errors.hpp"
#include "lrq/experiments.hpp"
#include "lrq/linalg.hpp"
#include "lrq/rng.hpp"

namespace lrq {

std::vector<double> greedy_values(const DenseMatrix& q) {
    std::vector<double> v(q.rows());
    for (std::size_t s = 0; s < q.rows(); ++s) {
        const auto row = q.row(s);
        v[s] = *std::max_element(row.begin(), row.end());
    }
    return v;
}

namespace {

void require_q_shape(const TabularMdp& mdp, const DenseMatrix& q, const char* what) {
    if (q.rows() != mdp.n_states() || q.cols() != mdp.n_actions()) {
        throw ArgumentError(std::string(what) + ": Q shape " + std::to_string(q.rows()) + "x" +
                            std::to_string(q.cols()) + " does not match MDP " + std::to_string(mdp.n_states()) +
                            "x" + std::to_string(mdp.n_actions()));
    }
}

}  // namespace

DenseMatrix vi_step(const TabularMdp& mdp, const DenseMatrix& q) {
    require_q_shape(mdp, q, "vi_step");
    const auto v = greedy_values(q);
    DenseMatrix out(q.rows(), q.cols());
    const auto n_states = static_cast<std::int64_t>(mdp.n_states());
    const std::size_t n_actions = mdp.n_actions();
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < n_states; ++s) {
        auto row = out.row(static_cast<std::size_t>(s));
        for (std::size_t a = 0; a < n_actions; ++a) row[a] = bellman_backup(mdp, v, static_cast<std::size_t>(s), a);
    }
    return out;
}

ValueIterationResult value_iteration(const TabularMdp& mdp, const DenseMatrix& q0, const ValueIterationOptions& opts) {
    require_q_shape(mdp, q0, "value_iteration");
    if (!(opts.tol_inf > 0.0)) throw ArgumentError("value_iteration: tol_inf must be > 0");
    if (opts.max_iters < 0) throw ArgumentError("value_iteration: max_iters must be >= 0");
    if (opts.reference) require_q_shape(mdp, *opts.reference, "value_iteration reference");

    ValueIterationResult result;
    result.q = q0;
    for (int t = 1; t <= opts.max_iters; ++t) {
        const auto start = std::chrono::steady_clock::now();
        DenseMatrix next = vi_step(mdp, result.q);
        IterationRecord rec;
        rec.iteration = t;
        rec.n_updated = mdp.n_pairs();
        rec.delta_inf = max_abs_difference(next, result.q);
        result.q = std::move(next);
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (opts.reference) rec.mse = mse(result.q, *opts.reference);
        if (opts.track_rank) rec.approx_rank = approximate_rank_or_zero(result.q, opts.rank_energy);
        result.trace.push_back(rec);
        if (rec.delta_inf <= opts.tol_inf) {
            result.converged = true;
            break;
        }
    }
    return result;
}

DenseMatrix random_q(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x51));
    DenseMatrix q(rows, cols);
    for (double& v : q.data()) v = rng.uniform();
    return q;
}

Policy extract_policy(const DenseMatrix& q) {
    Policy pi;
    pi.action.resize(q.rows());
    for (std::size_t s = 0; s < q.rows(); ++s) {
        const auto row = q.row(s);
        // max_element returns the first maximum, i.e. the lowest index on ties.
        pi.action[s] = static_cast<std::uint32_t>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return pi;
}

std::vector<double> policy_evaluation(const TabularMdp& mdp, const Policy& pi, double tol, int max_iters) {
    if (!(tol > 0.0)) throw ArgumentError("policy_evaluation: tol must be > 0");
    if (pi.size() != mdp.n_states()) throw ArgumentError("policy_evaluation: policy size does not match MDP");
    for (auto a : pi.action) {
        if (a >= mdp.n_actions()) throw ArgumentError("policy_evaluation: action index out of range");
    }

    std::vector<double> v(mdp.n_states(), 0.0);
    std::vector<double> next(mdp.n_states(), 0.0);
    const auto n_states = static_cast<std::int64_t>(mdp.n_states());
    for (int it = 0; it < max_iters; ++it) {
        double delta = 0.0;
#pragma omp parallel for schedule(static) reduction(max : delta)
        for (std::int64_t s = 0; s < n_states; ++s) {
            const auto st = static_cast<std::size_t>(s);
            next[st] = bellman_backup(mdp, v, st, pi.action[st]);
            delta = std::max(delta, std::abs(next[st] - v[st]));
        }
        v.swap(next);
        if (delta <= tol) return v;
    }
    throw NumericalError("policy_evaluation: did not reach tolerance within max_iters");
}

}  // namespace lrq
