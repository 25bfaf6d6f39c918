#include "lrq/svp.hpp"

#include <chrono>
#include <cmath>

#include "lrq/csv.hpp"
#include "lrq/errors.hpp"
#include "lrq/experiments.hpp"
#include "lrq/linalg.hpp"

namespace lrq {

std::vector<Cell> sample_mask(std::size_t n_rows, std::size_t n_cols, double p, Rng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("sample_mask: p must lie in [0, 1]");
    std::vector<Cell> cells;
    cells.reserve(static_cast<std::size_t>(std::ceil(p * static_cast<double>(n_rows * n_cols))) + 16);
    for (std::uint32_t r = 0; r < n_rows; ++r) {
        for (std::uint32_t c = 0; c < n_cols; ++c) {
            if (rng.bernoulli(p)) cells.push_back({r, c});
        }
    }
    return cells;
}

std::vector<Cell> sample_nonempty_mask(std::size_t n_rows, std::size_t n_cols, double p, Rng& rng) {
    auto mask = sample_mask(n_rows, n_cols, p, rng);
    if (mask.empty()) mask = sample_mask(n_rows, n_cols, p, rng);
    if (mask.empty()) throw ArgumentError("observation mask empty after resampling (p too small)");
    return mask;
}

void SvpConfig::validate() const {
    if (!(observe_prob > 0.0 && observe_prob <= 1.0)) throw ArgumentError("SvpConfig: observe_prob must lie in (0, 1]");
    if (n_iterations < 1) throw ArgumentError("SvpConfig: n_iterations must be positive");
    me.validate();
}

SvpStep svp_iterate_detailed(const TabularMdp& mdp, const DenseMatrix& q_t, double p, const SoftImputeConfig& me_cfg,
                             Rng& rng) {
    if (q_t.rows() != mdp.n_states() || q_t.cols() != mdp.n_actions()) {
        throw ArgumentError("svp_iterate: Q shape does not match MDP");
    }
    if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("svp_iterate: p must lie in (0, 1]");

    // Mask drawn before any parallel work so results do not depend on scheduling.
    const auto mask = sample_nonempty_mask(mdp.n_states(), mdp.n_actions(), p, rng);
    const auto v = greedy_values(q_t);

    std::vector<Observation> entries(mask.size());
    const auto n = static_cast<std::int64_t>(mask.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto& c = mask[static_cast<std::size_t>(i)];
        entries[static_cast<std::size_t>(i)] = {c.row, c.col, bellman_backup(mdp, v, c.row, c.col)};
    }

    ObservationSet obs(mdp.n_states(), mdp.n_actions());
    for (const auto& e : entries) obs.push_unchecked(e.row, e.col, e.value);

    auto me = soft_impute_detailed(obs, me_cfg, q_t);
    return {std::move(me.estimate), mask.size(), me.iterations};
}

SvpResult svp_plan(const TabularMdp& mdp, const SvpConfig& cfg, const DenseMatrix* reference_q) {
    cfg.validate();
    if (reference_q && (reference_q->rows() != mdp.n_states() || reference_q->cols() != mdp.n_actions())) {
        throw ArgumentError("svp_plan: reference Q shape does not match MDP");
    }
    Rng rng(cfg.seed);
    SvpResult result;
    result.q = DenseMatrix(mdp.n_states(), mdp.n_actions());
    result.trace.reserve(static_cast<std::size_t>(cfg.n_iterations));

    for (int t = 1; t <= cfg.n_iterations; ++t) {
        const auto start = std::chrono::steady_clock::now();
        auto step = svp_iterate_detailed(mdp, result.q, cfg.observe_prob, cfg.me, rng);
        IterationRecord rec;
        rec.iteration = t;
        rec.n_updated = step.n_observed;
        rec.delta_inf = max_abs_difference(step.q, result.q);
        result.q = std::move(step.q);
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (reference_q) rec.mse = mse(result.q, *reference_q);
        if (cfg.track_rank) rec.approx_rank = approximate_rank_or_zero(result.q, cfg.rank_energy);
        result.trace.push_back(rec);
    }
    result.policy = extract_policy(result.q);
    return result;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& trace) {
    CsvWriter csv(path, {"iteration", "n_observed", "approx_rank", "mse_vs_reference", "wall_ms"});
    for (const auto& r : trace) {
        csv.cell(r.iteration).cell(r.n_updated).cell(r.approx_rank).cell(r.mse).cell(r.wall_ms);
        csv.end_row();
    }
}

}  // namespace lrq
