#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lrq/dense_matrix.hpp"
#include "lrq/mdp.hpp"
#include "lrq/rng.hpp"
#include "lrq/soft_impute.hpp"
#include "lrq/value_iteration.hpp"

namespace lrq {

struct Cell {
    std::uint32_t row;
    std::uint32_t col;
    bool operator==(const Cell&) const = default;
};

/// Each cell of an n x m grid kept independently with probability p, row-major order.
std::vector<Cell> sample_mask(std::size_t n_rows, std::size_t n_cols, double p, Rng& rng);

/// Draws a mask, redrawing once if it comes back empty. Throws ArgumentError
/// if the second draw is empty too.
std::vector<Cell> sample_nonempty_mask(std::size_t n_rows, std::size_t n_cols, double p, Rng& rng);

struct SvpConfig {
    double observe_prob = 0.2;
    int n_iterations = 100;
    /// Light shrinkage: with a warm start the per-iteration bias accumulates
    /// over the planning horizon, so SVP wants a much smaller lambda than a
    /// one-shot completion.
    SoftImputeConfig me{1e-6, LambdaScale::TopSingularValue, 100, 1e-4};
    std::uint64_t seed = 0;
    bool track_rank = true;
    double rank_energy = 0.99;

    void validate() const;
};

struct SvpStep {
    DenseMatrix q;
    std::size_t n_observed = 0;
    int me_iterations = 0;
};

/// One SVP iteration: Bellman backups on a Bernoulli(p) subset of (s, a), then
/// Soft-Impute warm-started at q_t to fill in the rest.
SvpStep svp_iterate_detailed(const TabularMdp& mdp, const DenseMatrix& q_t, double p, const SoftImputeConfig& me_cfg,
                             Rng& rng);

inline DenseMatrix svp_iterate(const TabularMdp& mdp, const DenseMatrix& q_t, double p,
                               const SoftImputeConfig& me_cfg, Rng& rng) {
    return svp_iterate_detailed(mdp, q_t, p, me_cfg, rng).q;
}

struct SvpResult {
    DenseMatrix q;
    Policy policy;
    std::vector<IterationRecord> trace;
};

/// n_iterations SVP sweeps from Q^0 = 0. Trace rows carry |Omega| in n_updated.
SvpResult svp_plan(const TabularMdp& mdp, const SvpConfig& cfg, const DenseMatrix* reference_q = nullptr);

/// CSV columns: iteration,n_observed,approx_rank,mse_vs_reference,wall_ms
void write_trace_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& trace);

}  // namespace lrq
