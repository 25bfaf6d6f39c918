#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lrq/dense_matrix.hpp"

namespace lrq {

struct Observation {
    std::uint32_t row;
    std::uint32_t col;
    double value;
};

/// Observed entries of an n x m matrix. Positions are unique and in range.
class ObservationSet {
public:
    ObservationSet(std::size_t rows, std::size_t cols);
    /// Validates every entry; throws ArgumentError on out-of-range or duplicate positions.
    ObservationSet(std::size_t rows, std::size_t cols, std::vector<Observation> entries);

    /// All entries of `m`.
    static ObservationSet full(const DenseMatrix& m);

    /// Appends without the duplicate check; callers that build from a
    /// sampled mask already guarantee uniqueness.
    void push_unchecked(std::uint32_t row, std::uint32_t col, double value) {
        entries_.push_back({row, col, value});
    }
    void add(std::uint32_t row, std::uint32_t col, double value);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<Observation>& entries() const noexcept { return entries_; }

    /// Observed values at their positions, zeros elsewhere.
    DenseMatrix zero_filled() const;
    /// Every cell set to the mean of its row's observed entries; rows with no
    /// observation take the global observed mean. A Soft-Impute warm start that
    /// keeps per-row offsets instead of shrinking them towards zero.
    DenseMatrix row_mean_filled() const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Observation> entries_;
};

/// How SoftImputeConfig::lambda is interpreted.
enum class LambdaScale {
    Absolute,          // lambda is used as given
    TopSingularValue,  // lambda * sigma_1(zero-filled observations)
};

struct SoftImputeConfig {
    double lambda = 0.01;
    LambdaScale scale = LambdaScale::TopSingularValue;
    int max_iters = 100;
    double rel_tol = 1e-4;

    static SoftImputeConfig absolute(double lambda, int max_iters = 100, double rel_tol = 1e-4) {
        return {lambda, LambdaScale::Absolute, max_iters, rel_tol};
    }

    void validate() const;
};

struct SoftImputeResult {
    DenseMatrix estimate;
    double lambda = 0.0;  // resolved absolute lambda
    int iterations = 0;
    bool converged = false;
    /// Objective 0.5*sum_Omega (M - X)^2 + lambda*||M||_* at the warm start
    /// followed by each iterate. Only filled when tracing was requested.
    std::vector<double> objective;
};

/// lambda actually used for `obs` under `cfg`.
double resolve_lambda(const ObservationSet& obs, const SoftImputeConfig& cfg);

/// Penalised least-squares objective of `m` against the observations.
double soft_impute_objective(const ObservationSet& obs, const DenseMatrix& m, double lambda);

/// Soft-Impute: M <- svt(P_Omega(X) + P_Omega^perp(M), lambda) until the relative
/// Frobenius change drops to rel_tol or max_iters is hit. Unobserved cells start
/// from `warm_start` (zeros when absent).
DenseMatrix soft_impute(const ObservationSet& obs, const SoftImputeConfig& cfg,
                        const std::optional<DenseMatrix>& warm_start = std::nullopt);

SoftImputeResult soft_impute_detailed(const ObservationSet& obs, const SoftImputeConfig& cfg,
                                      const std::optional<DenseMatrix>& warm_start = std::nullopt,
                                      bool trace_objective = false);

}  // namespace lrq
