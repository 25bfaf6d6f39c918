#include "lrq/soft_impute.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lrq/errors.hpp"
#include "lrq/linalg.hpp"

namespace lrq {

ObservationSet::ObservationSet(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) throw ArgumentError("ObservationSet: shape must be positive");
    if (rows > std::numeric_limits<std::uint32_t>::max() || cols > std::numeric_limits<std::uint32_t>::max()) {
        throw ArgumentError("ObservationSet: shape exceeds 32-bit indices");
    }
}

ObservationSet::ObservationSet(std::size_t rows, std::size_t cols, std::vector<Observation> entries)
    : ObservationSet(rows, cols) {
    std::vector<bool> seen(rows * cols, false);
    for (const auto& e : entries) {
        if (e.row >= rows || e.col >= cols) {
            throw ArgumentError("ObservationSet: position (" + std::to_string(e.row) + ", " +
                                std::to_string(e.col) + ") outside shape");
        }
        if (!std::isfinite(e.value)) throw ArgumentError("ObservationSet: non-finite value");
        const std::size_t flat = std::size_t{e.row} * cols + e.col;
        if (seen[flat]) {
            throw ArgumentError("ObservationSet: duplicate position (" + std::to_string(e.row) + ", " +
                                std::to_string(e.col) + ")");
        }
        seen[flat] = true;
    }
    entries_ = std::move(entries);
}

ObservationSet ObservationSet::full(const DenseMatrix& m) {
    ObservationSet obs(m.rows(), m.cols());
    obs.entries_.reserve(m.size());
    for (std::uint32_t r = 0; r < m.rows(); ++r) {
        for (std::uint32_t c = 0; c < m.cols(); ++c) obs.entries_.push_back({r, c, m(r, c)});
    }
    return obs;
}

void ObservationSet::add(std::uint32_t row, std::uint32_t col, double value) {
    if (row >= rows_ || col >= cols_) throw ArgumentError("ObservationSet::add: position outside shape");
    if (!std::isfinite(value)) throw ArgumentError("ObservationSet::add: non-finite value");
    for (const auto& e : entries_) {
        if (e.row == row && e.col == col) throw ArgumentError("ObservationSet::add: duplicate position");
    }
    entries_.push_back({row, col, value});
}

DenseMatrix ObservationSet::zero_filled() const {
    DenseMatrix m(rows_, cols_);
    for (const auto& e : entries_) m(e.row, e.col) = e.value;
    return m;
}

void SoftImputeConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ArgumentError("SoftImputeConfig: lambda must be >= 0");
    if (max_iters < 1) throw ArgumentError("SoftImputeConfig: max_iters must be positive");
    if (!(rel_tol > 0.0)) throw ArgumentError("SoftImputeConfig: rel_tol must be > 0");
}

DenseMatrix ObservationSet::row_mean_filled() const {
    std::vector<double> sum(rows_, 0.0);
    std::vector<std::size_t> count(rows_, 0);
    double total = 0.0;
    for (const auto& e : entries_) {
        sum[e.row] += e.value;
        ++count[e.row];
        total += e.value;
    }
    const double global = entries_.empty() ? 0.0 : total / static_cast<double>(entries_.size());
    DenseMatrix m(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        const double fill = count[r] > 0 ? sum[r] / static_cast<double>(count[r]) : global;
        for (std::size_t c = 0; c < cols_; ++c) m(r, c) = fill;
    }
    return m;
}

double resolve_lambda(const ObservationSet& obs, const SoftImputeConfig& cfg) {
    cfg.validate();
    if (cfg.scale == LambdaScale::Absolute || cfg.lambda == 0.0) return cfg.lambda;
    const auto sigma = singular_values(obs.zero_filled());
    return cfg.lambda * (sigma.empty() ? 0.0 : sigma.front());
}

double soft_impute_objective(const ObservationSet& obs, const DenseMatrix& m, double lambda) {
    if (m.rows() != obs.rows() || m.cols() != obs.cols()) {
        throw ArgumentError("soft_impute_objective: shape mismatch");
    }
    double fit = 0.0;
    for (const auto& e : obs.entries()) {
        const double d = m(e.row, e.col) - e.value;
        fit += d * d;
    }
    return 0.5 * fit + lambda * nuclear_norm(m);
}

SoftImputeResult soft_impute_detailed(const ObservationSet& obs, const SoftImputeConfig& cfg,
                                      const std::optional<DenseMatrix>& warm_start, bool trace_objective) {
    cfg.validate();
    if (obs.empty()) throw ArgumentError("soft_impute: observation set is empty");

    SoftImputeResult result;
    result.lambda = resolve_lambda(obs, cfg);

    DenseMatrix current;
    if (warm_start) {
        if (warm_start->rows() != obs.rows() || warm_start->cols() != obs.cols()) {
            throw ArgumentError("soft_impute: warm start shape does not match observations");
        }
        current = *warm_start;
    } else {
        current = DenseMatrix(obs.rows(), obs.cols());
    }
    if (trace_objective) result.objective.push_back(soft_impute_objective(obs, current, result.lambda));

    DenseMatrix filled = current;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        filled = current;
        for (const auto& e : obs.entries()) filled(e.row, e.col) = e.value;

        double nuc = 0.0;
        DenseMatrix next = svt(filled, result.lambda, trace_objective ? &nuc : nullptr);

        const double base = frobenius_norm(current);
        const double change = frobenius_distance(next, current);
        current = std::move(next);
        result.iterations = it;

        if (trace_objective) {
            double fit = 0.0;
            for (const auto& e : obs.entries()) {
                const double d = current(e.row, e.col) - e.value;
                fit += d * d;
            }
            result.objective.push_back(0.5 * fit + result.lambda * nuc);
        }

        if (change == 0.0 || (base > 0.0 && change / base <= cfg.rel_tol)) {
            result.converged = true;
            break;
        }
    }
    result.estimate = std::move(current);
    return result;
}

DenseMatrix soft_impute(const ObservationSet& obs, const SoftImputeConfig& cfg,
                        const std::optional<DenseMatrix>& warm_start) {
    return soft_impute_detailed(obs, cfg, warm_start, false).estimate;
}

}  // namespace lrq
