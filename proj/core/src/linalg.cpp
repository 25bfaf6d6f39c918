#include "lrq/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "lrq/errors.hpp"

namespace lrq {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> as_eigen(const DenseMatrix& m) {
    return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

void require_finite(const DenseMatrix& m, const char* what) {
    if (!all_finite(m)) throw ArgumentError(std::string(what) + ": matrix has non-finite entries");
}

template <typename Svd>
void require_converged(const Svd& solver) {
    if (solver.info() != Eigen::Success) throw NumericalError("svd: decomposition failed to converge");
}

struct Decomposition {
    Eigen::MatrixXd u;
    Eigen::VectorXd s;
    Eigen::MatrixXd v;
};

// BDCSVD is the workhorse; on a few sparse, badly scaled inputs Eigen 3.4's
// divide-and-conquer path reports success but returns NaNs, so the result is
// checked and recomputed with one-sided Jacobi when that happens.
Decomposition decompose(const DenseMatrix& m, bool vectors) {
    const unsigned opts = vectors ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : 0u;
    Decomposition d;
    {
        Eigen::BDCSVD<Eigen::MatrixXd> solver(as_eigen(m), opts);
        require_converged(solver);
        d.s = solver.singularValues();
        if (vectors) {
            d.u = solver.matrixU();
            d.v = solver.matrixV();
        }
    }
    const bool finite = d.s.allFinite() && (!vectors || (d.u.allFinite() && d.v.allFinite()));
    if (finite) return d;

    Eigen::JacobiSVD<Eigen::MatrixXd> jacobi(as_eigen(m), opts);
    require_converged(jacobi);
    d.s = jacobi.singularValues();
    if (vectors) {
        d.u = jacobi.matrixU();
        d.v = jacobi.matrixV();
    }
    if (!d.s.allFinite()) throw NumericalError("svd: decomposition produced non-finite values");
    return d;
}

DenseMatrix from_eigen(const RowMajor& e) {
    DenseMatrix out(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
    std::copy(e.data(), e.data() + e.size(), out.data().begin());
    return out;
}

}  // namespace

DenseMatrix SvdResult::reconstruct() const {
    const std::size_t k = singular_values.size();
    DenseMatrix out(u.rows(), v_t.cols());
    for (std::size_t i = 0; i < u.rows(); ++i) {
        auto dst = out.row(i);
        for (std::size_t j = 0; j < k; ++j) {
            const double w = u(i, j) * singular_values[j];
            if (w == 0.0) continue;
            auto vr = v_t.row(j);
            for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += w * vr[c];
        }
    }
    return out;
}

SvdResult svd(const DenseMatrix& m) {
    require_finite(m, "svd");
    if (m.empty()) throw ArgumentError("svd: empty matrix");
    const auto d = decompose(m, true);

    SvdResult out;
    out.u = from_eigen(d.u);
    out.v_t = from_eigen(d.v.transpose());
    out.singular_values.assign(d.s.data(), d.s.data() + d.s.size());
    return out;
}

std::vector<double> singular_values(const DenseMatrix& m) {
    require_finite(m, "singular_values");
    if (m.empty()) throw ArgumentError("singular_values: empty matrix");
    const auto d = decompose(m, false);
    return {d.s.data(), d.s.data() + d.s.size()};
}

DenseMatrix svt(const DenseMatrix& m, double lambda, double* nuclear_norm_out) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ArgumentError("svt: lambda must be finite and >= 0");
    if (lambda == 0.0) {
        require_finite(m, "svt");
        if (nuclear_norm_out) *nuclear_norm_out = nuclear_norm(m);
        return m;
    }
    require_finite(m, "svt");
    const auto d = decompose(m, true);

    const auto& s = d.s;
    Eigen::Index kept = 0;
    double nuc = 0.0;
    while (kept < s.size() && s[kept] > lambda) {
        nuc += s[kept] - lambda;
        ++kept;
    }
    if (nuclear_norm_out) *nuclear_norm_out = nuc;
    if (kept == 0) return DenseMatrix(m.rows(), m.cols());

    const Eigen::VectorXd shrunk = s.head(kept).array() - lambda;
    RowMajor out = d.u.leftCols(kept) * shrunk.asDiagonal() * d.v.leftCols(kept).transpose();
    return from_eigen(out);
}

DenseMatrix svt(const DenseMatrix& m, double lambda) { return svt(m, lambda, nullptr); }

double nuclear_norm(const DenseMatrix& m) {
    const auto s = singular_values(m);
    return std::accumulate(s.begin(), s.end(), 0.0);
}

std::size_t approximate_rank_from_spectrum(const std::vector<double>& sigma, double energy) {
    if (!(energy > 0.0 && energy <= 1.0)) throw ArgumentError("approximate_rank: energy must lie in (0, 1]");
    double total = 0.0;
    for (double s : sigma) total += s * s;
    if (!(total > 0.0)) throw ArgumentError("approximate_rank: matrix is zero");

    double acc = 0.0;
    for (std::size_t k = 0; k < sigma.size(); ++k) {
        acc += sigma[k] * sigma[k];
        if (acc / total >= energy) return k + 1;
    }
    // Rounding can leave acc/total a hair below 1.0 when energy == 1.
    return sigma.size();
}

std::size_t approximate_rank(const DenseMatrix& m, double energy) {
    if (!(energy > 0.0 && energy <= 1.0)) throw ArgumentError("approximate_rank: energy must lie in (0, 1]");
    return approximate_rank_from_spectrum(singular_values(m), energy);
}

std::size_t approximate_rank_or_zero(const DenseMatrix& m, double energy) {
    if (!(energy > 0.0 && energy <= 1.0)) throw ArgumentError("approximate_rank: energy must lie in (0, 1]");
    const auto sigma = singular_values(m);
    if (sigma.empty() || sigma.front() == 0.0) return 0;
    return approximate_rank_from_spectrum(sigma, energy);
}

}  // namespace lrq
