#pragma once

#include <cstddef>
#include <vector>

#include "lrq/dense_matrix.hpp"

namespace lrq {

/// Thin SVD: m = u * diag(singular_values) * v_t with k = min(rows, cols).
struct SvdResult {
    DenseMatrix u;                        // rows x k
    std::vector<double> singular_values;  // length k, non-increasing, >= 0
    DenseMatrix v_t;                      // k x cols

    DenseMatrix reconstruct() const;
};

/// Full thin SVD. Throws NumericalError if the decomposition does not converge.
SvdResult svd(const DenseMatrix& m);

/// Singular values only (cheaper; no singular vectors are accumulated).
std::vector<double> singular_values(const DenseMatrix& m);

/// Singular-value soft-thresholding: u * diag(max(sigma - lambda, 0)) * v_t.
/// lambda == 0 returns the input unchanged.
DenseMatrix svt(const DenseMatrix& m, double lambda);

/// svt that also writes the nuclear norm of the result to `nuclear_norm_out`
/// when it is non-null.
DenseMatrix svt(const DenseMatrix& m, double lambda, double* nuclear_norm_out);

double nuclear_norm(const DenseMatrix& m);

/// Smallest k with sum_{i<=k} sigma_i^2 / sum_j sigma_j^2 >= energy.
std::size_t approximate_rank(const DenseMatrix& m, double energy = 0.99);
/// approximate_rank, except that the zero matrix has rank 0 instead of being an error.
std::size_t approximate_rank_or_zero(const DenseMatrix& m, double energy = 0.99);
std::size_t approximate_rank_from_spectrum(const std::vector<double>& sigma, double energy = 0.99);

}  // namespace lrq
