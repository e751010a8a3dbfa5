#pragma once

#include <functional>

#include "lrr/dense.hpp"

namespace lrr::oracle {

/// Compact SVD produced by the one-sided Jacobi sweep. Kept deliberately
/// outside the differentiable path: tests and reports only.
struct SvdResult {
    Mat u;      // m x r, orthonormal columns
    Vec sigma;  // r descending positive singular values above threshold
    Mat v;      // n x r, orthonormal columns
    double threshold = 0.0; // values <= threshold were truncated

    Eigen::Index rank() const { return sigma.size(); }
};

/// One-sided Jacobi rotations on the columns of s until every off-diagonal
/// Gram entry falls below 1e-12 * ||s||_F^2, at most 60 sweeps. Compact
/// truncation at 1e-10 * sigma_1. Throws NumericError with the residual if
/// the sweep limit is hit.
SvdResult jacobi_svd(const Mat& s);

double exact_schatten(const Mat& s, int p);
Eigen::Index exact_rank(const Mat& s, double tol);
Mat exact_pinv(const Mat& s);
Mat exact_psd_root(const Mat& a);
double exact_hsum(const Mat& s, const std::function<double(double)>& h);

} // namespace lrr::oracle
