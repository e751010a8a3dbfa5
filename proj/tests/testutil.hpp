#pragma once

#include <Eigen/QR>
#include <functional>
#include <vector>

#include "lrr/dense.hpp"

namespace testutil {

inline lrr::Mat random_mat(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                           std::uint64_t stream = 0)
{
    return lrr::GaussianSampler(seed, stream).matrix(rows, cols);
}

inline lrr::Mat random_orthogonal(Eigen::Index n, std::uint64_t seed, std::uint64_t stream = 0)
{
    lrr::Mat g = random_mat(n, n, seed, stream);
    Eigen::HouseholderQR<lrr::Mat> qr(g);
    lrr::Mat q = qr.householderQ();
    return q;
}

/// U diag(sigmas) V^T with seeded orthogonal factors: a matrix with a pinned
/// spectrum, for condition-controlled fixtures.
inline lrr::Mat with_spectrum(Eigen::Index rows, Eigen::Index cols,
                              const std::vector<double>& sigmas, std::uint64_t seed)
{
    const auto r = static_cast<Eigen::Index>(sigmas.size());
    lrr::Mat u = random_orthogonal(rows, seed, 0).leftCols(r);
    lrr::Mat v = random_orthogonal(cols, seed, 1).leftCols(r);
    lrr::Vec s(r);
    for (Eigen::Index i = 0; i < r; ++i) s(i) = sigmas[static_cast<std::size_t>(i)];
    return u * s.asDiagonal() * v.transpose();
}

inline std::vector<double> linspace(double lo, double hi, int n)
{
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1.0);
    return out;
}

/// Symmetric positive definite with spectrum sigmas.
inline lrr::Mat spd_with_spectrum(Eigen::Index n, const std::vector<double>& sigmas,
                                  std::uint64_t seed)
{
    const auto r = static_cast<Eigen::Index>(sigmas.size());
    lrr::Mat u = random_orthogonal(n, seed, 0).leftCols(r);
    lrr::Vec s(r);
    for (Eigen::Index i = 0; i < r; ++i) s(i) = sigmas[static_cast<std::size_t>(i)];
    lrr::Mat a = u * s.asDiagonal() * u.transpose();
    return 0.5 * (a + a.transpose()); // exact symmetry
}

/// Entrywise central finite differences of a scalar-valued function.
inline lrr::Mat central_diff(const std::function<double(const lrr::Mat&)>& f, const lrr::Mat& x,
                             double h = 1e-5)
{
    lrr::Mat g(x.rows(), x.cols());
    lrr::Mat xp = x;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double orig = x(i, j);
            xp(i, j) = orig + h;
            const double fp = f(xp);
            xp(i, j) = orig - h;
            const double fm = f(xp);
            xp(i, j) = orig;
            g(i, j) = (fp - fm) / (2.0 * h);
        }
    return g;
}

/// Max entry deviation normalized by the largest reference entry.
inline double max_rel_error(const lrr::Mat& got, const lrr::Mat& want)
{
    const double scale = std::max(want.cwiseAbs().maxCoeff(), 1e-12);
    return (got - want).cwiseAbs().maxCoeff() / scale;
}

inline double rel_fro_error(const lrr::Mat& got, const lrr::Mat& want)
{
    return (got - want).norm() / want.norm();
}

} // namespace testutil
