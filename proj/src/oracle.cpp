#include "lrr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace lrr::oracle {

namespace {

// Hestenes rotation: orthogonalize columns p and q of a in place, applying
// the same rotation to the accumulated right factor v.
bool rotate_pair(Mat& a, Mat& v, Eigen::Index p, Eigen::Index q, double gram_tol)
{
    const double app = a.col(p).squaredNorm();
    const double aqq = a.col(q).squaredNorm();
    const double apq = a.col(p).dot(a.col(q));
    if (std::abs(apq) <= gram_tol)
        return false;

    const double tau = (aqq - app) / (2.0 * apq);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = c * t;

    const Vec ap = a.col(p);
    a.col(p) = c * ap - s * a.col(q);
    a.col(q) = s * ap + c * a.col(q);
    const Vec vp = v.col(p);
    v.col(p) = c * vp - s * v.col(q);
    v.col(q) = s * vp + c * v.col(q);
    return true;
}

SvdResult jacobi_svd_tall(const Mat& s)
{
    const Eigen::Index n = s.cols();
    Mat a = s;
    Mat v = Mat::Identity(n, n);

    const double gram_tol = 1e-12 * s.squaredNorm();
    constexpr int max_sweeps = 60;

    bool converged = (n <= 1);
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        bool rotated = false;
        for (Eigen::Index p = 0; p + 1 < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q)
                rotated |= rotate_pair(a, v, p, q, gram_tol);
        converged = !rotated;
    }
    if (!converged) {
        double worst = 0.0;
        for (Eigen::Index p = 0; p + 1 < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q)
                worst = std::max(worst, std::abs(a.col(p).dot(a.col(q))));
        throw NumericError("jacobi_svd: no convergence in 60 sweeps, worst off-diagonal Gram entry "
                           + std::to_string(worst));
    }

    std::vector<double> norms(static_cast<size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) norms[static_cast<size_t>(j)] = a.col(j).norm();

    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
        return norms[static_cast<size_t>(i)] > norms[static_cast<size_t>(j)];
    });

    const double sigma1 = norms.empty() ? 0.0 : norms[static_cast<size_t>(order[0])];
    const double threshold = 1e-10 * sigma1;

    Eigen::Index r = 0;
    for (Eigen::Index j = 0; j < n; ++j)
        if (norms[static_cast<size_t>(order[static_cast<size_t>(j)])] > threshold) ++r;

    SvdResult out;
    out.threshold = threshold;
    out.u.resize(s.rows(), r);
    out.sigma.resize(r);
    out.v.resize(n, r);
    for (Eigen::Index j = 0; j < r; ++j) {
        const Eigen::Index src = order[static_cast<size_t>(j)];
        const double sigma = norms[static_cast<size_t>(src)];
        out.sigma(j) = sigma;
        out.u.col(j) = a.col(src) / sigma;
        out.v.col(j) = v.col(src);
    }
    return out;
}

} // namespace

SvdResult jacobi_svd(const Mat& s)
{
    if (!all_finite(s))
        throw ContractError("jacobi_svd: input has non-finite entries");
    if (s.rows() >= s.cols())
        return jacobi_svd_tall(s);
    // Wide input: factor the transpose and swap the factors.
    SvdResult t = jacobi_svd_tall(s.transpose());
    std::swap(t.u, t.v);
    return t;
}

double exact_schatten(const Mat& s, int p)
{
    const SvdResult svd = jacobi_svd(s);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < svd.rank(); ++i) sum += std::pow(svd.sigma(i), p);
    return sum;
}

Eigen::Index exact_rank(const Mat& s, double tol)
{
    const SvdResult svd = jacobi_svd(s);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < svd.rank(); ++i)
        if (svd.sigma(i) > tol) ++r;
    return r;
}

Mat exact_pinv(const Mat& s)
{
    const SvdResult svd = jacobi_svd(s);
    return svd.v * svd.sigma.cwiseInverse().asDiagonal() * svd.u.transpose();
}

Mat exact_psd_root(const Mat& a)
{
    if (a.rows() != a.cols())
        throw ShapeError("exact_psd_root: input must be square");
    // For symmetric PSD input the SVD coincides with the eigendecomposition,
    // so U sqrt(Sigma) U^T is the principal root.
    const SvdResult svd = jacobi_svd(a);
    return svd.u * svd.sigma.cwiseSqrt().asDiagonal() * svd.u.transpose();
}

double exact_hsum(const Mat& s, const std::function<double(double)>& h)
{
    const SvdResult svd = jacobi_svd(s);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < svd.rank(); ++i) sum += h(svd.sigma(i));
    return sum;
}

} // namespace lrr::oracle
