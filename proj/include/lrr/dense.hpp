#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "lrr/errors.hpp"

namespace lrr {

// Row-major double storage throughout; no single-precision path.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1>;

// Shape-checked free functions. Eigen expressions stay available for
// internal code; these are the contract surface the tape records through.
Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);
Mat add(const Mat& a, const Mat& b);
Mat sub(const Mat& a, const Mat& b);
Mat scale(const Mat& a, double c);
double frobenius_norm(const Mat& a);
double dot(const Mat& a, const Mat& b); // sum of entrywise products, same shape

bool all_finite(const Mat& a);

/// Deterministic Gaussian stream, addressed by (seed, stream_index).
///
/// The generator is pinned so any reimplementation reproduces the same
/// doubles bit-for-bit:
///   - state: xoshiro256** with the four 64-bit words produced by four
///     successive splitmix64 draws seeded from splitmix64(seed) + stream
///   - uniforms: u = ((x >> 11) + 1) * 2^-53 in (0, 1] for the radial draw
///     (zero is rejected by construction), u = (x >> 11) * 2^-53 in [0, 1)
///     for the angular draw
///   - normals: Box-Muller pairs z0 = sqrt(-2 ln u1) cos(2 pi u2),
///     z1 = sqrt(-2 ln u1) sin(2 pi u2); z1 is cached and returned by the
///     next call.
///
/// Distinct stream indices give statistically independent sequences, so
/// per-sample parallelism can address stream = sample index and stay
/// order-independent.
class GaussianSampler {
public:
    GaussianSampler(std::uint64_t seed, std::uint64_t stream_index = 0);

    double next();

    /// dim x 1 matrix of i.i.d. standard normals.
    Mat vector(Eigen::Index dim);

    /// rows x cols matrix filled row by row.
    Mat matrix(Eigen::Index rows, Eigen::Index cols);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_index() const { return stream_; }

private:
    std::uint64_t next_u64();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t state_[4];
    bool has_cached_ = false;
    double cached_ = 0.0;
};

} // namespace lrr
