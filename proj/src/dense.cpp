#include "lrr/dense.hpp"

#include <cmath>
#include <string>

namespace lrr {

namespace {

std::string dims(const Mat& a)
{
    return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

void require_same_shape(const Mat& a, const Mat& b, const char* op)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeError(std::string(op) + ": shape mismatch " + dims(a) + " vs " + dims(b));
}

} // namespace

Mat matmul(const Mat& a, const Mat& b)
{
    if (a.cols() != b.rows())
        throw ShapeError("matmul: inner dimensions " + dims(a) + " * " + dims(b));
    return a * b;
}

Mat transpose(const Mat& a) { return a.transpose(); }

Mat add(const Mat& a, const Mat& b)
{
    require_same_shape(a, b, "add");
    return a + b;
}

Mat sub(const Mat& a, const Mat& b)
{
    require_same_shape(a, b, "sub");
    return a - b;
}

Mat scale(const Mat& a, double c) { return c * a; }

double frobenius_norm(const Mat& a) { return a.norm(); }

double dot(const Mat& a, const Mat& b)
{
    require_same_shape(a, b, "dot");
    return a.cwiseProduct(b).sum();
}

bool all_finite(const Mat& a) { return a.allFinite(); }

namespace {

std::uint64_t splitmix64(std::uint64_t& z)
{
    z += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = z;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

GaussianSampler::GaussianSampler(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed), stream_(stream_index)
{
    // Counter-style derivation: hash the seed once, offset by the stream
    // index, expand into the four state words. Asymmetric in (seed, stream),
    // so swapped pairs do not collide.
    std::uint64_t s = seed;
    std::uint64_t z = splitmix64(s) + stream_index;
    for (auto& w : state_) w = splitmix64(z);
}

std::uint64_t GaussianSampler::next_u64()
{
    // xoshiro256**
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double GaussianSampler::next()
{
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    // (x >> 11) + 1 keeps u1 strictly positive so log(u1) is finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

Mat GaussianSampler::vector(Eigen::Index dim)
{
    return matrix(dim, 1);
}

Mat GaussianSampler::matrix(Eigen::Index rows, Eigen::Index cols)
{
    Mat out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            out(i, j) = next();
    return out;
}

} // namespace lrr
