#pragma once

#include <optional>

#include "lrr/autodiff.hpp"

namespace lrr {

/// Iteration counts and step policy for the two unrolled kernels.
/// Differentiation works by unrolling every iteration onto the tape, so
/// memory grows linearly in k1 + k2.
struct IterConfig {
    int k1 = 10; // pseudo-inverse steps
    int k2 = 30; // Newton-Schulz steps

    /// Step scale for the pseudo-inverse start value S0 = alpha * S^T.
    /// Empty selects alpha = 1 / ||S||_F^2, which always satisfies the
    /// 0 < alpha < 2 / sigma_1(S)^2 convergence window.
    std::optional<double> fixed_alpha;

    /// Optional diagonal jitter added before the root iteration, for
    /// rank-deficient inputs produced inside solvers. Off by default.
    bool root_jitter = false;
    double jitter_eps = 1e-8;

    void validate() const;
};

/// k1 steps of X <- 2X - X S X from X0 = alpha S^T, recorded on the tape.
/// Converges toward the Moore-Penrose pseudo-inverse; the zero matrix is a
/// fixed point and maps to itself (0^+ = 0).
TapeValue approx_pseudo_inverse(TapeValue s, const IterConfig& cfg);

/// S * approx_pseudo_inverse(S): the approximate projector onto span(S).
/// Exposed so callers evaluating many probes can pay for the iteration once.
TapeValue approx_projector(TapeValue s, const IterConfig& cfg);

/// Projection of g onto span(s), i.e. approx_projector(s) * g. The probe g
/// enters the tape as a constant.
TapeValue approx_project(TapeValue s, const Mat& g, const IterConfig& cfg);

/// Principal square root of a symmetric PSD matrix by the coupled
/// Newton-Schulz iteration Y <- Y(3I - ZY)/2, Z <- (3I - ZY)Z/2 from
/// Y0 = A/||A||_F, Z0 = I; returns sqrt(||A||_F) * Y_k2. Inputs are
/// symmetrized as (A + A^T)/2 first; asymmetry beyond 1e-8 relative is a
/// contract error. Zero input returns zero.
TapeValue approx_root(TapeValue a, const IterConfig& cfg);

/// (S S^T)^(p/2): identity for p = 0, otherwise approx_root(S S^T) raised
/// to the p-th power by repeated left-to-right multiplication.
TapeValue approx_half_power(TapeValue s, int p, const IterConfig& cfg);

} // namespace lrr
