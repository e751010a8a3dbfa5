#pragma once

#include <optional>

#include "lrr/relaxation.hpp"

namespace lrr {

/// Recover a low-rank matrix from masked observations:
///   min_X || mask o (X - observed) ||_F^2 + lambda * R(X)
struct CompletionProblem {
    Mat observed;
    Mat mask; // 1 = observed, 0 = missing
    double lambda = 0.0;
    /// Expansion weights for R; empty means the plain nuclear norm.
    std::optional<ExpansionCoefficients> relaxation;

    void validate() const;
};

/// Split frames (columns) into a low-rank background and sparse foreground:
///   min_X sum psi_delta(frames - X) + lambda * ||X||_*
/// with psi_delta the pseudo-Huber smoothing of |.|.
struct SeparationProblem {
    Mat frames; // ab x t, one vectorized frame per column
    double lambda = 0.0;
    double huber_delta = 1e-3;

    void validate() const;
};

struct OptimizerConfig {
    enum class Algorithm { plain_gradient, adaptive_moment };

    Algorithm algorithm = Algorithm::adaptive_moment;
    double step_size = 1e-2;
    int max_iters = 1000;
    EstimatorConfig estimator;
    int record_every = 10;

    /// Adaptive-moment decay and damping.
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    /// Reuse the iteration-0 probe streams every iteration instead of
    /// advancing stream_offset by n_samples per step. Debugging aid.
    bool frozen_probes = false;

    void validate() const;
};

struct SolveReport {
    struct Iterate {
        int iteration;
        double data_loss;
        double reg_loss;
        double total; // data_loss + lambda * reg_loss as computed on the tape
    };

    std::vector<Iterate> iterates;
    Mat final_x;
    double elapsed_seconds = 0.0;
    OptimizerConfig config;
    double lambda = 0.0;
    bool diverged = false; // total went non-finite; iterates hold the partial trace
};

SolveReport solve_completion(const CompletionProblem& prob, const OptimizerConfig& opt);

struct SeparationResult {
    SolveReport report;
    Mat background; // final X
    Mat foreground; // frames - X, sign preserving
};

SeparationResult solve_separation(const SeparationProblem& prob, const OptimizerConfig& opt);

/// Smooth |x| surrogate sqrt(x^2 + delta^2) - delta and its derivative.
double pseudo_huber(double x, double delta);
double pseudo_huber_grad(double x, double delta);

/// Scale-aware default weight for completion: 0.1 * ||P_mask[observed]||_F^2 / rows.
double default_completion_lambda(const Mat& observed, const Mat& mask);

} // namespace lrr
