#pragma once

#include <cstdint>
#include <vector>

#include "lrr/iterops.hpp"

namespace lrr {

struct EstimatorConfig {
    int n_samples = 100;
    IterConfig iter;
    std::uint64_t seed = 0;
    int p = 1; // Schatten order; ignored by rank_estimate

    /// First probe stream index. Probe i draws from stream stream_offset + i,
    /// so solvers can resample fresh probes per iteration while staying
    /// deterministic and thread-count independent.
    std::uint64_t stream_offset = 0;

    /// When false, generalized_lrr draws an independent probe set for every
    /// power p (the literal per-term algorithm) instead of sharing one set.
    bool shared_probes = true;

    void validate() const;
};

struct EstimateReport {
    double estimate = 0.0;
    std::vector<double> per_sample;
    double sample_variance = 0.0; // unbiased (N-1) estimator, 0 for N = 1
    EstimatorConfig config;
};

struct Estimate {
    TapeValue value; // scalar node, differentiable w.r.t. s
    EstimateReport report;
};

/// Mean over N probes of <P_S[g], (S S^T)^(p/2) g>; expectation is the
/// Schatten-p norm raised to p, i.e. the sum of sigma_i^p. The per-probe
/// matrices are built once and reused across probes (value-identical to
/// recomputing them inside the loop).
Estimate schatten_p_estimate(TapeValue s, const EstimatorConfig& cfg);

/// Mean over N probes of ||P_S[g]||_2^2; expectation is rank(S).
Estimate rank_estimate(TapeValue s, const EstimatorConfig& cfg);

/// schatten_p_estimate with p = 1; expectation is the nuclear norm.
Estimate nuclear_estimate(TapeValue s, const EstimatorConfig& cfg);

} // namespace lrr
