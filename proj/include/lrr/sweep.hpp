#pragma once

#include <string>
#include <vector>

#include "lrr/estimator.hpp"
#include "lrr/solvers.hpp"

namespace lrr::sweep {

enum class Axis { k1, k2, samples, lambda };
enum class Stat { rank, nuclear, schatten };

struct EstimatorRow {
    double swept_value;
    int trial;
    double estimate;
    double oracle;
    double rel_error;
    double elapsed;
};

struct LambdaRow {
    double lambda;
    double final_l1;
    double final_l2;
    double final_total;
};

/// Sensitivity study: re-estimate the chosen spectral statistic of `input`
/// for every swept value and trial, against the SVD oracle. Trial t draws
/// its probes from streams starting at t * n_samples, shared across swept
/// values so kernel-accuracy effects are not confounded with resampling.
std::vector<EstimatorRow> run_estimator_sweep(const Mat& input, Axis axis,
                                              const std::vector<double>& values, int trials,
                                              Stat stat, const EstimatorConfig& base);

/// The synthetic denoising instance used by the lambda study: clean = A B
/// with i.i.d. Gaussian factors, observed = clean + noise_sigma * E.
struct SyntheticDenoise {
    Mat clean;
    Mat observed;
};
SyntheticDenoise make_synthetic_denoise(Eigen::Index m, Eigen::Index n, Eigen::Index r,
                                        double noise_sigma, std::uint64_t seed);

/// Full-observation completion solve per lambda on the synthetic instance,
/// reporting the final loss decomposition.
std::vector<LambdaRow> run_lambda_sweep(const SyntheticDenoise& instance,
                                        const std::vector<double>& lambdas,
                                        const OptimizerConfig& opt);

void save_estimator_sweep_csv(const std::vector<EstimatorRow>& rows, const std::string& path);
void save_lambda_sweep_csv(const std::vector<LambdaRow>& rows, const std::string& path);

} // namespace lrr::sweep
