#include "lrr/sweep.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "lrr/oracle.hpp"

namespace lrr::sweep {

std::vector<EstimatorRow> run_estimator_sweep(const Mat& input, Axis axis,
                                              const std::vector<double>& values, int trials,
                                              Stat stat, const EstimatorConfig& base)
{
    if (values.empty())
        throw ContractError("run_estimator_sweep: empty value list");
    if (axis == Axis::lambda)
        throw ContractError("run_estimator_sweep: lambda sweeps go through run_lambda_sweep");
    if (trials < 1)
        throw ContractError("run_estimator_sweep: trials must be at least 1");

    double oracle_value = 0.0;
    switch (stat) {
    case Stat::rank:
        oracle_value = static_cast<double>(oracle::exact_rank(input, 1e-8));
        break;
    case Stat::nuclear:
        oracle_value = oracle::exact_schatten(input, 1);
        break;
    case Stat::schatten:
        oracle_value = oracle::exact_schatten(input, base.p);
        break;
    }

    std::vector<EstimatorRow> rows;
    rows.reserve(values.size() * static_cast<std::size_t>(trials));
    for (double v : values) {
        EstimatorConfig cfg = base;
        switch (axis) {
        case Axis::k1:
            cfg.iter.k1 = static_cast<int>(v);
            break;
        case Axis::k2:
            cfg.iter.k2 = static_cast<int>(v);
            break;
        case Axis::samples:
            cfg.n_samples = static_cast<int>(v);
            break;
        case Axis::lambda:
            break;
        }
        cfg.validate();

        for (int t = 0; t < trials; ++t) {
            cfg.stream_offset = base.stream_offset
                                + static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(cfg.n_samples);
            const auto t0 = std::chrono::steady_clock::now();
            Tape tape;
            TapeValue s = tape.constant(input);
            Estimate est = stat == Stat::rank      ? rank_estimate(s, cfg)
                           : stat == Stat::nuclear ? nuclear_estimate(s, cfg)
                                                   : schatten_p_estimate(s, cfg);
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const double rel = oracle_value != 0.0
                                   ? std::abs(est.report.estimate - oracle_value) / std::abs(oracle_value)
                                   : std::abs(est.report.estimate);
            rows.push_back({v, t, est.report.estimate, oracle_value, rel, elapsed});
        }
    }
    return rows;
}

SyntheticDenoise make_synthetic_denoise(Eigen::Index m, Eigen::Index n, Eigen::Index r,
                                        double noise_sigma, std::uint64_t seed)
{
    GaussianSampler a_gen(seed, 0), b_gen(seed, 1), e_gen(seed, 2);
    SyntheticDenoise out;
    out.clean = a_gen.matrix(m, r) * b_gen.matrix(r, n);
    out.observed = out.clean + noise_sigma * e_gen.matrix(m, n);
    return out;
}

std::vector<LambdaRow> run_lambda_sweep(const SyntheticDenoise& instance,
                                        const std::vector<double>& lambdas,
                                        const OptimizerConfig& opt)
{
    if (lambdas.empty())
        throw ContractError("run_lambda_sweep: empty value list");

    std::vector<LambdaRow> rows;
    rows.reserve(lambdas.size());
    for (double lambda : lambdas) {
        CompletionProblem prob;
        prob.observed = instance.observed;
        prob.mask = Mat::Ones(instance.observed.rows(), instance.observed.cols());
        prob.lambda = lambda;
        SolveReport report = solve_completion(prob, opt);
        if (report.diverged || report.iterates.empty())
            throw NumericError("run_lambda_sweep: solve diverged at lambda = "
                               + std::to_string(lambda));
        const auto& last = report.iterates.back();
        rows.push_back({lambda, last.data_loss, last.reg_loss, last.total});
    }
    return rows;
}

void save_estimator_sweep_csv(const std::vector<EstimatorRow>& rows, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw NumericError("save_estimator_sweep_csv: cannot open " + path);
    out << "swept_value,trial,estimate,oracle,rel_error,elapsed\n";
    out.precision(17);
    for (const auto& r : rows)
        out << r.swept_value << ',' << r.trial << ',' << r.estimate << ',' << r.oracle << ','
            << r.rel_error << ',' << r.elapsed << '\n';
}

void save_lambda_sweep_csv(const std::vector<LambdaRow>& rows, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw NumericError("save_lambda_sweep_csv: cannot open " + path);
    out << "lambda,final_l1,final_l2,final_total\n";
    out.precision(17);
    for (const auto& r : rows)
        out << r.lambda << ',' << r.final_l1 << ',' << r.final_l2 << ',' << r.final_total << '\n';
}

} // namespace lrr::sweep
