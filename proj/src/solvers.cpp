#include "lrr/solvers.hpp"

#include <chrono>
#include <cmath>

namespace lrr {

void CompletionProblem::validate() const
{
    if (observed.rows() != mask.rows() || observed.cols() != mask.cols())
        throw ShapeError("CompletionProblem: observed and mask shapes differ");
    for (Eigen::Index i = 0; i < mask.rows(); ++i)
        for (Eigen::Index j = 0; j < mask.cols(); ++j)
            if (mask(i, j) != 0.0 && mask(i, j) != 1.0)
                throw ContractError("CompletionProblem: mask entries must be 0 or 1");
    if (lambda < 0.0)
        throw ContractError("CompletionProblem: lambda must be non-negative");
    if (lambda == 0.0 && mask.sum() == 0.0)
        throw ContractError("CompletionProblem: need at least one observed entry or lambda > 0");
}

void SeparationProblem::validate() const
{
    if (frames.cols() < 2)
        throw ShapeError("SeparationProblem: need at least two frames");
    if (huber_delta <= 0.0)
        throw ContractError("SeparationProblem: huber_delta must be positive");
    if (lambda < 0.0)
        throw ContractError("SeparationProblem: lambda must be non-negative");
}

void OptimizerConfig::validate() const
{
    if (step_size <= 0.0)
        throw ContractError("OptimizerConfig: step_size must be positive");
    if (max_iters < 1)
        throw ContractError("OptimizerConfig: max_iters must be at least 1");
    if (record_every < 1)
        throw ContractError("OptimizerConfig: record_every must be at least 1");
    estimator.validate();
}

double pseudo_huber(double x, double delta)
{
    return std::sqrt(x * x + delta * delta) - delta;
}

double pseudo_huber_grad(double x, double delta)
{
    return x / std::sqrt(x * x + delta * delta);
}

double default_completion_lambda(const Mat& observed, const Mat& mask)
{
    return 0.1 * observed.cwiseProduct(mask).squaredNorm() / static_cast<double>(observed.rows());
}

namespace {

struct LossParts {
    TapeValue data;
    TapeValue reg; // unset when lambda == 0
    TapeValue total;
    double reg_value = 0.0;
};

// Shared first-order descent loop. build_data_term records the data loss for
// the current iterate; the regularizer is re-estimated with fresh probe
// streams each iteration (stream = iteration * N + sample) unless frozen.
template <typename DataTermFn>
SolveReport descend(const Mat& x0, double lambda,
                    const std::optional<ExpansionCoefficients>& relaxation,
                    const OptimizerConfig& opt, DataTermFn build_data_term)
{
    opt.validate();
    const auto t_start = std::chrono::steady_clock::now();

    Mat x = x0;
    Mat m1 = Mat::Zero(x.rows(), x.cols());
    Mat m2 = Mat::Zero(x.rows(), x.cols());

    SolveReport report;
    report.config = opt;
    report.lambda = lambda;

    const auto n = static_cast<std::uint64_t>(opt.estimator.n_samples);
    Tape tape;
    TapeValue leaf{};

    auto evaluate = [&](int iteration, bool with_grad) -> bool {
        tape.clear();
        TapeValue xv = with_grad ? tape.input(x) : tape.constant(x);
        leaf = xv;

        LossParts parts;
        parts.data = build_data_term(tape, xv);
        if (lambda != 0.0) {
            EstimatorConfig est = opt.estimator;
            if (!opt.frozen_probes)
                est.stream_offset += static_cast<std::uint64_t>(iteration) * n;
            Estimate reg = relaxation ? generalized_lrr(xv, *relaxation, est)
                                      : nuclear_estimate(xv, est);
            parts.reg = reg.value;
            parts.reg_value = reg.report.estimate;
            parts.total = tape.add(parts.data, tape.scale(parts.reg, lambda));
        } else {
            parts.total = parts.data;
        }

        const double total = parts.total.scalar();
        if (!std::isfinite(total)) {
            report.diverged = true;
            return false;
        }
        if (iteration % opt.record_every == 0 || iteration == opt.max_iters)
            report.iterates.push_back({iteration, parts.data.scalar(), parts.reg_value, total});
        if (with_grad)
            tape.backward(parts.total);
        return true;
    };

    int it = 0;
    for (; it < opt.max_iters; ++it) {
        bool ok;
        try {
            ok = evaluate(it, true);
        } catch (const NumericError&) {
            report.diverged = true;
            ok = false;
        }
        if (!ok)
            break;

        const Mat grad = leaf.adjoint();
        if (opt.algorithm == OptimizerConfig::Algorithm::plain_gradient) {
            x -= opt.step_size * grad;
        } else {
            m1 = opt.beta1 * m1 + (1.0 - opt.beta1) * grad;
            m2 = opt.beta2 * m2 + (1.0 - opt.beta2) * grad.cwiseProduct(grad);
            const double c1 = 1.0 - std::pow(opt.beta1, it + 1);
            const double c2 = 1.0 - std::pow(opt.beta2, it + 1);
            x -= opt.step_size
                 * (m1 / c1).cwiseQuotient(((m2 / c2).cwiseSqrt().array() + opt.epsilon).matrix());
        }
    }

    if (!report.diverged) {
        try {
            evaluate(opt.max_iters, false); // closing record with fresh probes
        } catch (const NumericError&) {
            report.diverged = true;
        }
    }

    report.final_x = x;
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

} // namespace

SolveReport solve_completion(const CompletionProblem& prob, const OptimizerConfig& opt)
{
    prob.validate();

    // Observed entries pass through; missing entries start at the observed mean.
    const double observed_count = prob.mask.sum();
    const double fill =
        observed_count > 0.0 ? prob.observed.cwiseProduct(prob.mask).sum() / observed_count : 0.0;
    Mat x0 = prob.observed.cwiseProduct(prob.mask)
             + fill * (Mat::Ones(prob.mask.rows(), prob.mask.cols()) - prob.mask);

    Mat masked_observed = prob.observed.cwiseProduct(prob.mask);
    return descend(x0, prob.lambda, prob.relaxation, opt,
                   [&](Tape& tape, TapeValue xv) {
                       TapeValue mask = tape.constant(prob.mask);
                       TapeValue target = tape.constant(masked_observed);
                       TapeValue residual = tape.sub(tape.elem_mul(xv, mask), target);
                       return tape.frobenius_sq(residual);
                   });
}

SeparationResult solve_separation(const SeparationProblem& prob, const OptimizerConfig& opt)
{
    prob.validate();

    SeparationResult result;
    result.report = descend(prob.frames, prob.lambda, std::nullopt, opt,
                            [&](Tape& tape, TapeValue xv) {
                                TapeValue frames = tape.constant(prob.frames);
                                TapeValue residual = tape.sub(frames, xv);
                                return tape.sum_all(tape.pseudo_huber(residual, prob.huber_delta));
                            });
    result.background = result.report.final_x;
    result.foreground = prob.frames - result.background;
    return result;
}

} // namespace lrr
