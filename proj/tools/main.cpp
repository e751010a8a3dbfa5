#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "lrr/io.hpp"
#include "lrr/oracle.hpp"
#include "lrr/sweep.hpp"

namespace fs = std::filesystem;
using namespace lrr;

namespace {

// Exit contract: 0 ok, 2 input error, 3 numeric contract error, 4 divergence.
constexpr int kExitInput = 2;
constexpr int kExitContract = 3;
constexpr int kExitDivergence = 4;

struct EstimateArgs {
    std::string input;
    std::string stat = "nuclear";
    int p = 1;
    std::string relax;
    double gamma = 1.0;
    std::string mode = "laguerre";
    int trunc = 10;
    int samples = 100;
    int k1 = 10;
    int k2 = 30;
    std::uint64_t seed = 0;
    bool with_oracle = false;
};

ExpansionCoefficients build_expansion(const std::string& relax, double gamma,
                                      const std::string& mode, int trunc)
{
    RelaxationSpec spec = relax == "laplace" ? RelaxationSpec::laplace(gamma)
                                             : RelaxationSpec::nuclear();
    return mode == "taylor" ? ExpansionCoefficients::taylor_of(spec, trunc)
                            : ExpansionCoefficients::laguerre_of(spec, trunc);
}

int run_estimate(const EstimateArgs& args)
{
    const Mat input = io::load_matrix_csv(args.input);

    EstimatorConfig cfg;
    cfg.n_samples = args.samples;
    cfg.iter.k1 = args.k1;
    cfg.iter.k2 = args.k2;
    cfg.seed = args.seed;
    cfg.p = args.p;

    const auto t0 = std::chrono::steady_clock::now();
    Tape tape;
    TapeValue s = tape.constant(input);

    Estimate est{};
    double oracle_value = 0.0;
    if (!args.relax.empty()) {
        const auto coeffs = build_expansion(args.relax, args.gamma, args.mode, args.trunc);
        est = generalized_lrr(s, coeffs, cfg);
        const RelaxationSpec spec = args.relax == "laplace" ? RelaxationSpec::laplace(args.gamma)
                                                            : RelaxationSpec::nuclear();
        if (args.with_oracle)
            oracle_value = oracle::exact_hsum(input, spec.eval);
    } else if (args.stat == "rank") {
        est = rank_estimate(s, cfg);
        if (args.with_oracle)
            oracle_value = static_cast<double>(oracle::exact_rank(input, 1e-8));
    } else if (args.stat == "nuclear") {
        est = nuclear_estimate(s, cfg);
        if (args.with_oracle)
            oracle_value = oracle::exact_schatten(input, 1);
    } else {
        est = schatten_p_estimate(s, cfg);
        if (args.with_oracle)
            oracle_value = oracle::exact_schatten(input, args.p);
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::printf("estimate        %.10g\n", est.report.estimate);
    std::printf("sample_variance %.10g\n", est.report.sample_variance);
    std::printf("elapsed_seconds %.3f\n", elapsed);
    if (args.with_oracle) {
        const double rel = oracle_value != 0.0
                               ? std::abs(est.report.estimate - oracle_value) / std::abs(oracle_value)
                               : std::abs(est.report.estimate);
        std::printf("oracle          %.10g\n", oracle_value);
        std::printf("rel_error       %.10g\n", rel);
    }
    return 0;
}

struct CompleteArgs {
    std::string image;
    std::string mask;
    double drop_frac = -1.0;
    std::uint64_t mask_seed = 0;
    double lambda = -1.0;
    std::string relax;
    double gamma = 1.0;
    std::string mode = "laguerre";
    int trunc = 10;
    int iters = 500;
    int samples = 16;
    int k1 = 10;
    int k2 = 12;
    std::uint64_t seed = 0;
    double step = 1e-2;
    int record_every = 10;
    std::string out;
    std::string report_path;
    std::string truth;
};

int run_complete(const CompleteArgs& args)
{
    CompletionProblem prob;
    prob.observed = io::load_pgm(args.image);
    if (!args.mask.empty()) {
        prob.mask = io::load_mask_csv(args.mask);
        if (prob.mask.rows() != prob.observed.rows() || prob.mask.cols() != prob.observed.cols())
            throw io::IoError(args.mask + ": mask shape does not match image");
    } else if (args.drop_frac >= 0.0) {
        prob.mask = io::make_drop_mask(prob.observed.rows(), prob.observed.cols(), args.drop_frac,
                                       args.mask_seed);
    } else {
        prob.mask = Mat::Ones(prob.observed.rows(), prob.observed.cols());
    }
    prob.observed = prob.observed.cwiseProduct(prob.mask);
    prob.lambda = args.lambda >= 0.0 ? args.lambda
                                     : default_completion_lambda(prob.observed, prob.mask);
    if (!args.relax.empty())
        prob.relaxation = build_expansion(args.relax, args.gamma, args.mode, args.trunc);

    OptimizerConfig opt;
    opt.max_iters = args.iters;
    opt.step_size = args.step;
    opt.record_every = args.record_every;
    opt.estimator.n_samples = args.samples;
    opt.estimator.iter.k1 = args.k1;
    opt.estimator.iter.k2 = args.k2;
    opt.estimator.seed = args.seed;

    SolveReport report = solve_completion(prob, opt);
    if (!args.report_path.empty())
        io::save_solve_report_csv(report, args.report_path);
    if (report.diverged) {
        std::cerr << "complete: diverged (non-finite loss); partial report "
                  << (args.report_path.empty() ? "not requested" : "flushed to " + args.report_path)
                  << "\n";
        return kExitDivergence;
    }
    if (!args.out.empty())
        io::save_pgm(report.final_x, args.out);

    std::printf("lambda          %.10g\n", prob.lambda);
    std::printf("final_total     %.10g\n", report.iterates.back().total);
    std::printf("elapsed_seconds %.3f\n", report.elapsed_seconds);
    if (!args.truth.empty()) {
        const Mat truth = io::load_pgm(args.truth);
        std::printf("psnr_db         %.4f\n",
                    io::psnr(truth, report.final_x.cwiseMax(0.0).cwiseMin(1.0)));
    }
    return 0;
}

struct SeparateArgs {
    std::string frames_dir;
    double lambda = -1.0;
    int iters = 400;
    int samples = 8;
    int k1 = 10;
    int k2 = 12;
    std::uint64_t seed = 0;
    double step = 1e-2;
    double delta = 1e-3;
    std::string out_bg;
    std::string out_fg;
};

int run_separate(const SeparateArgs& args)
{
    std::vector<fs::path> frame_paths;
    if (!fs::is_directory(args.frames_dir))
        throw io::IoError(args.frames_dir + ": not a directory");
    for (const auto& entry : fs::directory_iterator(args.frames_dir))
        if (entry.path().extension() == ".pgm")
            frame_paths.push_back(entry.path());
    std::sort(frame_paths.begin(), frame_paths.end()); // lexicographic = time order
    if (frame_paths.size() < 2)
        throw io::IoError(args.frames_dir + ": need at least two .pgm frames, found "
                          + std::to_string(frame_paths.size()));

    std::vector<Mat> frames;
    frames.reserve(frame_paths.size());
    for (const auto& p : frame_paths) {
        frames.push_back(io::load_pgm(p.string()));
        if (frames.back().rows() != frames.front().rows()
            || frames.back().cols() != frames.front().cols())
            throw io::IoError(p.string() + ": frame size differs from first frame");
    }
    const Eigen::Index rows = frames.front().rows();
    const Eigen::Index cols = frames.front().cols();
    const Eigen::Index ab = rows * cols;

    SeparationProblem prob;
    prob.frames.resize(ab, static_cast<Eigen::Index>(frames.size()));
    for (std::size_t t = 0; t < frames.size(); ++t)
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                prob.frames(i * cols + j, static_cast<Eigen::Index>(t)) = frames[t](i, j);
    // Default weight follows the usual robust-PCA balance: the saturated
    // data gradients are unit scale, so lambda ~ sqrt(max dimension).
    prob.lambda = args.lambda >= 0.0
                      ? args.lambda
                      : std::sqrt(static_cast<double>(std::max(ab, prob.frames.cols())));
    prob.huber_delta = args.delta;

    OptimizerConfig opt;
    opt.max_iters = args.iters;
    opt.step_size = args.step;
    opt.estimator.n_samples = args.samples;
    opt.estimator.iter.k1 = args.k1;
    opt.estimator.iter.k2 = args.k2;
    opt.estimator.seed = args.seed;

    SeparationResult result = solve_separation(prob, opt);
    if (result.report.diverged) {
        std::cerr << "separate: diverged (non-finite loss)\n";
        return kExitDivergence;
    }

    fs::create_directories(args.out_bg);
    fs::create_directories(args.out_fg);
    for (std::size_t t = 0; t < frames.size(); ++t) {
        Mat bg(rows, cols), fg(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) {
                bg(i, j) = result.background(i * cols + j, static_cast<Eigen::Index>(t));
                // Sign-preserving residual, offset to midgray for viewing.
                fg(i, j) = 0.5 + result.foreground(i * cols + j, static_cast<Eigen::Index>(t));
            }
        const std::string name = frame_paths[t].filename().string();
        io::save_pgm(bg, (fs::path(args.out_bg) / name).string());
        io::save_pgm(fg, (fs::path(args.out_fg) / name).string());
    }

    std::printf("frames          %zu\n", frames.size());
    std::printf("lambda          %.10g\n", prob.lambda);
    std::printf("final_total     %.10g\n", result.report.iterates.back().total);
    std::printf("elapsed_seconds %.3f\n", result.report.elapsed_seconds);
    return 0;
}

struct ConvergenceArgs {
    std::string sweep_axis;
    std::vector<double> values;
    std::string input;
    int trials = 5;
    std::string stat = "nuclear";
    int p = 1;
    int samples = 200;
    int k1 = 10;
    int k2 = 30;
    std::uint64_t seed = 0;
    int iters = 300;
    double step = 2e-2;
    std::string out;
};

int run_convergence(const ConvergenceArgs& args)
{
    if (args.values.empty())
        throw io::IoError("convergence: empty --values list");
    if (args.sweep_axis != "lambda")
        for (double v : args.values)
            if (v < 1.0)
                throw io::IoError("convergence: swept " + args.sweep_axis
                                  + " values must be positive integers");

    if (args.sweep_axis == "lambda") {
        // Appendix-style denoising study on a built-in 30x30 synthetic.
        auto instance = sweep::make_synthetic_denoise(30, 30, 30, 0.1, args.seed);
        OptimizerConfig opt;
        opt.algorithm = OptimizerConfig::Algorithm::plain_gradient;
        opt.max_iters = args.iters;
        opt.step_size = args.step;
        opt.record_every = 50;
        opt.estimator.n_samples = args.samples;
        opt.estimator.iter.k1 = args.k1;
        opt.estimator.iter.k2 = args.k2;
        opt.estimator.seed = args.seed;
        auto rows = sweep::run_lambda_sweep(instance, args.values, opt);
        sweep::save_lambda_sweep_csv(rows, args.out);
        std::printf("rows            %zu\n", rows.size());
        return 0;
    }

    sweep::Axis axis;
    if (args.sweep_axis == "k1")
        axis = sweep::Axis::k1;
    else if (args.sweep_axis == "k2")
        axis = sweep::Axis::k2;
    else if (args.sweep_axis == "samples")
        axis = sweep::Axis::samples;
    else
        throw io::IoError("convergence: unknown sweep axis '" + args.sweep_axis + "'");

    const Mat input = io::load_matrix_csv(args.input);
    EstimatorConfig base;
    base.n_samples = args.samples;
    base.iter.k1 = args.k1;
    base.iter.k2 = args.k2;
    base.seed = args.seed;
    base.p = args.p;
    const sweep::Stat stat = args.stat == "rank"      ? sweep::Stat::rank
                             : args.stat == "nuclear" ? sweep::Stat::nuclear
                                                      : sweep::Stat::schatten;

    auto rows = sweep::run_estimator_sweep(input, axis, args.values, args.trials, stat, base);
    sweep::save_estimator_sweep_csv(rows, args.out);
    std::printf("rows            %zu\n", rows.size());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Differentiable low-rank regularization toolkit"};
    app.require_subcommand(1);

    EstimateArgs est;
    auto* cmd_est = app.add_subcommand("estimate", "Stochastic spectral estimates of a CSV matrix");
    cmd_est->add_option("--input", est.input, "matrix CSV")->required();
    cmd_est->add_option("--stat", est.stat)->check(CLI::IsMember({"rank", "nuclear", "schatten"}));
    cmd_est->add_option("--p", est.p, "Schatten order");
    cmd_est->add_option("--relax", est.relax)->check(CLI::IsMember({"laplace", "nuclear"}));
    cmd_est->add_option("--gamma", est.gamma);
    cmd_est->add_option("--mode", est.mode)->check(CLI::IsMember({"taylor", "laguerre"}));
    cmd_est->add_option("--trunc", est.trunc);
    cmd_est->add_option("--samples", est.samples);
    cmd_est->add_option("--k1", est.k1);
    cmd_est->add_option("--k2", est.k2);
    cmd_est->add_option("--seed", est.seed);
    cmd_est->add_flag("--oracle", est.with_oracle, "also print SVD ground truth and rel. error");

    CompleteArgs comp;
    auto* cmd_comp = app.add_subcommand("complete", "Low-rank inpainting of a masked PGM image");
    cmd_comp->add_option("--image", comp.image)->required();
    auto* mask_opt = cmd_comp->add_option("--mask", comp.mask, "mask CSV of {0,1}");
    cmd_comp->add_option("--drop-frac", comp.drop_frac, "generate mask dropping this fraction")
        ->check(CLI::Range(0.0, 1.0))
        ->excludes(mask_opt);
    cmd_comp->add_option("--mask-seed", comp.mask_seed);
    cmd_comp->add_option("--lambda", comp.lambda, "regularization weight (default: scale-aware)");
    cmd_comp->add_option("--relax", comp.relax)->check(CLI::IsMember({"laplace", "nuclear"}));
    cmd_comp->add_option("--gamma", comp.gamma);
    cmd_comp->add_option("--mode", comp.mode)->check(CLI::IsMember({"taylor", "laguerre"}));
    cmd_comp->add_option("--trunc", comp.trunc);
    cmd_comp->add_option("--iters", comp.iters);
    cmd_comp->add_option("--samples", comp.samples);
    cmd_comp->add_option("--k1", comp.k1);
    cmd_comp->add_option("--k2", comp.k2);
    cmd_comp->add_option("--seed", comp.seed);
    cmd_comp->add_option("--step", comp.step);
    cmd_comp->add_option("--record-every", comp.record_every);
    cmd_comp->add_option("--out", comp.out, "recovered PGM");
    cmd_comp->add_option("--report", comp.report_path, "loss trace CSV");
    cmd_comp->add_option("--truth", comp.truth, "ground-truth PGM for PSNR");

    SeparateArgs sep;
    auto* cmd_sep = app.add_subcommand("separate", "Fore/background split of a PGM frame sequence");
    cmd_sep->add_option("--frames", sep.frames_dir, "directory of .pgm frames")->required();
    cmd_sep->add_option("--lambda", sep.lambda);
    cmd_sep->add_option("--iters", sep.iters);
    cmd_sep->add_option("--samples", sep.samples);
    cmd_sep->add_option("--k1", sep.k1);
    cmd_sep->add_option("--k2", sep.k2);
    cmd_sep->add_option("--seed", sep.seed);
    cmd_sep->add_option("--step", sep.step);
    cmd_sep->add_option("--delta", sep.delta, "pseudo-Huber smoothing scale");
    cmd_sep->add_option("--out-bg", sep.out_bg)->required();
    cmd_sep->add_option("--out-fg", sep.out_fg)->required();

    ConvergenceArgs conv;
    auto* cmd_conv = app.add_subcommand("convergence", "Parameter sensitivity sweeps");
    cmd_conv->add_option("--sweep", conv.sweep_axis)->required();
    cmd_conv->add_option("--values", conv.values)->required()->delimiter(',');
    cmd_conv->add_option("--input", conv.input, "matrix CSV (k1/k2/samples axes)");
    cmd_conv->add_option("--trials", conv.trials);
    cmd_conv->add_option("--stat", conv.stat)->check(CLI::IsMember({"rank", "nuclear", "schatten"}));
    cmd_conv->add_option("--p", conv.p);
    cmd_conv->add_option("--samples", conv.samples);
    cmd_conv->add_option("--k1", conv.k1);
    cmd_conv->add_option("--k2", conv.k2);
    cmd_conv->add_option("--seed", conv.seed);
    cmd_conv->add_option("--iters", conv.iters);
    cmd_conv->add_option("--step", conv.step);
    cmd_conv->add_option("--out", conv.out)->required();

    try {
        app.parse(argc, argv);
        if (cmd_est->parsed())
            return run_estimate(est);
        if (cmd_comp->parsed())
            return run_complete(comp);
        if (cmd_sep->parsed())
            return run_separate(sep);
        return run_convergence(conv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    } catch (const io::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitContract;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitContract;
    }
}
