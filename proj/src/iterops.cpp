#include "lrr/iterops.hpp"

#include <cmath>
#include <string>

namespace lrr {

void IterConfig::validate() const
{
    if (k1 < 1 || k2 < 1)
        throw ContractError("IterConfig: k1 and k2 must be at least 1");
    if (fixed_alpha && *fixed_alpha <= 0.0)
        throw ContractError("IterConfig: fixed alpha must be strictly positive");
    if (jitter_eps < 0.0)
        throw ContractError("IterConfig: jitter_eps must be non-negative");
}

TapeValue approx_pseudo_inverse(TapeValue s, const IterConfig& cfg)
{
    cfg.validate();
    Tape& tape = *s.tape;

    // alpha is a step constant, not a differentiated quantity; at the
    // iteration counts used here the converged value no longer depends on it.
    double alpha;
    if (cfg.fixed_alpha) {
        alpha = *cfg.fixed_alpha;
    } else {
        const double fnorm_sq = s.value().squaredNorm();
        alpha = fnorm_sq > 0.0 ? 1.0 / fnorm_sq : 1.0;
    }

    TapeValue x = tape.scale(tape.transpose(s), alpha);
    for (int i = 0; i < cfg.k1; ++i) {
        TapeValue xsx = tape.matmul(tape.matmul(x, s), x);
        x = tape.sub(tape.scale(x, 2.0), xsx);
    }
    return x;
}

TapeValue approx_projector(TapeValue s, const IterConfig& cfg)
{
    return s.tape->matmul(s, approx_pseudo_inverse(s, cfg));
}

TapeValue approx_project(TapeValue s, const Mat& g, const IterConfig& cfg)
{
    if (g.rows() != s.value().rows() || g.cols() != 1)
        throw ShapeError("approx_project: probe must be " + std::to_string(s.value().rows()) + "x1");
    Tape& tape = *s.tape;
    return tape.matmul(approx_projector(s, cfg), tape.constant(g));
}

TapeValue approx_root(TapeValue a, const IterConfig& cfg)
{
    cfg.validate();
    Tape& tape = *a.tape;
    // Snapshot dimensions and norms up front: recording ops below can grow
    // the tape and invalidate references into it.
    const Eigen::Index n = a.value().rows();
    if (a.value().cols() != n)
        throw ShapeError("approx_root: input must be square");
    const double fnorm = a.value().norm();
    const double asym = (a.value() - a.value().transpose()).norm();
    if (asym > 1e-8 * fnorm)
        throw ContractError("approx_root: input asymmetric beyond 1e-8 relative ("
                            + std::to_string(asym / fnorm) + ")");
    if (fnorm == 0.0)
        return tape.scale(a, 0.0); // 0^(1/2) = 0 by convention

    // Symmetrize on the tape to suppress accumulated drift.
    TapeValue sym = tape.scale(tape.add(a, tape.transpose(a)), 0.5);
    if (cfg.root_jitter)
        sym = tape.add(sym, tape.constant(cfg.jitter_eps * Mat::Identity(n, n)));

    const double norm = sym.value().norm();
    TapeValue y = tape.scale(sym, 1.0 / norm);
    TapeValue z = tape.constant(Mat::Identity(n, n));
    TapeValue three_i = tape.constant(3.0 * Mat::Identity(n, n));
    for (int k = 0; k < cfg.k2; ++k) {
        TapeValue t = tape.sub(three_i, tape.matmul(z, y));
        y = tape.scale(tape.matmul(y, t), 0.5);
        z = tape.scale(tape.matmul(t, z), 0.5);
    }
    return tape.scale(y, std::sqrt(norm));
}

TapeValue approx_half_power(TapeValue s, int p, const IterConfig& cfg)
{
    if (p < 0)
        throw ContractError("approx_half_power: p must be non-negative");
    Tape& tape = *s.tape;
    const Eigen::Index m = s.value().rows();
    if (p == 0)
        return tape.constant(Mat::Identity(m, m));

    TapeValue gram = tape.matmul(s, tape.transpose(s));
    TapeValue root = approx_root(gram, cfg);
    TapeValue power = root;
    for (int i = 1; i < p; ++i)
        power = tape.matmul(power, root);
    return power;
}

} // namespace lrr
