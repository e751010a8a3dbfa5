#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lrr/estimator.hpp"

namespace lrr {

/// A singular-value penalty h and whatever is needed to expand it: an
/// evaluation closure for the Laguerre path and a derivative-at-zero closure
/// for the Taylor path. Built-ins cover the nuclear norm (h(x) = x) and the
/// Laplace penalty h(x) = 1 - exp(-x/gamma); anything else goes through
/// custom().
///
/// Taylor expansions are only trusted where the singular values lie inside
/// the series' convergence region; the library does not verify this — use
/// expansion_fidelity() as a diagnostic for a given sigma range.
struct RelaxationSpec {
    enum class Kind { nuclear, laplace, custom };

    Kind kind = Kind::nuclear;
    std::function<double(double)> eval;
    std::function<double(int)> deriv_at_zero; // p -> h^(p)(0); may be empty
    double gamma = 0.0;

    static RelaxationSpec nuclear();
    static RelaxationSpec laplace(double gamma);
    static RelaxationSpec custom(std::function<double(double)> eval,
                                 std::function<double(int)> deriv_at_zero = nullptr);
};

/// Power-basis weights w_p for the truncated expansion of h, plus the raw
/// per-mode coefficients they were combined from.
struct ExpansionCoefficients {
    enum class Mode { taylor, laguerre, imported };

    Mode mode = Mode::taylor;
    std::vector<double> taylor;                   // t_p = h^(p)(0)/p!, taylor mode
    std::vector<double> laguerre_c;               // c_k, laguerre mode
    std::vector<std::vector<double>> laguerre_a;  // a[k][p], coefficients of L_k
    std::vector<double> weights;                  // w_p, all modes

    /// Truncated at step T: w_p = h^(p)(0)/p! for p = 0..T.
    static ExpansionCoefficients taylor_of(const RelaxationSpec& h, int truncation);

    /// Truncated at degree K: w_p = sum_k c_k a_{k,p}, c_k by Gauss-Laguerre
    /// quadrature with quad_nodes points (must be at least K + 10).
    static ExpansionCoefficients laguerre_of(const RelaxationSpec& h, int truncation,
                                             int quad_nodes = 64);

    /// Evaluate the truncated expansion sum_p w_p x^p at a point.
    double evaluate(double x) const;
};

/// Coefficients a_{k,p} of the standard Laguerre polynomials L_0..L_kmax via
/// the three-term recurrence L_{k+1} = ((2k+1-x) L_k - k L_{k-1}) / (k+1).
std::vector<std::vector<double>> laguerre_poly_coeffs(int k_max);

/// Projection coefficients c_k = integral_0^inf L_k(x) e^-x h(x) dx for
/// k = 0..K, by Gauss-Laguerre quadrature. Nodes and weights come from
/// Newton iteration on the Laguerre roots, so the result is deterministic
/// for a fixed node count. A non-finite h at a node raises NumericError
/// naming the node.
std::vector<double> laguerre_projection_coeffs(const RelaxationSpec& h, int degree,
                                               int quad_nodes);

/// Maclaurin coefficients t_p = h^(p)(0)/p! for p = 0..T. Requires the
/// derivative closure.
std::vector<double> taylor_coeffs(const RelaxationSpec& h, int truncation);

/// Gauss-Laguerre rule for weight e^-x on (0, inf): nodes.first, weights
/// .second. Exposed for tests and diagnostics.
std::pair<std::vector<double>, std::vector<double>> gauss_laguerre_rule(int n);

/// Stochastic estimate of sum_i h(sigma_i(S)) as sum_p w_p <P_S[g], (SS^T)^(p/2) g>
/// averaged over probes. With cfg.shared_probes every power reuses one probe
/// set per sample (value-identical in expectation, cheaper, and exactly equal
/// to nuclear_estimate when the weights reduce to w_1 = 1); otherwise each
/// power draws its own probes from streams offset + p*N + i.
Estimate generalized_lrr(TapeValue s, const ExpansionCoefficients& coeffs,
                         const EstimatorConfig& cfg);

/// Max absolute error of the truncated expansion against h on a sigma grid.
double expansion_fidelity(const ExpansionCoefficients& coeffs, const RelaxationSpec& h,
                          const std::vector<double>& sigma_grid);

/// CSV rows "k,p,value" where value is the additive contribution of (k, p)
/// to w_p: c_k * a_{k,p} in laguerre mode, t_p (with k = p) in taylor mode.
/// Import sums contributions per p, so externally computed expansions can be
/// injected without knowing which basis produced them.
void save_coefficients_csv(const ExpansionCoefficients& coeffs, const std::string& path);
ExpansionCoefficients load_coefficients_csv(const std::string& path);

} // namespace lrr
