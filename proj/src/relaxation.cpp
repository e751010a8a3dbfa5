#include "lrr/relaxation.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "estimator_detail.hpp"

namespace lrr {

RelaxationSpec RelaxationSpec::nuclear()
{
    RelaxationSpec spec;
    spec.kind = Kind::nuclear;
    spec.eval = [](double x) { return x; };
    spec.deriv_at_zero = [](int p) { return p == 1 ? 1.0 : 0.0; };
    return spec;
}

RelaxationSpec RelaxationSpec::laplace(double gamma)
{
    if (gamma <= 0.0)
        throw ContractError("RelaxationSpec::laplace: gamma must be positive");
    RelaxationSpec spec;
    spec.kind = Kind::laplace;
    spec.gamma = gamma;
    spec.eval = [gamma](double x) { return 1.0 - std::exp(-x / gamma); };
    // h^(p)(0) = -(-1/gamma)^p for p >= 1, h(0) = 0.
    spec.deriv_at_zero = [gamma](int p) {
        return p == 0 ? 0.0 : -std::pow(-1.0 / gamma, p);
    };
    return spec;
}

RelaxationSpec RelaxationSpec::custom(std::function<double(double)> eval,
                                      std::function<double(int)> deriv_at_zero)
{
    RelaxationSpec spec;
    spec.kind = Kind::custom;
    spec.eval = std::move(eval);
    spec.deriv_at_zero = std::move(deriv_at_zero);
    return spec;
}

std::vector<std::vector<double>> laguerre_poly_coeffs(int k_max)
{
    if (k_max < 0)
        throw ContractError("laguerre_poly_coeffs: k_max must be non-negative");
    std::vector<std::vector<double>> a(static_cast<std::size_t>(k_max) + 1);
    a[0] = {1.0};
    if (k_max >= 1)
        a[1] = {1.0, -1.0};
    for (int k = 1; k < k_max; ++k) {
        // (k+1) L_{k+1} = (2k+1 - x) L_k - k L_{k-1}
        std::vector<double> next(static_cast<std::size_t>(k) + 2, 0.0);
        for (int p = 0; p <= k; ++p) {
            next[static_cast<std::size_t>(p)] += (2.0 * k + 1.0) * a[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)];
            next[static_cast<std::size_t>(p) + 1] -= a[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)];
        }
        for (int p = 0; p <= k - 1; ++p)
            next[static_cast<std::size_t>(p)] -= k * a[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(p)];
        for (double& c : next)
            c /= (k + 1.0);
        a[static_cast<std::size_t>(k) + 1] = std::move(next);
    }
    return a;
}

namespace {

// L_n(x) and L_{n-1}(x) by upward recurrence.
std::pair<double, double> laguerre_eval(int n, double x)
{
    double prev = 1.0; // L_0
    if (n == 0)
        return {prev, 0.0};
    double cur = 1.0 - x; // L_1
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return {cur, prev};
}

} // namespace

std::pair<std::vector<double>, std::vector<double>> gauss_laguerre_rule(int n)
{
    if (n < 1)
        throw ContractError("gauss_laguerre_rule: need at least one node");
    std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));

    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        // Stroud/Secrest starting guesses, then Newton on L_n.
        if (i == 0)
            z = 3.0 / (1.0 + 2.4 * n);
        else if (i == 1)
            z += 15.0 / (1.0 + 2.5 * n);
        else {
            const double ai = i - 1;
            z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - x[static_cast<std::size_t>(i) - 2]);
        }
        for (int it = 0; it < 100; ++it) {
            const auto [pn, pn1] = laguerre_eval(n, z);
            const double deriv = n * (pn - pn1) / z; // x L_n' = n (L_n - L_{n-1})
            const double dz = pn / deriv;
            z -= dz;
            if (std::abs(dz) <= 1e-14 * std::max(1.0, std::abs(z)))
                break;
        }
        x[static_cast<std::size_t>(i)] = z;
        const auto [pn1_val, unused] = laguerre_eval(n + 1, z);
        (void)unused;
        w[static_cast<std::size_t>(i)] = z / ((n + 1.0) * (n + 1.0) * pn1_val * pn1_val);
    }
    return {x, w};
}

std::vector<double> laguerre_projection_coeffs(const RelaxationSpec& h, int degree,
                                               int quad_nodes)
{
    if (degree < 0)
        throw ContractError("laguerre_projection_coeffs: degree must be non-negative");
    if (quad_nodes < degree + 10)
        throw ContractError("laguerre_projection_coeffs: quad_nodes must be at least degree + 10");
    if (!h.eval)
        throw ContractError("laguerre_projection_coeffs: relaxation has no eval closure");

    const auto [nodes, weights] = gauss_laguerre_rule(quad_nodes);
    std::vector<double> hv(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        hv[j] = h.eval(nodes[j]);
        if (!std::isfinite(hv[j]))
            throw NumericError("laguerre_projection_coeffs: h is non-finite at node "
                               + std::to_string(j) + " (x = " + std::to_string(nodes[j]) + ")");
    }

    std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        double prev = 1.0;             // L_0
        double cur = 1.0 - nodes[j];   // L_1
        c[0] += weights[j] * hv[j];
        for (int k = 1; k <= degree; ++k) {
            c[static_cast<std::size_t>(k)] += weights[j] * cur * hv[j];
            const double next = ((2.0 * k + 1.0 - nodes[j]) * cur - k * prev) / (k + 1.0);
            prev = cur;
            cur = next;
        }
    }
    return c;
}

std::vector<double> taylor_coeffs(const RelaxationSpec& h, int truncation)
{
    if (truncation < 0)
        throw ContractError("taylor_coeffs: truncation must be non-negative");
    if (!h.deriv_at_zero)
        throw ContractError("taylor_coeffs: relaxation has no derivative closure");
    std::vector<double> t(static_cast<std::size_t>(truncation) + 1);
    double factorial = 1.0;
    for (int p = 0; p <= truncation; ++p) {
        if (p > 0)
            factorial *= p;
        t[static_cast<std::size_t>(p)] = h.deriv_at_zero(p) / factorial;
    }
    return t;
}

ExpansionCoefficients ExpansionCoefficients::taylor_of(const RelaxationSpec& h, int truncation)
{
    ExpansionCoefficients out;
    out.mode = Mode::taylor;
    out.taylor = taylor_coeffs(h, truncation);
    out.weights = out.taylor;
    return out;
}

ExpansionCoefficients ExpansionCoefficients::laguerre_of(const RelaxationSpec& h, int truncation,
                                                         int quad_nodes)
{
    ExpansionCoefficients out;
    out.mode = Mode::laguerre;
    out.laguerre_c = laguerre_projection_coeffs(h, truncation, quad_nodes);
    out.laguerre_a = laguerre_poly_coeffs(truncation);
    out.weights.assign(static_cast<std::size_t>(truncation) + 1, 0.0);
    for (int k = 0; k <= truncation; ++k)
        for (int p = 0; p <= k; ++p)
            out.weights[static_cast<std::size_t>(p)] +=
                out.laguerre_c[static_cast<std::size_t>(k)] * out.laguerre_a[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)];
    return out;
}

double ExpansionCoefficients::evaluate(double x) const
{
    double acc = 0.0;
    for (std::size_t p = weights.size(); p-- > 0;)
        acc = acc * x + weights[p];
    return acc;
}

Estimate generalized_lrr(TapeValue s, const ExpansionCoefficients& coeffs,
                         const EstimatorConfig& cfg)
{
    cfg.validate();
    for (double w : coeffs.weights)
        if (!std::isfinite(w))
            throw ContractError("generalized_lrr: non-finite expansion weight");

    Tape& tape = *s.tape;
    const Eigen::Index m = s.value().rows();

    std::vector<int> powers;
    for (std::size_t p = 0; p < coeffs.weights.size(); ++p)
        if (coeffs.weights[p] != 0.0)
            powers.push_back(static_cast<int>(p));
    if (powers.empty()) {
        TapeValue zero = tape.constant(Mat::Zero(1, 1));
        EstimateReport rep;
        rep.config = cfg;
        rep.per_sample.assign(static_cast<std::size_t>(cfg.n_samples), 0.0);
        return Estimate{zero, rep};
    }

    TapeValue projector = approx_projector(s, cfg.iter);

    // One root chain shared by all powers; W_p built by left-to-right
    // multiplication so each power matches approx_half_power exactly.
    const int max_p = powers.back();
    std::vector<TapeValue> half_powers(static_cast<std::size_t>(max_p) + 1,
                                       TapeValue{});
    half_powers[0] = tape.constant(Mat::Identity(m, m));
    if (max_p >= 1) {
        TapeValue root = approx_root(tape.matmul(s, tape.transpose(s)), cfg.iter);
        half_powers[1] = root;
        for (int p = 2; p <= max_p; ++p)
            half_powers[static_cast<std::size_t>(p)] =
                tape.matmul(half_powers[static_cast<std::size_t>(p) - 1], root);
    }

    const auto n = static_cast<std::uint64_t>(cfg.n_samples);
    std::vector<TapeValue> terms;
    terms.reserve(static_cast<std::size_t>(cfg.n_samples));
    for (int i = 0; i < cfg.n_samples; ++i) {
        TapeValue shared_g{}, shared_v{};
        if (cfg.shared_probes) {
            GaussianSampler sampler(cfg.seed, cfg.stream_offset + static_cast<std::uint64_t>(i));
            shared_g = tape.constant(sampler.vector(m));
            shared_v = tape.matmul(projector, shared_g);
        }
        bool first = true;
        TapeValue term{};
        for (int p : powers) {
            TapeValue g = shared_g, v = shared_v;
            if (!cfg.shared_probes) {
                GaussianSampler sampler(cfg.seed, cfg.stream_offset
                                        + static_cast<std::uint64_t>(p) * n
                                        + static_cast<std::uint64_t>(i));
                g = tape.constant(sampler.vector(m));
                v = tape.matmul(projector, g);
            }
            TapeValue weighted = tape.matmul(half_powers[static_cast<std::size_t>(p)], g);
            TapeValue contrib = tape.scale(tape.dot(v, weighted),
                                           coeffs.weights[static_cast<std::size_t>(p)]);
            term = first ? contrib : tape.add(term, contrib);
            first = false;
        }
        terms.push_back(term);
    }

    TapeValue mean = detail::mean_of(tape, terms);
    return Estimate{mean, detail::make_report(terms, mean, cfg)};
}

double expansion_fidelity(const ExpansionCoefficients& coeffs, const RelaxationSpec& h,
                          const std::vector<double>& sigma_grid)
{
    if (!h.eval)
        throw ContractError("expansion_fidelity: relaxation has no eval closure");
    double worst = 0.0;
    for (double x : sigma_grid)
        worst = std::max(worst, std::abs(coeffs.evaluate(x) - h.eval(x)));
    return worst;
}

void save_coefficients_csv(const ExpansionCoefficients& coeffs, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw NumericError("save_coefficients_csv: cannot open " + path);
    out << "k,p,value\n";
    out.precision(17);
    if (coeffs.mode == ExpansionCoefficients::Mode::laguerre) {
        for (std::size_t k = 0; k < coeffs.laguerre_c.size(); ++k)
            for (std::size_t p = 0; p < coeffs.laguerre_a[k].size(); ++p)
                out << k << ',' << p << ',' << coeffs.laguerre_c[k] * coeffs.laguerre_a[k][p] << '\n';
    } else {
        for (std::size_t p = 0; p < coeffs.weights.size(); ++p)
            out << p << ',' << p << ',' << coeffs.weights[p] << '\n';
    }
}

ExpansionCoefficients load_coefficients_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw NumericError("load_coefficients_csv: cannot open " + path);
    ExpansionCoefficients out;
    out.mode = ExpansionCoefficients::Mode::imported;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (first && line.rfind("k,p,", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        std::istringstream row(line);
        std::string k_str, p_str, v_str;
        if (!std::getline(row, k_str, ',') || !std::getline(row, p_str, ',')
            || !std::getline(row, v_str))
            throw NumericError("load_coefficients_csv: malformed row '" + line + "'");
        const int p = std::stoi(p_str);
        const double v = std::stod(v_str);
        if (p < 0)
            throw NumericError("load_coefficients_csv: negative power in '" + line + "'");
        if (out.weights.size() <= static_cast<std::size_t>(p))
            out.weights.resize(static_cast<std::size_t>(p) + 1, 0.0);
        out.weights[static_cast<std::size_t>(p)] += v;
    }
    if (out.weights.empty())
        throw NumericError("load_coefficients_csv: no coefficient rows in " + path);
    return out;
}

} // namespace lrr
