#include "lrr/estimator.hpp"

#include "estimator_detail.hpp"

namespace lrr {

void EstimatorConfig::validate() const
{
    if (n_samples < 1)
        throw ContractError("EstimatorConfig: n_samples must be at least 1");
    if (p < 0)
        throw ContractError("EstimatorConfig: p must be non-negative");
    iter.validate();
}

namespace detail {

TapeValue mean_of(Tape& tape, const std::vector<TapeValue>& terms)
{
    TapeValue sum = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i)
        sum = tape.add(sum, terms[i]);
    return tape.scale(sum, 1.0 / static_cast<double>(terms.size()));
}

EstimateReport make_report(const std::vector<TapeValue>& terms, TapeValue mean,
                           const EstimatorConfig& cfg)
{
    EstimateReport rep;
    rep.config = cfg;
    rep.estimate = mean.scalar();
    rep.per_sample.reserve(terms.size());
    for (const TapeValue& t : terms)
        rep.per_sample.push_back(t.scalar());
    if (rep.per_sample.size() > 1) {
        double acc = 0.0;
        for (double x : rep.per_sample) {
            const double d = x - rep.estimate;
            acc += d * d;
        }
        rep.sample_variance = acc / static_cast<double>(rep.per_sample.size() - 1);
    }
    return rep;
}

} // namespace detail

Estimate schatten_p_estimate(TapeValue s, const EstimatorConfig& cfg)
{
    cfg.validate();
    Tape& tape = *s.tape;
    const Eigen::Index m = s.value().rows();

    TapeValue projector = approx_projector(s, cfg.iter);
    TapeValue half_power = approx_half_power(s, cfg.p, cfg.iter);

    std::vector<TapeValue> terms;
    terms.reserve(static_cast<std::size_t>(cfg.n_samples));
    for (int i = 0; i < cfg.n_samples; ++i) {
        GaussianSampler sampler(cfg.seed, cfg.stream_offset + static_cast<std::uint64_t>(i));
        TapeValue g = tape.constant(sampler.vector(m));
        TapeValue projected = tape.matmul(projector, g);
        TapeValue weighted = tape.matmul(half_power, g);
        terms.push_back(tape.dot(projected, weighted));
    }

    TapeValue mean = detail::mean_of(tape, terms);
    return Estimate{mean, detail::make_report(terms, mean, cfg)};
}

Estimate rank_estimate(TapeValue s, const EstimatorConfig& cfg)
{
    cfg.validate();
    Tape& tape = *s.tape;
    const Eigen::Index m = s.value().rows();

    TapeValue projector = approx_projector(s, cfg.iter);

    std::vector<TapeValue> terms;
    terms.reserve(static_cast<std::size_t>(cfg.n_samples));
    for (int i = 0; i < cfg.n_samples; ++i) {
        GaussianSampler sampler(cfg.seed, cfg.stream_offset + static_cast<std::uint64_t>(i));
        TapeValue g = tape.constant(sampler.vector(m));
        terms.push_back(tape.frobenius_sq(tape.matmul(projector, g)));
    }

    TapeValue mean = detail::mean_of(tape, terms);
    return Estimate{mean, detail::make_report(terms, mean, cfg)};
}

Estimate nuclear_estimate(TapeValue s, const EstimatorConfig& cfg)
{
    EstimatorConfig nuclear_cfg = cfg;
    nuclear_cfg.p = 1;
    return schatten_p_estimate(s, nuclear_cfg);
}

} // namespace lrr
