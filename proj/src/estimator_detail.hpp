#pragma once

#include <vector>

#include "lrr/estimator.hpp"

namespace lrr::detail {

TapeValue mean_of(Tape& tape, const std::vector<TapeValue>& terms);
EstimateReport make_report(const std::vector<TapeValue>& terms, TapeValue mean,
                           const EstimatorConfig& cfg);

} // namespace lrr::detail
