// First-order relative power model: a filterbank's power scales with each of
// n_filters, f_max and Q, so the estimate is their product. Only ratios of
// estimates are meaningful.
#pragma once

#include "afb/filterbank.hpp"

namespace afb {

struct PowerEstimate {
  double relative_units = 0.0;
};

PowerEstimate relative_power(const FilterbankConfig& config);

double power_ratio(const FilterbankConfig& a, const FilterbankConfig& b);

}  // namespace afb
