#include "afb/power.hpp"

namespace afb {

PowerEstimate relative_power(const FilterbankConfig& config) {
  config.validate();
  return PowerEstimate{config.n_filters * config.f_max_hz * config.q_filter};
}

double power_ratio(const FilterbankConfig& a, const FilterbankConfig& b) {
  return relative_power(a).relative_units / relative_power(b).relative_units;
}

}  // namespace afb
