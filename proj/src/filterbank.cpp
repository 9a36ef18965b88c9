#include "afb/filterbank.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace afb {

namespace {

constexpr double kPi = std::numbers::pi;

// Hard ceiling for the discrete -3 dB bandwidth, in radians. Keeps the poles
// strictly inside the unit circle when the requested analog bandwidth exceeds
// what fits below Nyquist.
constexpr double kMaxBandwidthRad = 0.995 * kPi;

}  // namespace

void FilterbankConfig::validate() const {
  if (n_filters < 1) {
    throw ConfigError("n_filters must be >= 1, got " + std::to_string(n_filters));
  }
  if (!(q_filter > 0.0) || !std::isfinite(q_filter)) {
    throw ConfigError("q_filter must be positive and finite, got " +
                      std::to_string(q_filter));
  }
  if (!(f_min_hz > 0.0) || !std::isfinite(f_min_hz)) {
    throw ConfigError("f_min_hz must be positive and finite, got " +
                      std::to_string(f_min_hz));
  }
  if (!(f_max_hz >= f_min_hz) || !std::isfinite(f_max_hz)) {
    throw ConfigError("f_max_hz must be >= f_min_hz (" + std::to_string(f_min_hz) +
                      "), got " + std::to_string(f_max_hz));
  }
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw ConfigError("sample_rate_hz must be positive and finite, got " +
                      std::to_string(sample_rate_hz));
  }
}

FilterbankConfig typical_config() {
  return FilterbankConfig{24, 7000.0, 8.0, 100.0, 16000.0};
}

FilterbankConfig tiny_config() {
  return FilterbankConfig{10, 2000.0, 2.0, 100.0, 16000.0};
}

std::vector<double> center_frequencies(const FilterbankConfig& config) {
  config.validate();
  const int n = config.n_filters;
  if (n == 1) {
    return {config.f_max_hz};
  }
  std::vector<double> centers(static_cast<std::size_t>(n));
  const double span = config.f_max_hz / config.f_min_hz;
  for (int k = 0; k < n; ++k) {
    const double exponent = static_cast<double>(k - (n - 1)) / (n - 1);
    centers[static_cast<std::size_t>(k)] = config.f_max_hz * std::pow(span, exponent);
  }
  // Pin the endpoints; pow() round-off otherwise leaves them off by an ulp.
  centers.front() = config.f_min_hz;
  centers.back() = config.f_max_hz;
  return centers;
}

BiquadCoeffs design_bandpass(double f_c_hz, double q, double sample_rate_hz) {
  if (!std::isfinite(f_c_hz) || !(f_c_hz > 0.0)) {
    throw ConfigError("bandpass center frequency must be positive and finite");
  }
  if (!std::isfinite(q) || !(q > 0.0)) {
    throw ConfigError("bandpass quality factor must be positive and finite");
  }
  if (!std::isfinite(sample_rate_hz) || !(sample_rate_hz > 0.0)) {
    throw ConfigError("sample rate must be positive and finite");
  }

  BiquadCoeffs out;
  out.f_c_hz = f_c_hz;
  const double nyquist = sample_rate_hz / 2.0;
  if (f_c_hz >= kNyquistGuardFraction * nyquist) {
    return out;  // inactive: all-zero channel
  }

  const double theta0 = 2.0 * kPi * f_c_hz / sample_rate_hz;
  const double v0 = std::tan(theta0 / 2.0);

  // Target -3 dB bandwidth as a digital angle, clamped below Nyquist.
  const double bw_rad =
      std::min(2.0 * kPi * (f_c_hz / q) / sample_rate_hz, kMaxBandwidthRad);

  // With the prototype centered at v0, the discrete -3 dB edges satisfy
  // tan((theta_hi - theta_lo)/2) = v0 / (q_eff (1 + v0^2)); solve for the
  // compensated quality factor that realizes the target bandwidth exactly.
  const double q_eff = v0 / (std::tan(bw_rad / 2.0) * (1.0 + v0 * v0));

  const double v0_over_q = v0 / q_eff;
  const double den = 1.0 + v0_over_q + v0 * v0;
  out.b0 = v0_over_q / den;
  out.b1 = 0.0;
  out.b2 = -out.b0;
  out.a1 = 2.0 * (v0 * v0 - 1.0) / den;
  out.a2 = (1.0 - v0_over_q + v0 * v0) / den;
  out.active = true;
  return out;
}

FilterbankDesign make_filterbank(const FilterbankConfig& config) {
  FilterbankDesign design;
  design.config = config;
  design.centers_hz = center_frequencies(config);
  design.channels.reserve(design.centers_hz.size());
  for (double f_c : design.centers_hz) {
    design.channels.push_back(design_bandpass(f_c, config.q_filter, config.sample_rate_hz));
  }
  return design;
}

std::complex<double> frequency_response(const BiquadCoeffs& coeffs, double f_hz,
                                        double sample_rate_hz) {
  if (!std::isfinite(f_hz) || f_hz < 0.0 || f_hz > sample_rate_hz / 2.0) {
    throw ArgumentError("probe frequency " + std::to_string(f_hz) +
                        " Hz outside [0, Nyquist]");
  }
  if (!coeffs.active) {
    return {0.0, 0.0};
  }
  const double theta = 2.0 * kPi * f_hz / sample_rate_hz;
  const std::complex<double> z1 = std::polar(1.0, -theta);
  const std::complex<double> z2 = z1 * z1;
  return (coeffs.b0 + coeffs.b1 * z1 + coeffs.b2 * z2) /
         (1.0 + coeffs.a1 * z1 + coeffs.a2 * z2);
}

std::vector<double> filter_signal(const BiquadCoeffs& coeffs,
                                  std::span<const double> samples) {
  std::vector<double> out(samples.size(), 0.0);
  for (double x : samples) {
    if (!std::isfinite(x)) {
      throw ArgumentError("non-finite sample in filter input");
    }
  }
  if (!coeffs.active) {
    return out;
  }
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = samples[i];
    const double y = coeffs.b0 * x + s1;
    s1 = coeffs.b1 * x - coeffs.a1 * y + s2;
    s2 = coeffs.b2 * x - coeffs.a2 * y;
    out[i] = y;
  }
  return out;
}

bool is_stable(const BiquadCoeffs& coeffs) {
  if (!coeffs.active) {
    return true;
  }
  const double disc = coeffs.a1 * coeffs.a1 - 4.0 * coeffs.a2;
  if (disc < 0.0) {
    return coeffs.a2 < 1.0;  // complex pair, |p|^2 = a2
  }
  const double root = std::sqrt(disc);
  const double p1 = (-coeffs.a1 + root) / 2.0;
  const double p2 = (-coeffs.a1 - root) / 2.0;
  return std::fabs(p1) < 1.0 && std::fabs(p2) < 1.0;
}

namespace {

double magnitude_at(const BiquadCoeffs& coeffs, double f_hz, double fs) {
  return std::abs(frequency_response(coeffs, f_hz, fs));
}

// Bisects for |H| = target on [lo, hi]; |H(lo)| and |H(hi)| must straddle it.
double bisect_crossing(const BiquadCoeffs& coeffs, double fs, double lo, double hi,
                       double target) {
  bool rising = magnitude_at(coeffs, lo, fs) < target;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const bool below = magnitude_at(coeffs, mid, fs) < target;
    if (below == rising) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

MeasuredBand measure_band(const BiquadCoeffs& coeffs, double sample_rate_hz) {
  if (!coeffs.active) {
    throw ArgumentError("cannot measure bandwidth of an inactive channel");
  }
  const double nyquist = sample_rate_hz / 2.0;
  const double target = 1.0 / std::sqrt(2.0);
  MeasuredBand band;
  band.f_low_hz = bisect_crossing(coeffs, sample_rate_hz, 0.0, coeffs.f_c_hz, target);
  band.f_high_hz = bisect_crossing(coeffs, sample_rate_hz, coeffs.f_c_hz, nyquist, target);
  band.q = coeffs.f_c_hz / (band.f_high_hz - band.f_low_hz);
  return band;
}

}  // namespace afb
