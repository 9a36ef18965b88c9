// Bank of second-order bandpass filters: center-frequency placement on an
// exponential (geometric) grid, discretization of the analog prototype, and
// per-channel filtering.
#pragma once

#include <complex>
#include <span>
#include <vector>

#include "afb/errors.hpp"

namespace afb {

/// The three swept architectural parameters plus the fixed secondary ones.
struct FilterbankConfig {
  int n_filters = 24;
  double f_max_hz = 7000.0;
  double q_filter = 8.0;
  double f_min_hz = 100.0;
  double sample_rate_hz = 16000.0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Built-in "typical" configuration (24 filters, 7 kHz, Q 8).
FilterbankConfig typical_config();
/// Built-in "tiny" configuration (10 filters, 2 kHz, Q 2).
FilterbankConfig tiny_config();

/// Discrete biquad for one channel. Inactive channels (design center at or
/// above the Nyquist guard) carry all-zero coefficients and output silence.
struct BiquadCoeffs {
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;  // feedforward
  double a1 = 0.0, a2 = 0.0;            // feedback (a0 normalized to 1)
  double f_c_hz = 0.0;
  bool active = false;
};

struct FilterbankDesign {
  FilterbankConfig config;
  std::vector<double> centers_hz;
  std::vector<BiquadCoeffs> channels;
};

/// Channels with a design center at or above this fraction of Nyquist are
/// emitted inactive (all-zero output).
inline constexpr double kNyquistGuardFraction = 0.95;

/// Center frequencies on a geometric progression anchored at the top:
/// f_k = f_max * r^(k - (N-1)), r = (f_max/f_min)^(1/(N-1)). A single-filter
/// bank is placed at f_max, which stays the top center frequency by
/// definition. The first and last entries are pinned exactly to f_min/f_max.
std::vector<double> center_frequencies(const FilterbankConfig& config);

/// Discretizes H(s) = (w0/Q)s / (s^2 + (w0/Q)s + w0^2) by bilinear transform
/// with frequency prewarping at f_c, so the discrete magnitude response is
/// exactly 1 at f_c. The prototype quality factor is compensated so the
/// discrete -3 dB bandwidth matches f_c/Q: prewarping the center alone
/// inflates the measured Q by roughly theta0/sin(theta0), which is already
/// +11% at fs/8. Bandwidths that cannot fit below Nyquist are clamped.
BiquadCoeffs design_bandpass(double f_c_hz, double q, double sample_rate_hz);

FilterbankDesign make_filterbank(const FilterbankConfig& config);

/// Transfer function on the unit circle at f_hz. Inactive channels return 0.
/// f_hz must lie in [0, sample_rate/2].
std::complex<double> frequency_response(const BiquadCoeffs& coeffs, double f_hz,
                                        double sample_rate_hz);

/// Direct-form II transposed recursion, state zeroed per call. Output has the
/// same length as the input. Throws ArgumentError on non-finite samples.
std::vector<double> filter_signal(const BiquadCoeffs& coeffs,
                                  std::span<const double> samples);

/// Both poles strictly inside the unit circle. Inactive channels are trivially
/// stable.
bool is_stable(const BiquadCoeffs& coeffs);

/// Numerically located -3 dB crossings of the discrete response.
struct MeasuredBand {
  double f_low_hz = 0.0;
  double f_high_hz = 0.0;
  double q = 0.0;  // f_c / (f_high - f_low)
};

/// Bisects for the -3 dB crossings on either side of the channel center.
/// Throws ArgumentError for inactive channels.
MeasuredBand measure_band(const BiquadCoeffs& coeffs, double sample_rate_hz);

}  // namespace afb
