#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hrrp {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s, fixed

// Wideband radar acquisition geometry. Frequencies in Hz.
struct RadarParams {
  double center_frequency_hz = 10.0e9;
  double bandwidth_hz = 1.0e9;
  double start_frequency_hz = 9.5e9;
  int num_frequency_samples = 306;
  double pulse_duration_s = 1.0e-4;  // metadata only

  static RadarParams from_center(double center_hz, double bandwidth_hz,
                                 int num_samples, double pulse_duration_s = 1.0e-4);

  // f_m = f_start + m * (B / M)
  double frequency_at(int m) const;

  // Unambiguous range window [0, M * delta_r).
  double window_m() const;

  void validate() const;  // throws DomainError
};

// Frequency-domain echo R(m), one complex sample per stepped frequency.
struct FrequencyResponse {
  std::vector<std::complex<double>> samples;
  RadarParams params;
};

// Range-domain profile x(k); one complex value per range bin of width
// range_resolution_m.
struct RangeProfile {
  std::vector<std::complex<double>> samples;
  double range_resolution_m = 0.0;
  std::string label;                 // empty when unlabeled
  std::optional<double> aspect_deg;  // metadata
};

struct AmplitudeProfile {
  std::vector<double> values;
  bool normalized = false;
};

// Point-scatterer target: ranges along the reference axis and reflector
// strengths. Aspect projects ranges onto the line of sight as
// d * cos(aspect).
struct ScattererModel {
  struct Point {
    double range_m;
    double amplitude;
  };
  std::vector<Point> scatterers;
  std::string class_name;
};

// Range bin width c / (2B).
double range_resolution(double bandwidth_hz);

// R(m) = sum_i a_i * exp(-j 4 pi f_m d_i cos(aspect) / c) + complex Gaussian
// noise with per-component standard deviation noise_std. Pure function of
// (model, params, aspect_deg, noise_std, seed).
FrequencyResponse synthesize_frequency_response(const ScattererModel& model,
                                                const RadarParams& params,
                                                double aspect_deg,
                                                double noise_std,
                                                std::uint64_t seed);

// Unitary IDFT: x(k) = (1/sqrt(M)) sum_m R(m) exp(j 2 pi m k / M).
RangeProfile idft(const FrequencyResponse& response);

// A(k) = |x(k)|.
AmplitudeProfile amplitude_profile(const RangeProfile& profile);

// A_norm = A / max(A). Throws ZeroSignalError on an all-zero profile.
AmplitudeProfile normalize(const AmplitudeProfile& amplitudes);

}  // namespace hrrp
