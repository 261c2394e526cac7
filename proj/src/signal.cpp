#include "hrrpbench/signal.hpp"

#include <algorithm>
#include <cmath>

#include "hrrpbench/errors.hpp"
#include "hrrpbench/rng.hpp"

namespace hrrp {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

RadarParams RadarParams::from_center(double center_hz, double bandwidth_hz,
                                     int num_samples, double pulse_duration_s) {
  RadarParams p;
  p.center_frequency_hz = center_hz;
  p.bandwidth_hz = bandwidth_hz;
  p.start_frequency_hz = center_hz - bandwidth_hz / 2.0;
  p.num_frequency_samples = num_samples;
  p.pulse_duration_s = pulse_duration_s;
  p.validate();
  return p;
}

double RadarParams::frequency_at(int m) const {
  return start_frequency_hz +
         static_cast<double>(m) * (bandwidth_hz / static_cast<double>(num_frequency_samples));
}

double RadarParams::window_m() const {
  return static_cast<double>(num_frequency_samples) * range_resolution(bandwidth_hz);
}

void RadarParams::validate() const {
  if (!(bandwidth_hz > 0.0)) throw DomainError("bandwidth must be positive");
  if (num_frequency_samples < 2) throw DomainError("need at least 2 frequency samples");
  if (!(center_frequency_hz > 0.0)) throw DomainError("center frequency must be positive");
  if (!(pulse_duration_s > 0.0)) throw DomainError("pulse duration must be positive");
}

double range_resolution(double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw DomainError("bandwidth must be positive");
  return kSpeedOfLight / (2.0 * bandwidth_hz);
}

FrequencyResponse synthesize_frequency_response(const ScattererModel& model,
                                                const RadarParams& params,
                                                double aspect_deg,
                                                double noise_std,
                                                std::uint64_t seed) {
  params.validate();
  if (model.scatterers.empty()) throw DomainError("scatterer model is empty");
  if (noise_std < 0.0) throw DomainError("noise_std must be non-negative");

  const int m_samples = params.num_frequency_samples;
  const double window = params.window_m();
  const double cos_aspect = std::cos(aspect_deg * kTwoPi / 360.0);

  std::vector<double> ranges(model.scatterers.size());
  for (std::size_t i = 0; i < model.scatterers.size(); ++i) {
    const auto& sc = model.scatterers[i];
    if (!(sc.amplitude > 0.0)) throw DomainError("scatterer amplitude must be positive");
    double d = sc.range_m * cos_aspect;
    if (d < 0.0 || d >= window)
      throw DomainError("scatterer range outside unambiguous window");
    ranges[i] = d;
  }

  FrequencyResponse response;
  response.params = params;
  response.samples.resize(m_samples);
  for (int m = 0; m < m_samples; ++m) {
    const double f_m = params.frequency_at(m);
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      double phase = -2.0 * kTwoPi * f_m * ranges[i] / kSpeedOfLight;
      acc += model.scatterers[i].amplitude *
             std::complex<double>(std::cos(phase), std::sin(phase));
    }
    response.samples[m] = acc;
  }

  if (noise_std > 0.0) {
    Rng rng(seed);
    for (auto& s : response.samples) {
      s += std::complex<double>(rng.normal(0.0, noise_std), rng.normal(0.0, noise_std));
    }
  }
  return response;
}

RangeProfile idft(const FrequencyResponse& response) {
  const std::size_t m_samples = response.samples.size();
  if (m_samples < 2) throw DomainError("response must have at least 2 samples");
  if (m_samples != static_cast<std::size_t>(response.params.num_frequency_samples))
    throw DomainError("response length disagrees with its radar parameters");

  // Twiddles exp(j 2 pi i / M) tabulated once; (m*k) mod M walked by
  // repeated addition to keep the inner loop free of multiplies.
  std::vector<std::complex<double>> twiddle(m_samples);
  for (std::size_t i = 0; i < m_samples; ++i) {
    double angle = kTwoPi * static_cast<double>(i) / static_cast<double>(m_samples);
    twiddle[i] = {std::cos(angle), std::sin(angle)};
  }

  RangeProfile profile;
  profile.samples.resize(m_samples);
  profile.range_resolution_m = range_resolution(response.params.bandwidth_hz);

  const double scale = 1.0 / std::sqrt(static_cast<double>(m_samples));
  for (std::size_t k = 0; k < m_samples; ++k) {
    std::complex<double> acc{0.0, 0.0};
    std::size_t idx = 0;
    for (std::size_t m = 0; m < m_samples; ++m) {
      acc += response.samples[m] * twiddle[idx];
      idx += k;
      if (idx >= m_samples) idx -= m_samples;
    }
    profile.samples[k] = acc * scale;
  }
  return profile;
}

AmplitudeProfile amplitude_profile(const RangeProfile& profile) {
  AmplitudeProfile amp;
  amp.values.resize(profile.samples.size());
  for (std::size_t k = 0; k < profile.samples.size(); ++k) {
    amp.values[k] = std::abs(profile.samples[k]);
  }
  amp.normalized = false;
  return amp;
}

AmplitudeProfile normalize(const AmplitudeProfile& amplitudes) {
  double max_value = 0.0;
  for (double v : amplitudes.values) max_value = std::max(max_value, v);
  if (!(max_value > 0.0)) throw ZeroSignalError("cannot normalize an all-zero amplitude profile");

  AmplitudeProfile out;
  out.values.resize(amplitudes.values.size());
  for (std::size_t k = 0; k < amplitudes.values.size(); ++k) {
    out.values[k] = amplitudes.values[k] / max_value;
  }
  out.normalized = true;
  return out;
}

}  // namespace hrrp
