#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hrrpbench/signal.hpp"

namespace hrrp {

// Peak qualification thresholds. All comparisons are strict; min separation
// is expressed in bins.
struct PeakConfig {
  double amplitude_threshold = 0.05;
  double prominence_threshold = 0.15;
  int min_separation_bins = 5;
  int max_centers = 10;

  void validate() const;  // throws ConfigError

  // Convenience for configs given in meters.
  static int separation_bins_from_meters(double separation_m, double range_resolution_m);
};

struct ScatteringCenter {
  int position_index;
  double amplitude;  // post-normalization, in (0, 1]
};

// Dominant centers in non-increasing amplitude order (ties impossible after
// the index tie-break applied at selection).
struct ScatteringCenterSet {
  std::vector<ScatteringCenter> centers;

  bool empty() const { return centers.empty(); }
  std::size_t size() const { return centers.size(); }
};

// Indices strictly greater than both neighbors. A flat plateau of equal
// values bounded by strictly smaller neighbors reports the single index
// floor((left_edge + right_edge) / 2). Endpoints are never maxima.
// Requires a normalized profile of length >= 3.
std::vector<int> local_maxima(const AmplitudeProfile& amplitudes);

// Topographic prominence: scan outward from the peak on each side until a
// strictly higher value or the signal edge; each side's base is the minimum
// over its scan interval; prominence = height - max(left base, right base).
// The peak must be a local maximum per local_maxima.
double prominence(const AmplitudeProfile& amplitudes, int peak);

// Candidates are local maxima exceeding both thresholds; they are visited in
// decreasing-amplitude order (ties: lower index first) and accepted iff
// strictly farther than min_separation_bins from every accepted peak.
// Returned in acceptance order.
std::vector<int> select_peaks(const AmplitudeProfile& amplitudes, const PeakConfig& cfg);

// amplitude_profile -> normalize -> select_peaks, capped at max_centers.
ScatteringCenterSet extract_scattering_centers(const RangeProfile& profile,
                                               const PeakConfig& cfg);

// [{'position_index': 137, 'amplitude': 1.000}, ...]; amplitudes printed
// with exactly `amplitude_decimals` decimals, round-half-to-even.
std::string serialize(const ScatteringCenterSet& centers, int amplitude_decimals);

// Inverse of serialize up to amplitude rounding. Whitespace-tolerant; accepts
// the legacy key spelling "ampilitude". Throws ParseError with byte offset.
ScatteringCenterSet parse_serialized(std::string_view text);

}  // namespace hrrp
