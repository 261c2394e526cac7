#include "hrrpbench/scatter.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "hrrpbench/errors.hpp"

namespace hrrp {

void PeakConfig::validate() const {
  if (amplitude_threshold < 0.0 || amplitude_threshold > 1.0)
    throw ConfigError("amplitude_threshold must be in [0, 1]");
  if (prominence_threshold < 0.0 || prominence_threshold > 1.0)
    throw ConfigError("prominence_threshold must be in [0, 1]");
  if (min_separation_bins < 1) throw ConfigError("min_separation_bins must be >= 1");
  if (max_centers < 1) throw ConfigError("max_centers must be >= 1");
}

int PeakConfig::separation_bins_from_meters(double separation_m, double range_resolution_m) {
  if (!(range_resolution_m > 0.0)) throw ConfigError("range resolution must be positive");
  int bins = static_cast<int>(std::lround(separation_m / range_resolution_m));
  return std::max(1, bins);
}

std::vector<int> local_maxima(const AmplitudeProfile& amplitudes) {
  const auto& a = amplitudes.values;
  const std::size_t n = a.size();
  if (n < 3) throw DomainError("profile too short for peak analysis");
  if (!amplitudes.normalized) throw DomainError("peak analysis expects a normalized profile");

  std::vector<int> maxima;
  std::size_t i = 1;
  while (i + 1 <= n - 1) {
    if (a[i] > a[i - 1]) {
      std::size_t j = i;
      while (j + 1 <= n - 1 && a[j + 1] == a[i]) ++j;
      if (j <= n - 2 && a[j + 1] < a[i]) {
        maxima.push_back(static_cast<int>((i + j) / 2));
      }
      i = j + 1;
    } else {
      ++i;
    }
  }
  return maxima;
}

double prominence(const AmplitudeProfile& amplitudes, int peak) {
  const auto& a = amplitudes.values;
  auto maxima = local_maxima(amplitudes);
  if (!std::binary_search(maxima.begin(), maxima.end(), peak))
    throw DomainError("prominence requires a local maximum");

  const double height = a[peak];
  double left_base = height;
  for (int i = peak - 1; i >= 0; --i) {
    if (a[i] > height) break;
    left_base = std::min(left_base, a[i]);
  }
  double right_base = height;
  for (int i = peak + 1; i < static_cast<int>(a.size()); ++i) {
    if (a[i] > height) break;
    right_base = std::min(right_base, a[i]);
  }
  return height - std::max(left_base, right_base);
}

std::vector<int> select_peaks(const AmplitudeProfile& amplitudes, const PeakConfig& cfg) {
  cfg.validate();
  const auto& a = amplitudes.values;

  std::vector<int> candidates;
  for (int k : local_maxima(amplitudes)) {
    if (a[k] > cfg.amplitude_threshold && prominence(amplitudes, k) > cfg.prominence_threshold)
      candidates.push_back(k);
  }
  std::sort(candidates.begin(), candidates.end(), [&a](int lhs, int rhs) {
    if (a[lhs] != a[rhs]) return a[lhs] > a[rhs];
    return lhs < rhs;
  });

  std::vector<int> accepted;
  for (int k : candidates) {
    bool clear = true;
    for (int j : accepted) {
      if (std::abs(k - j) <= cfg.min_separation_bins) {
        clear = false;
        break;
      }
    }
    if (clear) accepted.push_back(k);
  }
  return accepted;
}

ScatteringCenterSet extract_scattering_centers(const RangeProfile& profile,
                                               const PeakConfig& cfg) {
  AmplitudeProfile norm = normalize(amplitude_profile(profile));
  std::vector<int> peaks = select_peaks(norm, cfg);
  if (peaks.size() > static_cast<std::size_t>(cfg.max_centers))
    peaks.resize(static_cast<std::size_t>(cfg.max_centers));

  ScatteringCenterSet set;
  set.centers.reserve(peaks.size());
  for (int k : peaks) set.centers.push_back({k, norm.values[k]});
  return set;
}

std::string serialize(const ScatteringCenterSet& centers, int amplitude_decimals) {
  if (amplitude_decimals < 1 || amplitude_decimals > 6)
    throw ConfigError("amplitude_decimals must be in 1..6");

  std::string out = "[";
  bool first = true;
  char buf[64];
  for (const auto& c : centers.centers) {
    if (!first) out += ", ";
    first = false;
    // %.*f rounds the binary value to nearest, ties to even.
    std::snprintf(buf, sizeof(buf), "{'position_index': %d, 'amplitude': %.*f}",
                  c.position_index, amplitude_decimals, c.amplitude);
    out += buf;
  }
  out += "]";
  return out;
}

namespace {

// Minimal recursive-descent reader for the serialize grammar, tolerant of
// arbitrary whitespace and of both key spellings for amplitude.
class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  ScatteringCenterSet parse() {
    ScatteringCenterSet set;
    skip_ws();
    expect('[');
    skip_ws();
    if (peek() == ']') {
      ++pos_;
      finish();
      return set;
    }
    for (;;) {
      set.centers.push_back(parse_record());
      skip_ws();
      char c = next();
      if (c == ']') break;
      if (c != ',') fail("expected ',' or ']'", pos_ - 1);
      skip_ws();
    }
    finish();
    return set;
  }

 private:
  ScatteringCenter parse_record() {
    skip_ws();
    expect('{');
    bool have_position = false, have_amplitude = false;
    ScatteringCenter center{0, 0.0};
    for (;;) {
      skip_ws();
      std::string key = parse_quoted();
      skip_ws();
      expect(':');
      skip_ws();
      if (key == "position_index") {
        if (have_position) fail("duplicate position_index", pos_);
        center.position_index = static_cast<int>(parse_int());
        have_position = true;
      } else if (key == "amplitude" || key == "ampilitude") {
        if (have_amplitude) fail("duplicate amplitude", pos_);
        center.amplitude = parse_number();
        have_amplitude = true;
      } else {
        fail("unknown key '" + key + "'", pos_);
      }
      skip_ws();
      char c = next();
      if (c == '}') break;
      if (c != ',') fail("expected ',' or '}'", pos_ - 1);
    }
    if (!have_position) fail("record missing position_index", pos_);
    if (!have_amplitude) fail("record missing amplitude", pos_);
    return center;
  }

  std::string parse_quoted() {
    std::size_t start = pos_;
    char quote = next();
    if (quote != '\'' && quote != '"') fail("expected quoted key", start);
    std::string out;
    for (;;) {
      if (pos_ >= text_.size()) fail("unterminated key", start);
      char c = text_[pos_++];
      if (c == quote) break;
      out.push_back(c);
    }
    return out;
  }

  long parse_int() {
    std::size_t start = pos_;
    bool neg = false;
    if (peek() == '-') {
      neg = true;
      ++pos_;
    }
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      fail("expected integer", start);
    long value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_++] - '0');
    }
    return neg ? -value : value;
  }

  double parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
            text_[pos_] == '-' || text_[pos_] == '+' || text_[pos_] == 'e' || text_[pos_] == 'E'))
      ++pos_;
    if (pos_ == start) fail("expected number", start);
    std::string token(text_.substr(start, pos_ - start));
    char* end = nullptr;
    double value = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) fail("malformed number", start);
    return value;
  }

  void finish() {
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters after ']'", pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  char next() {
    if (pos_ >= text_.size()) fail("unexpected end of input", pos_);
    return text_[pos_++];
  }

  void expect(char c) {
    if (next() != c) fail(std::string("expected '") + c + "'", pos_ - 1);
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, at);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

ScatteringCenterSet parse_serialized(std::string_view text) {
  return Reader(text).parse();
}

}  // namespace hrrp
