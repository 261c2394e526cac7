#pragma once

// Brute-force definitional implementations, independent of the library code
// paths they check. Kept deliberately naive.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

// Enumerates maximal runs of equal values; a run is a maximum iff both
// neighbors outside the run exist and are strictly smaller. Reports the
// floor-midpoint of the run.
inline std::vector<int> local_maxima_bruteforce(const std::vector<double>& a) {
  std::vector<int> maxima;
  const int n = static_cast<int>(a.size());
  int start = 0;
  while (start < n) {
    int end = start;
    while (end + 1 < n && a[end + 1] == a[start]) ++end;
    if (start > 0 && end < n - 1 && a[start - 1] < a[start] && a[end + 1] < a[start]) {
      maxima.push_back((start + end) / 2);
    }
    start = end + 1;
  }
  return maxima;
}

// Collects every value on each side until a strictly higher one, then takes
// the minimum as that side's base.
inline double prominence_bruteforce(const std::vector<double>& a, int peak) {
  const double height = a[peak];
  std::vector<double> left, right;
  for (int i = peak - 1; i >= 0 && a[i] <= height; --i) left.push_back(a[i]);
  for (int i = peak + 1; i < static_cast<int>(a.size()) && a[i] <= height; ++i)
    right.push_back(a[i]);
  double left_base = left.empty() ? height : *std::min_element(left.begin(), left.end());
  double right_base = right.empty() ? height : *std::min_element(right.begin(), right.end());
  return height - std::max(left_base, right_base);
}

// Threshold filter plus greedy acceptance in decreasing-amplitude order
// (ties: lower index), strict separation.
inline std::vector<int> select_peaks_bruteforce(const std::vector<double>& a, double tau_a,
                                                double tau_p, int d_th) {
  std::vector<int> candidates;
  for (int k : local_maxima_bruteforce(a)) {
    if (a[k] > tau_a && prominence_bruteforce(a, k) > tau_p) candidates.push_back(k);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&a](int lhs, int rhs) { return a[lhs] > a[rhs]; });
  std::vector<int> accepted;
  for (int k : candidates) {
    bool ok = true;
    for (int j : accepted) ok = ok && std::abs(k - j) > d_th;
    if (ok) accepted.push_back(k);
  }
  return accepted;
}

// Naive unitary forward DFT, term-by-term with std::polar.
inline std::vector<std::complex<double>> forward_dft_unitary(
    const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  const double two_pi = 6.283185307179586476925286766559;
  for (std::size_t m = 0; m < n; ++m) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      acc += x[k] * std::polar(1.0, -two_pi * static_cast<double>(m * k) / static_cast<double>(n));
    }
    out[m] = acc / std::sqrt(static_cast<double>(n));
  }
  return out;
}

inline double l2_norm(const std::vector<std::complex<double>>& v) {
  double acc = 0.0;
  for (const auto& s : v) acc += std::norm(s);
  return std::sqrt(acc);
}

}  // namespace oracle
