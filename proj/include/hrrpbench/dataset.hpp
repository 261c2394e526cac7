#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hrrpbench/signal.hpp"

namespace hrrp {

// Synthetic multi-class dataset generation. Every draw is a pure function of
// (spec, seed); the salt scheme is:
//   class c scatterer model: derive_seed(seed, 0x10000 + c)
//   profile p of class c:    derive_seed(derive_seed(seed, 0x20000 + c), p)
struct DatasetSpec {
  std::string name = "synthetic";
  int num_classes = 3;
  int num_cells = 306;  // N_r = M
  int profiles_per_class = 40;
  std::uint64_t seed = 7;
  double center_frequency_hz = 10.0e9;
  double bandwidth_hz = 1.0e9;
  double noise_std = 0.02;
  double aspect_min_deg = -30.0;
  double aspect_max_deg = 30.0;
  // Per-profile multiplicative amplitude jitter, the desk-scale stand-in for
  // aspect-dependent scintillation of reflector strengths.
  double scintillation_std = 0.35;
  int min_scatterers = 6;
  int max_scatterers = 10;
  std::vector<std::string> class_names;  // generated ("class-00", ...) when empty

  void validate() const;  // throws ConfigError
};

struct DatasetManifest {
  std::string name;
  std::vector<std::string> classes;
  int n_r = 0;
  double range_resolution_m = 0.0;
  std::uint64_t seed = 0;
  std::string generator_version;
  int num_profiles = 0;
  double center_frequency_hz = 0.0;
  double bandwidth_hz = 0.0;
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<RangeProfile> profiles;  // order = profiles.jsonl line order

  // Line numbers (0-based) of the profiles labeled with `label`.
  std::vector<int> indices_for_class(const std::string& label) const;
};

Dataset generate_dataset(const DatasetSpec& spec);

// One directory per dataset: manifest.json + profiles.jsonl (one record per
// line: label, aspect_deg, real[], imag[]; UTF-8, LF).
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

// Rejects records whose array lengths disagree with the manifest.
Dataset load_dataset(const std::filesystem::path& dir);

// Stable content fingerprint used to key episode sampling to the dataset.
std::uint64_t dataset_fingerprint(const Dataset& dataset);

}  // namespace hrrp
