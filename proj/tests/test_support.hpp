#pragma once

// Shared helpers for the test suites: workspace paths, scratch directories,
// and small canned datasets.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hrrpbench/dataset.hpp"

namespace testsupport {

inline std::filesystem::path source_dir() { return HRRP_SOURCE_DIR; }

inline std::filesystem::path golden_dir() { return source_dir() / "tests" / "golden"; }

// Fresh scratch directory under the system temp root.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("hrrpbench-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
}

// Small 3-class dataset, generated once per process.
inline const hrrp::Dataset& small_dataset() {
  static const hrrp::Dataset dataset = [] {
    hrrp::DatasetSpec spec;
    spec.name = "test-3c";
    spec.num_classes = 3;
    spec.num_cells = 306;
    spec.profiles_per_class = 40;
    spec.seed = 42;
    return hrrp::generate_dataset(spec);
  }();
  return dataset;
}

// The same dataset saved to disk once per process (for run_experiment/CLI).
inline const std::filesystem::path& small_dataset_dir() {
  static const std::filesystem::path dir = [] {
    auto d = scratch_dir("dataset-3c");
    hrrp::save_dataset(small_dataset(), d);
    return d;
  }();
  return dir;
}

}  // namespace testsupport
