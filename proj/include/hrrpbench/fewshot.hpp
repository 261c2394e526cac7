#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hrrpbench/dataset.hpp"

namespace hrrp {

// A profile reference: 0-based line number in the dataset's profiles.jsonl
// plus the label recorded there.
struct ProfileRef {
  int line;
  std::string label;
};

// One N-way K-shot task. Support and query references are disjoint and
// class-major: all of class[0]'s entries first, then class[1]'s, ...
struct Episode {
  std::string episode_id;
  std::uint64_t seed = 0;
  std::vector<std::string> classes;
  std::vector<ProfileRef> support;  // size ways * shots
  std::vector<ProfileRef> queries;  // size ways * queries_per_class

  int shots_per_class() const;
  int queries_per_class() const;
};

// A parsed model response for one query. UNPARSEABLE is a value, not an
// error; it scores as incorrect.
struct Prediction {
  std::string episode_id;
  int query_index = 0;
  std::string predicted_label;
  std::string explanation;
  long latency_ms = 0;
};

// Classes drawn without replacement, then per class k+q distinct profiles;
// all draws come from Rng(derive_seed(seed, dataset_fingerprint)). Equal
// arguments yield identical episodes. k_shots = 0 is valid (zero-shot).
Episode sample_episode(const Dataset& dataset, int n_ways, int k_shots, int q_queries,
                       std::uint64_t seed);

// Episode i uses derive_seed(seed, i).
std::vector<Episode> sample_batch(const Dataset& dataset, int n_ways, int k_shots,
                                  int q_queries, int num_episodes, std::uint64_t seed);

// Manifest round-trip; byte-identical for identical episodes.
std::string episode_to_json_text(const Episode& episode, const std::string& dataset_path);
Episode episode_from_json_text(const std::string& text);
void save_episode(const Episode& episode, const std::string& dataset_path,
                  const std::filesystem::path& file);
Episode load_episode(const std::filesystem::path& file);

}  // namespace hrrp
