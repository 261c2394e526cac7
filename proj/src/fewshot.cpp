#include "hrrpbench/fewshot.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "hrrpbench/errors.hpp"
#include "hrrpbench/rng.hpp"

namespace hrrp {

using nlohmann::json;

int Episode::shots_per_class() const {
  return classes.empty() ? 0 : static_cast<int>(support.size() / classes.size());
}

int Episode::queries_per_class() const {
  return classes.empty() ? 0 : static_cast<int>(queries.size() / classes.size());
}

Episode sample_episode(const Dataset& dataset, int n_ways, int k_shots, int q_queries,
                       std::uint64_t seed) {
  if (n_ways < 2) throw SamplingError("need at least 2 ways");
  if (k_shots < 0) throw SamplingError("shots must be non-negative");
  if (q_queries < 1) throw SamplingError("need at least 1 query per class");
  if (static_cast<int>(dataset.manifest.classes.size()) < n_ways)
    throw SamplingError("dataset has fewer classes than requested ways");

  const std::uint64_t mixed = derive_seed(seed, dataset_fingerprint(dataset));
  Rng rng(mixed);

  std::vector<std::string> roster = dataset.manifest.classes;
  rng.shuffle(roster);
  roster.resize(static_cast<std::size_t>(n_ways));

  Episode episode;
  episode.seed = seed;
  char id[32];
  std::snprintf(id, sizeof(id), "ep-%016llx", static_cast<unsigned long long>(mixed));
  episode.episode_id = id;
  episode.classes = roster;

  std::vector<std::vector<ProfileRef>> support_by_class(roster.size());
  for (std::size_t c = 0; c < roster.size(); ++c) {
    std::vector<int> pool = dataset.indices_for_class(roster[c]);
    if (static_cast<int>(pool.size()) < k_shots + q_queries) {
      throw SamplingError("class '" + roster[c] + "' has " + std::to_string(pool.size()) +
                          " profiles, need " + std::to_string(k_shots + q_queries));
    }
    rng.shuffle(pool);
    for (int i = 0; i < k_shots; ++i)
      support_by_class[c].push_back({pool[i], roster[c]});
    for (int i = 0; i < q_queries; ++i)
      episode.queries.push_back({pool[k_shots + i], roster[c]});
  }
  for (const auto& group : support_by_class)
    episode.support.insert(episode.support.end(), group.begin(), group.end());
  return episode;
}

std::vector<Episode> sample_batch(const Dataset& dataset, int n_ways, int k_shots,
                                  int q_queries, int num_episodes, std::uint64_t seed) {
  if (num_episodes < 0) throw SamplingError("num_episodes must be non-negative");
  std::vector<Episode> episodes;
  episodes.reserve(static_cast<std::size_t>(num_episodes));
  for (int i = 0; i < num_episodes; ++i) {
    Episode e = sample_episode(dataset, n_ways, k_shots, q_queries,
                               derive_seed(seed, static_cast<std::uint64_t>(i)));
    char id[48];
    std::snprintf(id, sizeof(id), "ep-%03d-%s", i, e.episode_id.c_str() + 3);
    e.episode_id = id;
    episodes.push_back(std::move(e));
  }
  return episodes;
}

namespace {

json refs_to_json(const std::vector<ProfileRef>& refs) {
  json arr = json::array();
  for (const auto& r : refs) arr.push_back(json{{"line", r.line}, {"label", r.label}});
  return arr;
}

std::vector<ProfileRef> refs_from_json(const json& arr) {
  std::vector<ProfileRef> refs;
  for (const auto& j : arr)
    refs.push_back({j.at("line").get<int>(), j.at("label").get<std::string>()});
  return refs;
}

}  // namespace

std::string episode_to_json_text(const Episode& episode, const std::string& dataset_path) {
  json j{{"episode_id", episode.episode_id},
         {"seed", episode.seed},
         {"dataset_path", dataset_path},
         {"classes", episode.classes},
         {"support", refs_to_json(episode.support)},
         {"queries", refs_to_json(episode.queries)}};
  return j.dump(2) + "\n";
}

Episode episode_from_json_text(const std::string& text) {
  json j = json::parse(text);
  Episode episode;
  episode.episode_id = j.at("episode_id").get<std::string>();
  episode.seed = j.at("seed").get<std::uint64_t>();
  episode.classes = j.at("classes").get<std::vector<std::string>>();
  episode.support = refs_from_json(j.at("support"));
  episode.queries = refs_from_json(j.at("queries"));
  return episode;
}

void save_episode(const Episode& episode, const std::string& dataset_path,
                  const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write episode manifest " + file.string());
  out << episode_to_json_text(episode, dataset_path);
}

Episode load_episode(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read episode manifest " + file.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return episode_from_json_text(text);
}

}  // namespace hrrp
