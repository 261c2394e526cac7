#include <doctest.h>

#include <set>

#include "hrrpbench/errors.hpp"
#include "hrrpbench/fewshot.hpp"
#include "hrrpbench/rng.hpp"
#include "test_support.hpp"

using namespace hrrp;

TEST_SUITE_BEGIN("fewshot");

TEST_CASE("a 3-way 1-shot episode with q=30 has 3 supports and 90 queries") {
  const Dataset& dataset = testsupport::small_dataset();
  Episode ep = sample_episode(dataset, 3, 1, 30, 7);
  CHECK(ep.classes.size() == 3);
  CHECK(ep.support.size() == 3);
  CHECK(ep.queries.size() == 90);
  CHECK(ep.shots_per_class() == 1);
  CHECK(ep.queries_per_class() == 30);
}

TEST_CASE("zero-shot episodes are valid") {
  const Dataset& dataset = testsupport::small_dataset();
  Episode ep = sample_episode(dataset, 3, 0, 10, 7);
  CHECK(ep.support.empty());
  CHECK(ep.queries.size() == 30);
}

TEST_CASE("insufficient population raises SamplingError naming the class") {
  const Dataset& dataset = testsupport::small_dataset();  // 40 per class
  try {
    sample_episode(dataset, 3, 20, 30, 7);
    FAIL("expected SamplingError");
  } catch (const SamplingError& ex) {
    std::string msg = ex.what();
    bool names_class = false;
    for (const auto& cls : dataset.manifest.classes) {
      if (msg.find(cls) != std::string::npos) names_class = true;
    }
    CHECK(names_class);
  }
  CHECK_THROWS_AS(sample_episode(dataset, 4, 1, 1, 7), SamplingError);
}

TEST_CASE("support and query sets are disjoint and stratified") {
  const Dataset& dataset = testsupport::small_dataset();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Episode ep = sample_episode(dataset, 3, 5, 10, seed);
    std::set<int> support_lines, query_lines;
    for (const auto& r : ep.support) support_lines.insert(r.line);
    for (const auto& r : ep.queries) query_lines.insert(r.line);
    CHECK(support_lines.size() == ep.support.size());  // no duplicates
    CHECK(query_lines.size() == ep.queries.size());
    for (int line : support_lines) CHECK(query_lines.count(line) == 0);

    for (const auto& cls : ep.classes) {
      int s = 0, q = 0;
      for (const auto& r : ep.support) s += r.label == cls;
      for (const auto& r : ep.queries) q += r.label == cls;
      CHECK(s == 5);
      CHECK(q == 10);
    }

    // Labels reflect the dataset content.
    for (const auto& r : ep.support)
      CHECK(dataset.profiles[static_cast<std::size_t>(r.line)].label == r.label);
  }
}

TEST_CASE("support order is class-major in episode class order") {
  const Dataset& dataset = testsupport::small_dataset();
  Episode ep = sample_episode(dataset, 3, 4, 5, 99);
  for (std::size_t c = 0; c < ep.classes.size(); ++c) {
    for (int s = 0; s < 4; ++s) {
      CHECK(ep.support[c * 4 + static_cast<std::size_t>(s)].label == ep.classes[c]);
    }
  }
}

TEST_CASE("identical inputs give byte-identical episode manifests") {
  const Dataset& dataset = testsupport::small_dataset();
  Episode a = sample_episode(dataset, 3, 1, 30, 7);
  Episode b = sample_episode(dataset, 3, 1, 30, 7);
  CHECK(episode_to_json_text(a, "ds") == episode_to_json_text(b, "ds"));

  Episode c = sample_episode(dataset, 3, 1, 30, 8);
  CHECK(episode_to_json_text(a, "ds") != episode_to_json_text(c, "ds"));
}

TEST_CASE("episode manifests round-trip through files") {
  const Dataset& dataset = testsupport::small_dataset();
  Episode ep = sample_episode(dataset, 3, 2, 4, 11);
  auto dir = testsupport::scratch_dir("episode-io");
  save_episode(ep, "some/dataset", dir / "ep.json");
  Episode loaded = load_episode(dir / "ep.json");
  CHECK(loaded.episode_id == ep.episode_id);
  CHECK(loaded.seed == ep.seed);
  CHECK(loaded.classes == ep.classes);
  REQUIRE(loaded.support.size() == ep.support.size());
  for (std::size_t i = 0; i < ep.support.size(); ++i) {
    CHECK(loaded.support[i].line == ep.support[i].line);
    CHECK(loaded.support[i].label == ep.support[i].label);
  }
  CHECK(loaded.queries.size() == ep.queries.size());
}

TEST_CASE("derived seeds give distinct episodes on a 12-class dataset") {
  DatasetSpec spec;
  spec.num_classes = 12;
  spec.num_cells = 64;
  spec.profiles_per_class = 4;
  spec.seed = 31;
  Dataset dataset = generate_dataset(spec);

  std::set<std::string> manifests;
  for (std::uint64_t i = 0; i < 10; ++i) {
    Episode ep = sample_episode(dataset, 3, 1, 1, derive_seed(100, i));
    manifests.insert(episode_to_json_text(ep, "ds"));
  }
  CHECK(manifests.size() == 10);
}

TEST_CASE("batches are deterministic and episodes within differ") {
  const Dataset& dataset = testsupport::small_dataset();
  auto batch1 = sample_batch(dataset, 3, 1, 5, 10, 7);
  auto batch2 = sample_batch(dataset, 3, 1, 5, 10, 7);
  REQUIRE(batch1.size() == 10);
  for (std::size_t i = 0; i < batch1.size(); ++i) {
    CHECK(episode_to_json_text(batch1[i], "ds") == episode_to_json_text(batch2[i], "ds"));
  }

  CHECK(sample_batch(dataset, 3, 1, 5, 0, 7).empty());

  // Distinct derived seeds should give distinct query draws.
  std::set<std::string> manifests;
  for (const auto& ep : batch1) manifests.insert(episode_to_json_text(ep, "ds"));
  CHECK(manifests.size() == batch1.size());
}

TEST_SUITE_END();
