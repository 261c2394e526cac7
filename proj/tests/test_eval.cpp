#include <doctest.h>

#include <filesystem>
#include <map>
#include <set>

#include <json.hpp>

#include "hrrpbench/errors.hpp"
#include "hrrpbench/eval.hpp"
#include "test_support.hpp"

using namespace hrrp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

RunConfig quick_config(const std::string& tag) {
  RunConfig cfg;
  cfg.dataset_dir = testsupport::small_dataset_dir();
  cfg.out_dir = testsupport::scratch_dir("runs-" + tag);
  cfg.ways = 3;
  cfg.shots = 1;
  cfg.queries_per_class = 5;
  cfg.num_episodes = 3;
  cfg.seed = 7;
  cfg.backend_spec = "mock:nn";
  cfg.baseline_names = {"one_nn"};
  return cfg;
}

// Zeroes every latency_ms so byte comparisons ignore timing.
void normalize_latency(json& j) {
  if (j.is_object()) {
    for (auto& [key, value] : j.items()) {
      if (key == "latency_ms") {
        value = 0;
      } else {
        normalize_latency(value);
      }
    }
  } else if (j.is_array()) {
    for (auto& item : j) normalize_latency(item);
  }
}

std::string normalized_report(const fs::path& run_dir) {
  json j = json::parse(testsupport::read_file(run_dir / "report.json"));
  normalize_latency(j);
  return j.dump(2);
}

fs::path write_default_fixture(const std::string& tag, const std::string& answer) {
  auto dir = testsupport::scratch_dir("fixture-" + tag);
  testsupport::write_file(dir / "fixtures.json", json{{"*", answer}}.dump());
  return dir / "fixtures.json";
}

}  // namespace

TEST_SUITE_BEGIN("eval");

TEST_CASE("nearest-neighbor mock agrees with the one_nn baseline on every query") {
  RunConfig cfg = quick_config("nn-equiv");
  EvaluationReport report = run_experiment(cfg);

  const SystemSummary* llm = report.summary_for("llm");
  const SystemSummary* nn = report.summary_for("baseline:one_nn");
  REQUIRE(llm != nullptr);
  REQUIRE(nn != nullptr);
  CHECK(llm->acc.correct == nn->acc.correct);
  CHECK(llm->acc.total == nn->acc.total);

  std::map<std::pair<std::string, int>, std::string> llm_preds, nn_preds;
  for (const auto& r : report.records) {
    if (r.system == "llm") llm_preds[{r.episode_id, r.query_index}] = r.predicted;
    if (r.system == "baseline:one_nn") nn_preds[{r.episode_id, r.query_index}] = r.predicted;
  }
  REQUIRE(llm_preds.size() == nn_preds.size());
  for (const auto& [key, pred] : llm_preds) CHECK(pred == nn_preds.at(key));
}

TEST_CASE("every query of every episode yields exactly one record per system") {
  RunConfig cfg = quick_config("completeness");
  cfg.baseline_names = {"svm_hrrp", "svm_sc", "rf_sc", "one_nn"};
  EvaluationReport report = run_experiment(cfg);

  const std::size_t expected_queries = 15;  // 3 ways * 5 queries
  CHECK(report.episodes.size() == 3);
  for (const std::string system :
       {std::string("llm"), std::string("baseline:svm_hrrp"), std::string("baseline:svm_sc"),
        std::string("baseline:rf_sc"), std::string("baseline:one_nn")}) {
    for (const auto& ep : report.episodes) {
      std::set<int> seen;
      for (const auto& r : report.records) {
        if (r.system == system && r.episode_id == ep.episode_id) {
          CHECK(seen.insert(r.query_index).second);
        }
      }
      CHECK(seen.size() == expected_queries);
    }
  }
}

TEST_CASE("summary metrics recompute exactly from the stored confusion matrix") {
  RunConfig cfg = quick_config("recompute");
  EvaluationReport report = run_experiment(cfg);
  for (const auto& s : report.summaries) {
    Accuracy from_cm{s.confusion.correct(), s.confusion.total()};
    CHECK(from_cm.correct == s.acc.correct);
    CHECK(from_cm.total == s.acc.total);
    CHECK(f1_score(s.confusion, cfg.f1_mode) == s.f1);
  }
}

TEST_CASE("run artifacts land in the run directory") {
  RunConfig cfg = quick_config("artifacts");
  EvaluationReport report = run_experiment(cfg);
  CHECK(fs::exists(report.run_dir / "manifest.json"));
  CHECK(fs::exists(report.run_dir / "report.json"));
  CHECK(fs::exists(report.run_dir / "report.csv"));
  CHECK(fs::exists(report.run_dir / "report.md"));
  int episode_files = 0, prompt_files = 0, transcript_files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(report.run_dir / "episodes"))
    ++episode_files;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(report.run_dir / "prompts"))
    ++prompt_files;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(report.run_dir / "transcripts"))
    ++transcript_files;
  CHECK(episode_files == 3);
  CHECK(prompt_files == 3 * 15);
  CHECK(transcript_files == 3);

  SUBCASE("report regeneration is idempotent") {
    std::string csv = testsupport::read_file(report.run_dir / "report.csv");
    std::string md = testsupport::read_file(report.run_dir / "report.md");
    fs::remove(report.run_dir / "report.csv");
    fs::remove(report.run_dir / "report.md");
    regenerate_report_files(report.run_dir);
    CHECK(testsupport::read_file(report.run_dir / "report.csv") == csv);
    CHECK(testsupport::read_file(report.run_dir / "report.md") == md);
  }
}

TEST_CASE("identical configs reproduce report.json byte for byte modulo latency") {
  RunConfig cfg1 = quick_config("det-1");
  RunConfig cfg2 = quick_config("det-2");
  EvaluationReport r1 = run_experiment(cfg1);
  EvaluationReport r2 = run_experiment(cfg2);
  // out_dir differs but is not part of the config echo.
  CHECK(normalized_report(r1.run_dir) == normalized_report(r2.run_dir));
}

TEST_CASE("query fan-out does not change results or record order") {
  RunConfig sequential = quick_config("conc-1");
  RunConfig fanned = quick_config("conc-4");
  fanned.backend.max_concurrency = 4;
  EvaluationReport r1 = run_experiment(sequential);
  EvaluationReport r2 = run_experiment(fanned);

  json a = json::parse(testsupport::read_file(r1.run_dir / "report.json"));
  json b = json::parse(testsupport::read_file(r2.run_dir / "report.json"));
  normalize_latency(a);
  normalize_latency(b);
  // The concurrency knob itself is part of the config echo; records and
  // summaries must be identical.
  CHECK(a.at("records") == b.at("records"));
  CHECK(a.at("summary") == b.at("summary"));
  CHECK(a.at("episodes") == b.at("episodes"));
}

TEST_CASE("zero-shot runs are valid with a scripted backend") {
  RunConfig cfg = quick_config("zeroshot");
  cfg.shots = 0;
  cfg.backend_spec = "mock:script";
  cfg.fixtures_file = write_default_fixture("zeroshot", "ANSWER: class-00\nREASON: fixed");
  EvaluationReport report = run_experiment(cfg);
  const SystemSummary* llm = report.summary_for("llm");
  REQUIRE(llm != nullptr);
  CHECK(llm->acc.total == 45);
  CHECK(llm->backend_failures == 0);
  // No supports means no trainable baselines.
  CHECK(report.summary_for("baseline:one_nn") == nullptr);
}

TEST_CASE("failure ceiling aborts with a partial report preserved") {
  RunConfig cfg = quick_config("ceiling");
  cfg.num_episodes = 6;
  cfg.inject_failure_percent = 60;
  cfg.failure_ceiling = 0.20;
  EvaluationReport report = run_experiment(cfg);
  CHECK(report.failure_ceiling_exceeded);
  CHECK(report.episodes.size() < 6);  // stopped early
  CHECK(fs::exists(report.run_dir / "report.json"));
  json j = json::parse(testsupport::read_file(report.run_dir / "report.json"));
  CHECK(j.at("failure_ceiling_exceeded").get<bool>());
  const SystemSummary* llm = report.summary_for("llm");
  REQUIRE(llm != nullptr);
  CHECK(llm->backend_failures > 0);
}

TEST_CASE("failures under the ceiling do not abort") {
  RunConfig cfg = quick_config("under-ceiling");
  cfg.inject_failure_percent = 5;
  cfg.failure_ceiling = 0.50;
  EvaluationReport report = run_experiment(cfg);
  CHECK_FALSE(report.failure_ceiling_exceeded);
  CHECK(report.episodes.size() == 3);
}

TEST_CASE("ablation axes produce the required variant counts") {
  struct AxisCase {
    AblationAxis axis;
    std::size_t expected;
  };
  for (AxisCase axis_case : {AxisCase{AblationAxis::PromptComponents, 5u},
                             AxisCase{AblationAxis::ScDecimals, 3u},
                             AxisCase{AblationAxis::ScMax, 3u},
                             AxisCase{AblationAxis::KShots, 3u}}) {
    RunConfig base = quick_config(std::string("ablate-") + ablation_axis_name(axis_case.axis));
    base.num_episodes = 2;
    base.queries_per_class = 3;
    base.backend_spec = "mock:script";
    base.fixtures_file = write_default_fixture(
        std::string("ablate-") + ablation_axis_name(axis_case.axis), "ANSWER: class-01");
    base.baseline_names = {};
    auto reports = run_ablation(base, axis_case.axis);
    CHECK(reports.size() == axis_case.expected);

    // Episode manifests must be byte-identical across variants.
    std::vector<std::string> manifests;
    for (const auto& report : reports) {
      std::string all;
      for (const auto& ep : report.episodes) {
        all += testsupport::read_file(report.run_dir / "episodes" / (ep.episode_id + ".json"));
      }
      manifests.push_back(all);
      CHECK(report.config.ablation_axis == ablation_axis_name(axis_case.axis));
      CHECK(!report.config.ablation_variant.empty());
    }
    for (std::size_t i = 1; i < manifests.size(); ++i) CHECK(manifests[i] == manifests[0]);
  }
}

TEST_CASE("ablation variants differ only in the varied coordinate") {
  RunConfig base = quick_config("ablate-coord");
  base.num_episodes = 1;
  base.queries_per_class = 2;
  base.backend_spec = "mock:script";
  base.fixtures_file = write_default_fixture("ablate-coord", "ANSWER: class-01");
  base.baseline_names = {};

  auto reports = run_ablation(base, AblationAxis::ScDecimals);
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].config.prompt.amplitude_decimals == 1);
  CHECK(reports[1].config.prompt.amplitude_decimals == 3);
  CHECK(reports[2].config.prompt.amplitude_decimals == 5);

  // Everything else in the config echo matches.
  for (std::size_t i = 1; i < reports.size(); ++i) {
    json a = json::parse(testsupport::read_file(reports[0].run_dir / "report.json"));
    json b = json::parse(testsupport::read_file(reports[i].run_dir / "report.json"));
    json ca = a.at("config"), cb = b.at("config");
    ca["prompt"].erase("amplitude_decimals");
    cb["prompt"].erase("amplitude_decimals");
    ca.erase("ablation");
    cb.erase("ablation");
    CHECK(ca == cb);
  }
}

TEST_CASE("k-shot ablation reuses episodes sampled at the largest K") {
  RunConfig base = quick_config("ablate-k");
  base.num_episodes = 1;
  base.queries_per_class = 2;
  base.backend_spec = "mock:script";
  base.fixtures_file = write_default_fixture("ablate-k", "ANSWER: class-01");
  base.baseline_names = {"one_nn"};

  auto reports = run_ablation(base, AblationAxis::KShots);
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].config.shots == 0);
  CHECK(reports[1].config.shots == 1);
  CHECK(reports[2].config.shots == 5);
  for (const auto& report : reports) {
    // The stored manifest carries the full K=5 support pool.
    REQUIRE(report.episodes.size() == 1);
    CHECK(report.episodes[0].support.size() == 15);
  }
  // Zero-shot variant trains no baseline; the others do.
  CHECK(reports[0].summary_for("baseline:one_nn") == nullptr);
  CHECK(reports[1].summary_for("baseline:one_nn") != nullptr);
  CHECK(reports[2].summary_for("baseline:one_nn") != nullptr);
}

TEST_CASE("config validation happens before any work") {
  RunConfig cfg = quick_config("validate");
  cfg.ways = 1;
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);

  RunConfig cfg2 = quick_config("validate2");
  cfg2.backend_spec = "bogus";
  CHECK_THROWS_AS(run_experiment(cfg2), ConfigError);

  RunConfig cfg3 = quick_config("validate3");
  cfg3.failure_ceiling = 1.5;
  CHECK_THROWS_AS(run_experiment(cfg3), ConfigError);
}

TEST_SUITE_END();
