#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hrrpbench/baselines.hpp"
#include "hrrpbench/fewshot.hpp"
#include "hrrpbench/llm.hpp"
#include "hrrpbench/metrics.hpp"
#include "hrrpbench/prompt.hpp"
#include "hrrpbench/scatter.hpp"

namespace hrrp {

enum class AblationAxis { PromptComponents, ScDecimals, ScMax, KShots };

AblationAxis parse_ablation_axis(const std::string& name);
const char* ablation_axis_name(AblationAxis axis);

// A classical reference system: classifier kind plus feature scheme.
struct BaselineSpec {
  std::string name;  // svm_hrrp | svm_sc | rf_sc | one_nn
  ClassifierKind kind;
  FeatureScheme scheme;
};

BaselineSpec parse_baseline(const std::string& name);
std::vector<BaselineSpec> default_baselines();

struct RunConfig {
  std::filesystem::path dataset_dir;
  std::filesystem::path out_dir = "runs";
  std::string run_id;  // derived from seed and config hash when empty

  int ways = 3;
  int shots = 1;
  int queries_per_class = 30;
  int num_episodes = 10;
  std::uint64_t seed = 7;

  std::string backend_spec = "mock:nn";  // mock:nn | mock:script | api
  BackendConfig backend;
  PromptConfig prompt;
  PeakConfig peak;

  std::vector<std::string> baseline_names = {"svm_hrrp", "svm_sc", "rf_sc", "one_nn"};
  BaselineHyperParams baseline_params;

  double failure_ceiling = 0.20;  // abort when backend failures exceed this fraction
  F1Mode f1_mode = F1Mode::Macro;
  int inject_failure_percent = 0;  // testing aid; 0 disables
  std::filesystem::path fixtures_file;  // for mock:script
  std::filesystem::path templates_dir;  // empty -> embedded defaults
  bool log_prompts = true;

  // Ablation coordinates (metadata; empty outside run_ablation).
  std::string ablation_axis;
  std::string ablation_variant;

  void validate() const;  // throws ConfigError before any I/O or network
};

struct QueryRecord {
  std::string system;  // "llm" or "baseline:<name>"
  std::string episode_id;
  int query_index = 0;
  std::string truth;
  std::string predicted;
  std::string explanation;
  long latency_ms = 0;
  bool backend_error = false;
};

struct SystemSummary {
  std::string system;
  std::string display_name;
  Accuracy acc;
  double f1 = 0.0;
  std::vector<double> per_class_f1;
  long unparseable = 0;
  long backend_failures = 0;
  ConfusionMatrix confusion;  // rows: classes seen in processed episodes
  std::vector<double> per_episode_accuracy;
  double accuracy_stddev = 0.0;
};

struct EvaluationReport {
  RunConfig config;
  std::string dataset_name;
  std::vector<std::string> dataset_classes;
  int n_r = 0;
  std::vector<Episode> episodes;  // processed episodes (partial when aborted)
  std::vector<QueryRecord> records;
  std::vector<SystemSummary> summaries;
  bool failure_ceiling_exceeded = false;
  std::uint64_t template_hash = 0;
  std::filesystem::path run_dir;

  const SystemSummary* summary_for(const std::string& system) const;
};

// Runs episodes x (backend + baselines), writes the run directory
// (manifest.json, report.json, report.csv, report.md, prompts/, transcripts/,
// episodes/), and returns the report. Backend failures are recorded per query
// and scored incorrect; the run stops early only when their fraction exceeds
// the ceiling (the partial report is still written).
EvaluationReport run_experiment(const RunConfig& cfg);

// As above with an injected backend; preset_episodes (when given) replaces
// sampling, enabling episode reuse across ablation variants.
EvaluationReport run_experiment(const RunConfig& cfg, Backend& backend,
                                const std::vector<Episode>* preset_episodes = nullptr);

// prompt_components -> {full, wo_system_instruction, wo_background,
// wo_candidate_list, wo_output_format}; sc_decimals -> {1,3,5};
// sc_max -> {3,10,15}; k_shots -> {0,1,5}. Episodes are sampled once per
// axis and reused by every variant (the k_shots axis samples at the largest
// K and each variant uses the first K supports per class).
std::vector<EvaluationReport> run_ablation(const RunConfig& base, AblationAxis axis);

// Serialized forms. report_json_text is byte-stable for identical runs up to
// latency fields; timestamps live only in manifest.json.
std::string report_json_text(const EvaluationReport& report);
std::string report_csv_text(const EvaluationReport& report);
std::string report_markdown_text(const EvaluationReport& report);

// Rewrites report.csv and report.md from an existing report.json.
void regenerate_report_files(const std::filesystem::path& run_dir);

std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace hrrp
