#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hrrpbench/dataset.hpp"
#include "hrrpbench/errors.hpp"
#include "hrrpbench/eval.hpp"
#include "hrrpbench/fewshot.hpp"
#include "hrrpbench/prompt.hpp"
#include "hrrpbench/scatter.hpp"
#include "hrrpbench/version.hpp"

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& kind, const std::string& message) {
  json err{{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
  std::exit(1);
}

// Options shared by extract/prompt/run/ablate.
struct PeakOpts {
  double amplitude_threshold = 0.05;
  double prominence = 0.15;
  int min_distance = 5;
  double min_distance_m = 0.0;  // 0 = unset; converted via the dataset's delta-R
  int max_centers = 10;

  void attach(CLI::App* cmd) {
    cmd->add_option("--amplitude-threshold", amplitude_threshold,
                    "Peak amplitude threshold tau_A (strict)")
        ->capture_default_str();
    cmd->add_option("--prominence", prominence, "Peak prominence threshold tau_p (strict)")
        ->capture_default_str();
    cmd->add_option("--min-distance", min_distance,
                    "Minimum separation between accepted peaks, in bins (strict)")
        ->capture_default_str();
    cmd->add_option("--min-distance-m", min_distance_m,
                    "Minimum peak separation in meters; converted to bins via the "
                    "dataset's range resolution (overrides --min-distance)");
    cmd->add_option("--max-centers", max_centers, "Maximum scattering centers kept")
        ->capture_default_str();
  }

  // range_resolution_m <= 0 means "unknown" (e.g. bare JSONL input).
  hrrp::PeakConfig config(double range_resolution_m = 0.0) const {
    hrrp::PeakConfig cfg;
    cfg.amplitude_threshold = amplitude_threshold;
    cfg.prominence_threshold = prominence;
    cfg.min_separation_bins = min_distance;
    if (min_distance_m > 0.0) {
      if (range_resolution_m <= 0.0) {
        throw hrrp::ConfigError(
            "--min-distance-m needs a dataset manifest to supply the range resolution");
      }
      cfg.min_separation_bins =
          hrrp::PeakConfig::separation_bins_from_meters(min_distance_m, range_resolution_m);
    }
    cfg.max_centers = max_centers;
    return cfg;
  }
};

struct PromptOpts {
  bool no_system_instruction = false;
  bool no_background = false;
  bool no_candidate_list = false;
  bool no_output_format = false;
  bool no_reasoning_steps = false;
  int decimals = 3;
  std::string sc_order = "amplitude";

  void attach(CLI::App* cmd) {
    cmd->add_flag("--no-system-instruction", no_system_instruction,
                  "Drop the system-instruction section");
    cmd->add_flag("--no-background", no_background, "Drop the background section");
    cmd->add_flag("--no-candidate-list", no_candidate_list, "Drop the candidate-list section");
    cmd->add_flag("--no-output-format", no_output_format, "Drop the output-format section");
    cmd->add_flag("--no-reasoning-steps", no_reasoning_steps,
                  "Drop the reasoning-steps section");
    cmd->add_option("--decimals", decimals, "Serialized amplitude decimals (1..6)")
        ->capture_default_str();
    cmd->add_option("--sc-order", sc_order, "Serialized center order: amplitude|position")
        ->capture_default_str();
  }

  hrrp::PromptConfig config() const {
    hrrp::PromptConfig cfg;
    cfg.include_system_instruction = !no_system_instruction;
    cfg.include_background = !no_background;
    cfg.include_candidate_list = !no_candidate_list;
    cfg.include_output_format = !no_output_format;
    cfg.include_reasoning_steps = !no_reasoning_steps;
    cfg.amplitude_decimals = decimals;
    cfg.sc_order = hrrp::parse_sc_order(sc_order);
    return cfg;
  }
};

struct RunOpts {
  std::string dataset;
  std::string out = "runs";
  std::string run_id;
  int ways = 3;
  int shots = 1;
  int queries = 30;
  int episodes = 10;
  std::uint64_t seed = 7;
  std::string backend = "mock:nn";
  std::string fixtures;
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o-mini";
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  int max_output_tokens = 512;
  double timeout_s = 60.0;
  int max_retries = 3;
  int concurrency = 1;
  std::string baselines = "svm_hrrp,svm_sc,rf_sc,one_nn";
  double svm_lambda = 0.01;
  int svm_iterations = 500;
  double svm_step_scale = 0.1;
  int forest_trees = 25;
  int forest_max_depth = 4;
  double failure_ceiling = 0.20;
  std::string f1_mode = "macro";
  int inject_failures = 0;
  std::string templates;
  bool no_log_prompts = false;
  PeakOpts peak;
  PromptOpts prompt;

  void attach(CLI::App* cmd) {
    cmd->add_option("--dataset", dataset, "Dataset directory")->required();
    cmd->add_option("--out", out, "Parent directory for run artifacts")->capture_default_str();
    cmd->add_option("--run-id", run_id, "Run directory name (derived when omitted)");
    cmd->add_option("-n,--ways", ways, "Classes per episode")->capture_default_str();
    cmd->add_option("-k,--shots", shots, "Support shots per class (0 = zero-shot)")
        ->capture_default_str();
    cmd->add_option("-q,--queries", queries, "Queries per class")->capture_default_str();
    cmd->add_option("--episodes", episodes, "Number of episodes")->capture_default_str();
    cmd->add_option("--seed", seed, "Root seed")->capture_default_str();
    cmd->add_option("--backend", backend, "mock:nn | mock:script | api")
        ->capture_default_str();
    cmd->add_option("--fixtures", fixtures, "Scripted-mock fixture file (JSON)");
    cmd->add_option("--base-url", base_url, "Chat-completion endpoint base URL")
        ->capture_default_str();
    cmd->add_option("--model", model, "Model name sent to the endpoint")
        ->capture_default_str();
    cmd->add_option("--api-key-env", api_key_env,
                    "Environment variable holding the API key")
        ->capture_default_str();
    cmd->add_option("--temperature", temperature, "Decoding temperature")
        ->capture_default_str();
    cmd->add_option("--max-output-tokens", max_output_tokens, "Completion token cap")
        ->capture_default_str();
    cmd->add_option("--timeout", timeout_s, "Per-request timeout, seconds")
        ->capture_default_str();
    cmd->add_option("--max-retries", max_retries, "Retries on 429/5xx")->capture_default_str();
    cmd->add_option("--concurrency", concurrency, "Max in-flight requests")
        ->capture_default_str();
    cmd->add_option("--baselines", baselines,
                    "Comma list of svm_hrrp,svm_sc,rf_sc,one_nn, or 'none'")
        ->capture_default_str();
    cmd->add_option("--svm-lambda", svm_lambda, "SVM L2 penalty")->capture_default_str();
    cmd->add_option("--svm-iterations", svm_iterations, "SVM subgradient iterations")
        ->capture_default_str();
    cmd->add_option("--svm-step-scale", svm_step_scale, "SVM step c in c/sqrt(t)")
        ->capture_default_str();
    cmd->add_option("--forest-trees", forest_trees, "Random forest size")
        ->capture_default_str();
    cmd->add_option("--forest-max-depth", forest_max_depth, "Random forest depth cap")
        ->capture_default_str();
    cmd->add_option("--failure-ceiling", failure_ceiling,
                    "Abort when the backend failure fraction exceeds this")
        ->capture_default_str();
    cmd->add_option("--f1-mode", f1_mode, "macro | micro | weighted")->capture_default_str();
    cmd->add_option("--inject-failures", inject_failures,
                    "Testing aid: permanently fail this percentage of prompts")
        ->capture_default_str();
    cmd->add_option("--templates", templates, "Prompt template directory override");
    cmd->add_flag("--no-log-prompts", no_log_prompts, "Skip writing prompts/ files");
    peak.attach(cmd);
    prompt.attach(cmd);
  }

  hrrp::RunConfig config(double range_resolution_m = 0.0) const {
    hrrp::RunConfig cfg;
    cfg.dataset_dir = dataset;
    cfg.out_dir = out;
    cfg.run_id = run_id;
    cfg.ways = ways;
    cfg.shots = shots;
    cfg.queries_per_class = queries;
    cfg.num_episodes = episodes;
    cfg.seed = seed;
    cfg.backend_spec = backend;
    cfg.fixtures_file = fixtures;
    cfg.backend.base_url = base_url;
    cfg.backend.model_name = model;
    cfg.backend.api_key_env = api_key_env;
    cfg.backend.temperature = temperature;
    cfg.backend.max_output_tokens = max_output_tokens;
    cfg.backend.timeout_s = timeout_s;
    cfg.backend.max_retries = max_retries;
    cfg.backend.max_concurrency = concurrency;
    cfg.prompt = prompt.config();
    cfg.peak = peak.config(range_resolution_m);
    cfg.baseline_names.clear();
    if (baselines != "none" && !baselines.empty()) {
      std::stringstream ss(baselines);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) cfg.baseline_names.push_back(item);
      }
    }
    cfg.baseline_params.svm.lambda = svm_lambda;
    cfg.baseline_params.svm.iterations = svm_iterations;
    cfg.baseline_params.svm.step_scale = svm_step_scale;
    cfg.baseline_params.forest.num_trees = forest_trees;
    cfg.baseline_params.forest.max_depth = forest_max_depth;
    cfg.failure_ceiling = failure_ceiling;
    cfg.f1_mode = hrrp::parse_f1_mode(f1_mode);
    cfg.inject_failure_percent = inject_failures;
    cfg.templates_dir = templates;
    cfg.log_prompts = !no_log_prompts;
    return cfg;
  }
};

void print_summary(const hrrp::EvaluationReport& report) {
  std::printf("run directory: %s\n", report.run_dir.string().c_str());
  std::printf("episodes: %zu, failure ceiling exceeded: %s\n", report.episodes.size(),
              report.failure_ceiling_exceeded ? "yes" : "no");
  for (const auto& s : report.summaries) {
    std::printf("%-24s acc %6s%%  f1 %6s%%  unparseable %ld  failures %ld\n",
                s.display_name.c_str(), s.acc.percent().c_str(),
                hrrp::format_percent(s.f1).c_str(), s.unparseable, s.backend_failures);
  }
}

// The manifest's range resolution, for meters-to-bins conversion at config
// load; 0 when unavailable or not needed.
double manifest_delta_r(const std::string& dataset_dir) {
  std::ifstream in(std::filesystem::path(dataset_dir) / "manifest.json", std::ios::binary);
  if (!in) return 0.0;
  return json::parse(in).value("range_resolution_m", 0.0);
}

// Profiles from either a dataset directory or a bare profiles.jsonl file.
std::vector<hrrp::RangeProfile> load_profiles_for_extract(const std::string& input) {
  namespace fs = std::filesystem;
  if (fs::is_directory(input)) return hrrp::load_dataset(input).profiles;

  std::ifstream in(input, std::ios::binary);
  if (!in) throw hrrp::ConfigError("cannot read " + input);
  std::vector<hrrp::RangeProfile> profiles;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    auto re = rec.at("real").get<std::vector<double>>();
    auto im = rec.at("imag").get<std::vector<double>>();
    if (re.size() != im.size() || re.empty())
      throw hrrp::ConfigError("line " + std::to_string(line_no) +
                              ": real/imag arrays must be non-empty and equal-sized");
    hrrp::RangeProfile profile;
    profile.label = rec.value("label", "");
    if (rec.contains("aspect_deg")) profile.aspect_deg = rec["aspect_deg"].get<double>();
    profile.samples.resize(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) profile.samples[i] = {re[i], im[i]};
    profiles.push_back(std::move(profile));
    ++line_no;
  }
  return profiles;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Few-shot HRRP target-recognition benchmark harness"};
  app.name("hrrpbench");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("hrrpbench ") + hrrp::kVersion);
  app.set_config("--config", "", "TOML config file; flags override file values");

  // --- simulate ------------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic labeled dataset");
  hrrp::DatasetSpec spec;
  std::string sim_out;
  std::string sim_class_names;
  simulate->add_option("--out", sim_out, "Output dataset directory")->required();
  simulate->add_option("--name", spec.name, "Dataset name")->capture_default_str();
  simulate->add_option("--classes", spec.num_classes, "Number of classes")
      ->capture_default_str();
  simulate->add_option("--cells", spec.num_cells, "Range cells per profile (N_r)")
      ->capture_default_str();
  simulate->add_option("--profiles-per-class", spec.profiles_per_class, "Profiles per class")
      ->capture_default_str();
  simulate->add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
  simulate->add_option("--center-frequency-hz", spec.center_frequency_hz, "Center frequency")
      ->capture_default_str();
  simulate->add_option("--bandwidth-hz", spec.bandwidth_hz, "Bandwidth")->capture_default_str();
  simulate->add_option("--noise-std", spec.noise_std,
                       "Complex noise per-component standard deviation")
      ->capture_default_str();
  simulate->add_option("--scintillation-std", spec.scintillation_std,
                       "Per-profile scatterer amplitude jitter (fractional)")
      ->capture_default_str();
  simulate->add_option("--aspect-min", spec.aspect_min_deg, "Aspect range low, degrees")
      ->capture_default_str();
  simulate->add_option("--aspect-max", spec.aspect_max_deg, "Aspect range high, degrees")
      ->capture_default_str();
  simulate->add_option("--min-scatterers", spec.min_scatterers, "Scatterers per class, low")
      ->capture_default_str();
  simulate->add_option("--max-scatterers", spec.max_scatterers, "Scatterers per class, high")
      ->capture_default_str();
  simulate->add_option("--class-names", sim_class_names, "Comma list overriding class names");

  // --- extract ---------------------------------------------------------------
  auto* extract = app.add_subcommand("extract", "Extract and serialize scattering centers");
  std::string ex_input, ex_out;
  int ex_index = -1;
  int ex_decimals = 3;
  PeakOpts ex_peak;
  extract->add_option("--input", ex_input, "Dataset directory or profiles.jsonl file")
      ->required();
  extract->add_option("--out", ex_out, "Output file (default: stdout)");
  extract->add_option("--index", ex_index, "Only this profile (0-based line number)");
  extract->add_option("--decimals", ex_decimals, "Serialized amplitude decimals (1..6)")
      ->capture_default_str();
  ex_peak.attach(extract);

  // --- episodes --------------------------------------------------------------
  auto* episodes_cmd = app.add_subcommand("episodes", "Sample episode manifests");
  std::string ep_dataset, ep_out = "episodes";
  int ep_ways = 3, ep_shots = 1, ep_queries = 30, ep_count = 10;
  std::uint64_t ep_seed = 7;
  episodes_cmd->add_option("--dataset", ep_dataset, "Dataset directory")->required();
  episodes_cmd->add_option("--out", ep_out, "Output directory")->capture_default_str();
  episodes_cmd->add_option("-n,--ways", ep_ways, "Classes per episode")->capture_default_str();
  episodes_cmd->add_option("-k,--shots", ep_shots, "Support shots per class")
      ->capture_default_str();
  episodes_cmd->add_option("-q,--queries", ep_queries, "Queries per class")
      ->capture_default_str();
  episodes_cmd->add_option("--episodes", ep_count, "Number of episodes")->capture_default_str();
  episodes_cmd->add_option("--seed", ep_seed, "Sampling seed")->capture_default_str();

  // --- prompt ----------------------------------------------------------------
  auto* prompt_cmd = app.add_subcommand("prompt", "Render the prompt for one episode query");
  std::string pr_dataset, pr_episode, pr_out, pr_templates;
  int pr_query = 0;
  PeakOpts pr_peak;
  PromptOpts pr_prompt;
  prompt_cmd->add_option("--dataset", pr_dataset, "Dataset directory")->required();
  prompt_cmd->add_option("--episode", pr_episode, "Episode manifest file")->required();
  prompt_cmd->add_option("--query", pr_query, "Query index within the episode")
      ->capture_default_str();
  prompt_cmd->add_option("--out", pr_out, "Output file (default: stdout)");
  prompt_cmd->add_option("--templates", pr_templates, "Prompt template directory override");
  pr_peak.attach(prompt_cmd);
  pr_prompt.attach(prompt_cmd);

  // --- run ---------------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "Evaluate a backend plus baselines over episodes");
  RunOpts run_opts;
  run_opts.attach(run_cmd);

  // --- ablate --------------------------------------------------------------------
  auto* ablate_cmd = app.add_subcommand("ablate", "Run one ablation axis");
  RunOpts ablate_opts;
  std::string ablate_axis;
  ablate_opts.attach(ablate_cmd);
  ablate_cmd->add_option("--axis", ablate_axis,
                         "prompt_components | sc_decimals | sc_max | k_shots")
      ->required();

  // --- report --------------------------------------------------------------------
  auto* report_cmd = app.add_subcommand("report", "Regenerate report.csv/report.md");
  std::string report_run;
  report_cmd->add_option("--run", report_run, "Run directory holding report.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      if (!sim_class_names.empty()) {
        std::stringstream ss(sim_class_names);
        std::string item;
        while (std::getline(ss, item, ',')) spec.class_names.push_back(item);
      }
      hrrp::Dataset dataset = hrrp::generate_dataset(spec);
      hrrp::save_dataset(dataset, sim_out);
      std::printf("wrote %d profiles (%d classes x %d) to %s\n", dataset.manifest.num_profiles,
                  spec.num_classes, spec.profiles_per_class, sim_out.c_str());
    } else if (*extract) {
      auto profiles = load_profiles_for_extract(ex_input);
      hrrp::PeakConfig peak = ex_peak.config(manifest_delta_r(ex_input));
      std::ostringstream lines;
      for (std::size_t i = 0; i < profiles.size(); ++i) {
        if (ex_index >= 0 && static_cast<std::size_t>(ex_index) != i) continue;
        auto centers = hrrp::extract_scattering_centers(profiles[i], peak);
        lines << hrrp::serialize(centers, ex_decimals) << "\n";
      }
      if (ex_out.empty()) {
        std::fputs(lines.str().c_str(), stdout);
      } else {
        std::ofstream out(ex_out, std::ios::binary);
        out << lines.str();
      }
    } else if (*episodes_cmd) {
      hrrp::Dataset dataset = hrrp::load_dataset(ep_dataset);
      auto batch = hrrp::sample_batch(dataset, ep_ways, ep_shots, ep_queries, ep_count, ep_seed);
      std::filesystem::create_directories(ep_out);
      for (const auto& episode : batch) {
        hrrp::save_episode(episode, ep_dataset,
                           std::filesystem::path(ep_out) / (episode.episode_id + ".json"));
      }
      std::printf("wrote %zu episode manifest(s) to %s\n", batch.size(), ep_out.c_str());
    } else if (*prompt_cmd) {
      hrrp::Dataset dataset = hrrp::load_dataset(pr_dataset);
      hrrp::Episode episode = hrrp::load_episode(pr_episode);
      hrrp::PromptConfig prompt_cfg = pr_prompt.config();
      hrrp::PeakConfig peak = pr_peak.config(dataset.manifest.range_resolution_m);
      std::map<int, hrrp::ScatteringCenterSet> sc_sets;
      auto add_ref = [&](const hrrp::ProfileRef& ref) {
        if (sc_sets.count(ref.line)) return;
        auto raw = hrrp::extract_scattering_centers(
            dataset.profiles.at(static_cast<std::size_t>(ref.line)), peak);
        sc_sets[ref.line] =
            hrrp::parse_serialized(hrrp::serialize(raw, prompt_cfg.amplitude_decimals));
      };
      for (const auto& ref : episode.support) add_ref(ref);
      for (const auto& ref : episode.queries) add_ref(ref);
      const hrrp::PromptTemplates templates = pr_templates.empty()
                                                  ? hrrp::PromptTemplates::defaults()
                                                  : hrrp::PromptTemplates::load(pr_templates);
      std::string text =
          hrrp::render(hrrp::build_prompt(episode, pr_query, sc_sets, prompt_cfg, templates));
      if (pr_out.empty()) {
        std::fputs(text.c_str(), stdout);
      } else {
        std::ofstream out(pr_out, std::ios::binary);
        out << text;
      }
    } else if (*run_cmd) {
      hrrp::EvaluationReport report =
          hrrp::run_experiment(run_opts.config(manifest_delta_r(run_opts.dataset)));
      print_summary(report);
      if (report.failure_ceiling_exceeded) return 2;
    } else if (*ablate_cmd) {
      hrrp::RunConfig base = ablate_opts.config(manifest_delta_r(ablate_opts.dataset));
      auto reports = hrrp::run_ablation(base, hrrp::parse_ablation_axis(ablate_axis));
      bool exceeded = false;
      for (const auto& report : reports) {
        std::printf("--- variant: %s ---\n", report.config.ablation_variant.c_str());
        print_summary(report);
        exceeded = exceeded || report.failure_ceiling_exceeded;
      }
      if (exceeded) return 2;
    } else if (*report_cmd) {
      hrrp::regenerate_report_files(report_run);
      std::printf("regenerated report.csv and report.md under %s\n", report_run.c_str());
    }
  } catch (const hrrp::ConfigError& ex) {
    fail("ConfigError", ex.what());
  } catch (const hrrp::SamplingError& ex) {
    fail("SamplingError", ex.what());
  } catch (const hrrp::ParseError& ex) {
    fail("ParseError", ex.what());
  } catch (const hrrp::ZeroSignalError& ex) {
    fail("ZeroSignalError", ex.what());
  } catch (const hrrp::DomainError& ex) {
    fail("DomainError", ex.what());
  } catch (const hrrp::TrainError& ex) {
    fail("TrainError", ex.what());
  } catch (const hrrp::TimeoutError& ex) {
    fail("TimeoutError", ex.what());
  } catch (const hrrp::ContentBlockedError& ex) {
    fail("ContentBlockedError", ex.what());
  } catch (const hrrp::BackendError& ex) {
    fail("BackendError", ex.what());
  } catch (const hrrp::MockError& ex) {
    fail("MockError", ex.what());
  } catch (const std::exception& ex) {
    fail("InternalError", ex.what());
  }
  return 0;
}
