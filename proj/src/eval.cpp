#include "hrrpbench/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hrrpbench/errors.hpp"
#include "hrrpbench/rng.hpp"
#include "hrrpbench/version.hpp"

namespace hrrp {

using nlohmann::json;

AblationAxis parse_ablation_axis(const std::string& name) {
  if (name == "prompt_components") return AblationAxis::PromptComponents;
  if (name == "sc_decimals") return AblationAxis::ScDecimals;
  if (name == "sc_max") return AblationAxis::ScMax;
  if (name == "k_shots") return AblationAxis::KShots;
  throw ConfigError("unknown ablation axis '" + name +
                    "' (expected prompt_components, sc_decimals, sc_max, or k_shots)");
}

const char* ablation_axis_name(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::PromptComponents: return "prompt_components";
    case AblationAxis::ScDecimals: return "sc_decimals";
    case AblationAxis::ScMax: return "sc_max";
    case AblationAxis::KShots: return "k_shots";
  }
  return "?";
}

BaselineSpec parse_baseline(const std::string& name) {
  if (name == "svm_hrrp")
    return {name, ClassifierKind::LinearSvm, FeatureScheme::HrrpAmplitude};
  if (name == "svm_sc") return {name, ClassifierKind::LinearSvm, FeatureScheme::ScFeatures};
  if (name == "rf_sc") return {name, ClassifierKind::RandomForest, FeatureScheme::ScFeatures};
  if (name == "one_nn") return {name, ClassifierKind::OneNn, FeatureScheme::ScFeatures};
  throw ConfigError("unknown baseline '" + name +
                    "' (expected svm_hrrp, svm_sc, rf_sc, or one_nn)");
}

std::vector<BaselineSpec> default_baselines() {
  return {parse_baseline("svm_hrrp"), parse_baseline("svm_sc"), parse_baseline("rf_sc"),
          parse_baseline("one_nn")};
}

void RunConfig::validate() const {
  if (dataset_dir.empty()) throw ConfigError("dataset_dir is required");
  if (ways < 2) throw ConfigError("ways must be >= 2");
  if (shots < 0) throw ConfigError("shots must be >= 0");
  if (queries_per_class < 1) throw ConfigError("queries_per_class must be >= 1");
  if (num_episodes < 0) throw ConfigError("num_episodes must be >= 0");
  if (failure_ceiling < 0.0 || failure_ceiling > 1.0)
    throw ConfigError("failure_ceiling must be in [0, 1]");
  if (inject_failure_percent < 0 || inject_failure_percent > 100)
    throw ConfigError("inject_failure_percent must be in 0..100");
  backend.validate();
  prompt.validate();
  peak.validate();
  for (const auto& name : baseline_names) parse_baseline(name);
  if (backend_spec != "mock:nn" && backend_spec != "mock:script" && backend_spec != "api")
    throw ConfigError("backend must be mock:nn, mock:script, or api");
  if (backend_spec == "mock:script" && fixtures_file.empty())
    throw ConfigError("backend mock:script needs --fixtures");
}

// ---------------------------------------------------------------------------
// Config echo / hashing

namespace {

json config_to_json(const RunConfig& cfg) {
  return json{
      {"dataset_dir", cfg.dataset_dir.string()},
      {"ways", cfg.ways},
      {"shots", cfg.shots},
      {"queries_per_class", cfg.queries_per_class},
      {"num_episodes", cfg.num_episodes},
      {"seed", cfg.seed},
      {"backend",
       {{"spec", cfg.backend_spec},
        {"base_url", cfg.backend.base_url},
        {"model", cfg.backend.model_name},
        {"api_key_env", cfg.backend.api_key_env},
        {"temperature", cfg.backend.temperature},
        {"max_output_tokens", cfg.backend.max_output_tokens},
        {"timeout_s", cfg.backend.timeout_s},
        {"max_retries", cfg.backend.max_retries},
        {"max_concurrency", cfg.backend.max_concurrency}}},
      {"prompt",
       {{"include_system_instruction", cfg.prompt.include_system_instruction},
        {"include_background", cfg.prompt.include_background},
        {"include_candidate_list", cfg.prompt.include_candidate_list},
        {"include_output_format", cfg.prompt.include_output_format},
        {"include_reasoning_steps", cfg.prompt.include_reasoning_steps},
        {"amplitude_decimals", cfg.prompt.amplitude_decimals},
        {"sc_order", cfg.prompt.sc_order == ScOrder::Amplitude ? "amplitude" : "position"}}},
      {"peak",
       {{"amplitude_threshold", cfg.peak.amplitude_threshold},
        {"prominence_threshold", cfg.peak.prominence_threshold},
        {"min_separation_bins", cfg.peak.min_separation_bins},
        {"max_centers", cfg.peak.max_centers}}},
      {"baselines", cfg.baseline_names},
      {"baseline_params",
       {{"svm_lambda", cfg.baseline_params.svm.lambda},
        {"svm_iterations", cfg.baseline_params.svm.iterations},
        {"svm_step_scale", cfg.baseline_params.svm.step_scale},
        {"forest_trees", cfg.baseline_params.forest.num_trees},
        {"forest_max_depth", cfg.baseline_params.forest.max_depth}}},
      {"failure_ceiling", cfg.failure_ceiling},
      {"f1_mode", f1_mode_name(cfg.f1_mode)},
      {"inject_failure_percent", cfg.inject_failure_percent},
      {"fixtures_file", cfg.fixtures_file.string()},
      {"templates_dir", cfg.templates_dir.string()},
      {"ablation", {{"axis", cfg.ablation_axis}, {"variant", cfg.ablation_variant}}}};
}

std::string hex16(std::uint64_t value) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << text;
}

// First `shots` supports of each class, preserving class-major order.
Episode effective_episode(const Episode& episode, int shots) {
  Episode eff = episode;
  eff.support.clear();
  for (const auto& cls : episode.classes) {
    int taken = 0;
    for (const auto& ref : episode.support) {
      if (ref.label == cls && taken < shots) {
        eff.support.push_back(ref);
        ++taken;
      }
    }
    if (taken < shots) {
      throw ConfigError("episode " + episode.episode_id + " has only " +
                        std::to_string(taken) + " supports for class '" + cls + "', need " +
                        std::to_string(shots));
    }
  }
  return eff;
}

struct LlmOutcome {
  std::string prompt_text;
  std::string predicted;
  std::string explanation;
  std::string response_text;
  std::string error;
  long latency_ms = 0;
  int attempts = 0;
  int status = 0;
  bool failed = false;
};

double sample_stddev(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

json confusion_to_json(const ConfusionMatrix& cm) {
  return json{{"labels", cm.labels}, {"matrix", cm.counts}};
}

}  // namespace

std::uint64_t config_hash(const RunConfig& cfg) {
  return fnv1a64(config_to_json(cfg).dump());
}

const SystemSummary* EvaluationReport::summary_for(const std::string& system) const {
  for (const auto& s : summaries) {
    if (s.system == system) return &s;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Report serialization

namespace {

json build_report_json(const EvaluationReport& report) {
  const RunConfig& cfg = report.config;

  json records = json::array();
  for (const auto& r : report.records) {
    records.push_back(json{{"system", r.system},
                           {"episode_id", r.episode_id},
                           {"query_index", r.query_index},
                           {"truth", r.truth},
                           {"predicted", r.predicted},
                           {"explanation", r.explanation},
                           {"latency_ms", r.latency_ms},
                           {"backend_error", r.backend_error}});
  }

  json summaries = json::object();
  for (const auto& s : report.summaries) {
    summaries[s.system] = json{
        {"display_name", s.display_name},
        {"accuracy",
         {{"correct", s.acc.correct}, {"total", s.acc.total}, {"percent", s.acc.percent()}}},
        {"f1",
         {{"mode", f1_mode_name(cfg.f1_mode)},
          {"value", s.f1},
          {"percent", format_percent(s.f1)}}},
        {"per_class_f1", s.per_class_f1},
        {"unparseable", s.unparseable},
        {"backend_failures", s.backend_failures},
        {"confusion", confusion_to_json(s.confusion)},
        {"per_episode_accuracy", s.per_episode_accuracy},
        {"accuracy_stddev", s.accuracy_stddev}};
  }

  json episodes = json::array();
  for (const auto& ep : report.episodes) {
    json systems = json::object();
    for (const auto& s : report.summaries) {
      std::vector<std::string> preds, truths;
      for (const auto& r : report.records) {
        if (r.system == s.system && r.episode_id == ep.episode_id) {
          preds.push_back(r.predicted);
          truths.push_back(r.truth);
        }
      }
      if (preds.empty()) continue;
      ConfusionMatrix cm = ConfusionMatrix::build(preds, truths, ep.classes);
      Accuracy acc{cm.correct(), cm.total()};
      systems[s.system] = json{{"accuracy",
                                {{"correct", acc.correct},
                                 {"total", acc.total},
                                 {"percent", acc.percent()}}},
                               {"confusion", confusion_to_json(cm)}};
    }
    episodes.push_back(json{{"episode_id", ep.episode_id},
                            {"seed", ep.seed},
                            {"classes", ep.classes},
                            {"systems", systems}});
  }

  return json{{"schema_version", 1},
              {"tool_version", kVersion},
              {"config", config_to_json(cfg)},
              {"config_hash", hex16(config_hash(cfg))},
              {"template_version", kPromptTemplateVersion},
              {"template_hash", hex16(report.template_hash)},
              {"dataset",
               {{"name", report.dataset_name},
                {"classes", report.dataset_classes},
                {"n_r", report.n_r}}},
              {"episodes", episodes},
              {"records", records},
              {"summary", summaries},
              {"failure_ceiling_exceeded", report.failure_ceiling_exceeded}};
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string csv_from_report_json(const json& j) {
  std::string out =
      "system,episode_id,query_index,truth,predicted,correct,backend_error,latency_ms,"
      "explanation\n";
  for (const auto& r : j.at("records")) {
    bool correct = r.at("truth").get<std::string>() == r.at("predicted").get<std::string>();
    out += csv_escape(r.at("system").get<std::string>()) + ",";
    out += csv_escape(r.at("episode_id").get<std::string>()) + ",";
    out += std::to_string(r.at("query_index").get<int>()) + ",";
    out += csv_escape(r.at("truth").get<std::string>()) + ",";
    out += csv_escape(r.at("predicted").get<std::string>()) + ",";
    out += correct ? "1," : "0,";
    out += r.at("backend_error").get<bool>() ? "1," : "0,";
    out += std::to_string(r.at("latency_ms").get<long>()) + ",";
    out += csv_escape(r.at("explanation").get<std::string>()) + "\n";
  }
  return out;
}

std::string md_from_report_json(const json& j) {
  const json& cfg = j.at("config");
  std::ostringstream md;
  md << "# Evaluation report\n\n";
  md << "- dataset: " << j.at("dataset").at("name").get<std::string>() << " ("
     << j.at("dataset").at("classes").size() << " classes, "
     << j.at("dataset").at("n_r").get<int>() << " range cells)\n";
  md << "- task: " << cfg.at("ways").get<int>() << "-way " << cfg.at("shots").get<int>()
     << "-shot, " << cfg.at("queries_per_class").get<int>() << " queries/class, "
     << j.at("episodes").size() << " episode(s)\n";
  md << "- seed: " << cfg.at("seed").get<std::uint64_t>() << "\n";
  md << "- backend: " << cfg.at("backend").at("spec").get<std::string>() << "\n";
  md << "- f1 mode: " << cfg.at("f1_mode").get<std::string>() << "\n";
  const std::string axis = cfg.at("ablation").at("axis").get<std::string>();
  if (!axis.empty()) {
    md << "- ablation: " << axis << " / "
       << cfg.at("ablation").at("variant").get<std::string>() << "\n";
  }
  md << "- failure ceiling exceeded: "
     << (j.at("failure_ceiling_exceeded").get<bool>() ? "yes" : "no") << "\n\n";

  md << "| System | Acc. (%) | F1 (%) | Unparseable | Backend failures | Acc. stddev |\n";
  md << "|---|---:|---:|---:|---:|---:|\n";
  for (const auto& [system, s] : j.at("summary").items()) {
    char stddev[32];
    std::snprintf(stddev, sizeof(stddev), "%.2f", 100.0 * s.at("accuracy_stddev").get<double>());
    md << "| " << s.at("display_name").get<std::string>() << " | "
       << s.at("accuracy").at("percent").get<std::string>() << " | "
       << s.at("f1").at("percent").get<std::string>() << " | "
       << s.at("unparseable").get<long>() << " | " << s.at("backend_failures").get<long>()
       << " | " << stddev << " |\n";
  }
  md << "\n";
  return md.str();
}

}  // namespace

std::string report_json_text(const EvaluationReport& report) {
  return build_report_json(report).dump(2) + "\n";
}

std::string report_csv_text(const EvaluationReport& report) {
  return csv_from_report_json(build_report_json(report));
}

std::string report_markdown_text(const EvaluationReport& report) {
  return md_from_report_json(build_report_json(report));
}

void regenerate_report_files(const std::filesystem::path& run_dir) {
  std::ifstream in(run_dir / "report.json", std::ios::binary);
  if (!in) throw ConfigError("no report.json under " + run_dir.string());
  json j = json::parse(in);
  write_text_file(run_dir / "report.csv", csv_from_report_json(j));
  write_text_file(run_dir / "report.md", md_from_report_json(j));
}

// ---------------------------------------------------------------------------
// run_experiment

namespace {

std::filesystem::path make_run_dir(const RunConfig& cfg) {
  std::string run_id = cfg.run_id;
  if (run_id.empty()) {
    run_id = "run-" + std::to_string(cfg.seed) + "-" + hex16(config_hash(cfg)).substr(0, 8);
    if (!cfg.ablation_variant.empty()) run_id += "-" + cfg.ablation_variant;
  }
  std::filesystem::path dir = cfg.out_dir / run_id;
  for (int suffix = 2; std::filesystem::exists(dir); ++suffix) {
    dir = cfg.out_dir / (run_id + "-" + std::to_string(suffix));
  }
  std::filesystem::create_directories(dir);
  std::filesystem::create_directories(dir / "episodes");
  std::filesystem::create_directories(dir / "prompts");
  std::filesystem::create_directories(dir / "transcripts");
  return dir;
}

std::string run_manifest_text(const EvaluationReport& report) {
  json j{{"run_id", report.run_dir.filename().string()},
         {"created_utc", utc_now()},
         {"tool_version", kVersion},
         {"config", config_to_json(report.config)},
         {"config_hash", hex16(config_hash(report.config))},
         {"template_version", kPromptTemplateVersion},
         {"template_hash", hex16(report.template_hash)},
         {"backend", report.config.backend_spec},
         {"f1_mode", f1_mode_name(report.config.f1_mode)}};
  return j.dump(2) + "\n";
}

}  // namespace

EvaluationReport run_experiment(const RunConfig& cfg, Backend& backend,
                                const std::vector<Episode>* preset_episodes) {
  cfg.validate();
  Dataset dataset = load_dataset(cfg.dataset_dir);
  PromptTemplates templates = cfg.templates_dir.empty()
                                  ? PromptTemplates::defaults()
                                  : PromptTemplates::load(cfg.templates_dir);

  std::vector<Episode> episodes =
      preset_episodes ? *preset_episodes
                      : sample_batch(dataset, cfg.ways, cfg.shots, cfg.queries_per_class,
                                     cfg.num_episodes, cfg.seed);

  EvaluationReport report;
  report.config = cfg;
  report.dataset_name = dataset.manifest.name;
  report.dataset_classes = dataset.manifest.classes;
  report.n_r = dataset.manifest.n_r;
  report.template_hash = templates.hash();
  report.run_dir = make_run_dir(cfg);

  std::vector<BaselineSpec> baselines;
  if (cfg.shots >= 1) {
    for (const auto& name : cfg.baseline_names) baselines.push_back(parse_baseline(name));
  }

  long llm_total = 0;
  long llm_failures = 0;

  for (const auto& episode : episodes) {
    save_episode(episode, cfg.dataset_dir.string(),
                 report.run_dir / "episodes" / (episode.episode_id + ".json"));
    Episode eff = effective_episode(episode, cfg.shots);

    // Extract once per referenced profile, then round-trip through the
    // serialized text so baselines score exactly the information the
    // prompt carries.
    std::map<int, ScatteringCenterSet> sc_used;
    auto extract_ref = [&](const ProfileRef& ref) {
      if (sc_used.count(ref.line)) return;
      const RangeProfile& profile = dataset.profiles.at(static_cast<std::size_t>(ref.line));
      ScatteringCenterSet raw = extract_scattering_centers(profile, cfg.peak);
      sc_used[ref.line] = parse_serialized(serialize(raw, cfg.prompt.amplitude_decimals));
    };
    for (const auto& ref : eff.support) extract_ref(ref);
    for (const auto& ref : eff.queries) extract_ref(ref);

    // Classical baselines, re-trained on this episode's support set.
    for (const auto& spec : baselines) {
      std::vector<FeatureVector> features;
      std::vector<std::string> labels;
      for (const auto& ref : eff.support) {
        if (spec.scheme == FeatureScheme::HrrpAmplitude) {
          features.push_back(
              featurize_hrrp(dataset.profiles.at(static_cast<std::size_t>(ref.line))));
        } else {
          features.push_back(
              featurize_sc(sc_used.at(ref.line), cfg.peak.max_centers, report.n_r));
        }
        labels.push_back(ref.label);
      }
      ClassifierModel model =
          train(spec.kind, features, labels, cfg.baseline_params,
                derive_seed(cfg.seed, fnv1a64(episode.episode_id + ":" + spec.name)));
      for (std::size_t qi = 0; qi < eff.queries.size(); ++qi) {
        const auto& ref = eff.queries[qi];
        FeatureVector fv =
            spec.scheme == FeatureScheme::HrrpAmplitude
                ? featurize_hrrp(dataset.profiles.at(static_cast<std::size_t>(ref.line)))
                : featurize_sc(sc_used.at(ref.line), cfg.peak.max_centers, report.n_r);
        QueryRecord rec;
        rec.system = "baseline:" + spec.name;
        rec.episode_id = episode.episode_id;
        rec.query_index = static_cast<int>(qi);
        rec.truth = ref.label;
        rec.predicted = model.predict(fv);
        report.records.push_back(std::move(rec));
      }
    }

    // LLM queries, fanned out up to max_concurrency.
    const std::size_t num_queries = eff.queries.size();
    std::vector<LlmOutcome> outcomes(num_queries);
    auto work = [&](std::size_t qi) {
      LlmOutcome& out = outcomes[qi];
      PromptDocument doc =
          build_prompt(eff, static_cast<int>(qi), sc_used, cfg.prompt, templates);
      out.prompt_text = render(doc);
      auto t0 = std::chrono::steady_clock::now();
      try {
        RawResponse raw = backend.complete(out.prompt_text);
        Prediction pred = parse_prediction(raw, eff.classes);
        out.predicted = pred.predicted_label;
        out.explanation = pred.explanation;
        out.response_text = raw.text;
        out.attempts = raw.attempts;
        out.status = raw.http_status;
        out.latency_ms = raw.latency_ms;
      } catch (const BackendError& ex) {
        out.failed = true;
        out.error = ex.what();
      } catch (const MockError& ex) {
        out.failed = true;
        out.error = ex.what();
      }
      if (out.latency_ms == 0) {
        out.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
      }
      if (out.failed) {
        out.predicted = kUnparseableLabel;
        out.explanation = "backend failure: " + out.error;
      }
    };

    int workers = std::min<int>(cfg.backend.max_concurrency, static_cast<int>(num_queries));
    if (workers > 1) {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(workers));
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
          for (;;) {
            std::size_t qi = next.fetch_add(1);
            if (qi >= num_queries) break;
            work(qi);
          }
        });
      }
      for (auto& t : pool) t.join();
    } else {
      for (std::size_t qi = 0; qi < num_queries; ++qi) work(qi);
    }

    // Artifacts and records, in query order.
    std::ofstream transcript(report.run_dir / "transcripts" / (episode.episode_id + ".jsonl"),
                             std::ios::binary);
    for (std::size_t qi = 0; qi < num_queries; ++qi) {
      const LlmOutcome& out = outcomes[qi];
      char qtag[16];
      std::snprintf(qtag, sizeof(qtag), "q%03d", static_cast<int>(qi));
      if (cfg.log_prompts) {
        write_text_file(report.run_dir / "prompts" / (episode.episode_id + "-" + qtag + ".txt"),
                        out.prompt_text);
      }
      json entry{{"query_index", static_cast<int>(qi)},
                 {"backend", backend.name()},
                 {"prompt_hash", hex16(fnv1a64(out.prompt_text))},
                 {"request", build_chat_request_body(cfg.backend, out.prompt_text)},
                 {"status", out.status},
                 {"attempts", out.attempts},
                 {"latency_ms", out.latency_ms},
                 {"response_text", out.response_text},
                 {"error", out.error}};
      transcript << entry.dump() << "\n";

      QueryRecord rec;
      rec.system = "llm";
      rec.episode_id = episode.episode_id;
      rec.query_index = static_cast<int>(qi);
      rec.truth = eff.queries[qi].label;
      rec.predicted = out.predicted;
      rec.explanation = out.explanation;
      rec.latency_ms = out.latency_ms;
      rec.backend_error = out.failed;
      report.records.push_back(std::move(rec));

      ++llm_total;
      if (out.failed) ++llm_failures;
    }

    report.episodes.push_back(episode);
    if (llm_total > 0 &&
        static_cast<double>(llm_failures) > cfg.failure_ceiling * static_cast<double>(llm_total)) {
      report.failure_ceiling_exceeded = true;
      break;  // partial report below
    }
  }

  // Aggregate summaries over the classes that actually appeared.
  std::vector<std::string> seen_classes;
  for (const auto& cls : report.dataset_classes) {
    for (const auto& ep : report.episodes) {
      if (std::find(ep.classes.begin(), ep.classes.end(), cls) != ep.classes.end()) {
        seen_classes.push_back(cls);
        break;
      }
    }
  }

  std::vector<std::string> systems = {"llm"};
  for (const auto& spec : baselines) systems.push_back("baseline:" + spec.name);
  for (const auto& system : systems) {
    std::vector<std::string> preds, truths;
    std::vector<double> per_episode;
    long unparseable = 0, failures = 0;
    for (const auto& ep : report.episodes) {
      long ep_correct = 0, ep_total = 0;
      for (const auto& r : report.records) {
        if (r.system != system || r.episode_id != ep.episode_id) continue;
        preds.push_back(r.predicted);
        truths.push_back(r.truth);
        if (r.backend_error) {
          ++failures;
        } else if (r.predicted == kUnparseableLabel) {
          ++unparseable;
        }
        if (r.predicted == r.truth) ++ep_correct;
        ++ep_total;
      }
      if (ep_total > 0)
        per_episode.push_back(static_cast<double>(ep_correct) / static_cast<double>(ep_total));
    }
    if (preds.empty()) continue;

    SystemSummary summary;
    summary.system = system;
    summary.display_name = system == "llm" ? "llm (" + backend.name() + ")"
                                           : system.substr(std::string("baseline:").size());
    summary.acc = accuracy(preds, truths);
    summary.confusion = ConfusionMatrix::build(preds, truths, seen_classes);
    summary.f1 = f1_score(summary.confusion, cfg.f1_mode);
    summary.per_class_f1 = per_class_f1(summary.confusion);
    summary.unparseable = unparseable;
    summary.backend_failures = failures;
    summary.per_episode_accuracy = per_episode;
    summary.accuracy_stddev = sample_stddev(per_episode);
    report.summaries.push_back(std::move(summary));
  }

  write_text_file(report.run_dir / "manifest.json", run_manifest_text(report));
  write_text_file(report.run_dir / "report.json", report_json_text(report));
  write_text_file(report.run_dir / "report.csv", report_csv_text(report));
  write_text_file(report.run_dir / "report.md", report_markdown_text(report));
  return report;
}

EvaluationReport run_experiment(const RunConfig& cfg) {
  cfg.validate();
  Dataset dataset = load_dataset(cfg.dataset_dir);
  std::unique_ptr<Backend> backend = make_backend(cfg.backend_spec, cfg.backend,
                                                  cfg.peak.max_centers, dataset.manifest.n_r,
                                                  cfg.fixtures_file);
  if (cfg.inject_failure_percent > 0) {
    backend = std::make_unique<FailureInjectingBackend>(std::move(backend),
                                                        cfg.inject_failure_percent);
  }
  return run_experiment(cfg, *backend, nullptr);
}

std::vector<EvaluationReport> run_ablation(const RunConfig& base, AblationAxis axis) {
  base.validate();
  Dataset dataset = load_dataset(base.dataset_dir);

  struct Variant {
    std::string label;
    RunConfig cfg;
  };
  std::vector<Variant> variants;
  int sample_shots = base.shots;

  switch (axis) {
    case AblationAxis::PromptComponents: {
      auto with = [&base](const std::string& label, auto mutate) {
        RunConfig cfg = base;
        mutate(cfg.prompt);
        return Variant{label, cfg};
      };
      variants.push_back(with("full", [](PromptConfig&) {}));
      variants.push_back(with("wo_system_instruction",
                              [](PromptConfig& p) { p.include_system_instruction = false; }));
      variants.push_back(
          with("wo_background", [](PromptConfig& p) { p.include_background = false; }));
      variants.push_back(
          with("wo_candidate_list", [](PromptConfig& p) { p.include_candidate_list = false; }));
      variants.push_back(
          with("wo_output_format", [](PromptConfig& p) { p.include_output_format = false; }));
      break;
    }
    case AblationAxis::ScDecimals: {
      for (int d : {1, 3, 5}) {
        RunConfig cfg = base;
        cfg.prompt.amplitude_decimals = d;
        variants.push_back({"decimals_" + std::to_string(d), cfg});
      }
      break;
    }
    case AblationAxis::ScMax: {
      for (int m : {3, 10, 15}) {
        RunConfig cfg = base;
        cfg.peak.max_centers = m;
        variants.push_back({"sc_max_" + std::to_string(m), cfg});
      }
      break;
    }
    case AblationAxis::KShots: {
      for (int k : {0, 1, 5}) {
        RunConfig cfg = base;
        cfg.shots = k;
        variants.push_back({"k_" + std::to_string(k), cfg});
        sample_shots = std::max(sample_shots, k);
      }
      break;
    }
  }

  // One episode batch per axis; every variant replays it.
  std::vector<Episode> episodes = sample_batch(dataset, base.ways, sample_shots,
                                               base.queries_per_class, base.num_episodes,
                                               base.seed);

  std::vector<EvaluationReport> reports;
  for (auto& variant : variants) {
    variant.cfg.ablation_axis = ablation_axis_name(axis);
    variant.cfg.ablation_variant = variant.label;
    std::unique_ptr<Backend> backend =
        make_backend(variant.cfg.backend_spec, variant.cfg.backend,
                     variant.cfg.peak.max_centers, dataset.manifest.n_r,
                     variant.cfg.fixtures_file);
    if (variant.cfg.inject_failure_percent > 0) {
      backend = std::make_unique<FailureInjectingBackend>(std::move(backend),
                                                          variant.cfg.inject_failure_percent);
    }
    reports.push_back(run_experiment(variant.cfg, *backend, &episodes));
  }
  return reports;
}

}  // namespace hrrp
