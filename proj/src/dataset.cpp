#include "hrrpbench/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hrrpbench/errors.hpp"
#include "hrrpbench/rng.hpp"
#include "hrrpbench/version.hpp"

namespace hrrp {

using nlohmann::json;

void DatasetSpec::validate() const {
  if (num_classes < 2) throw ConfigError("dataset needs at least 2 classes");
  if (profiles_per_class < 1) throw ConfigError("need at least 1 profile per class");
  if (num_cells < 2) throw ConfigError("need at least 2 range cells");
  if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth must be positive");
  if (noise_std < 0.0) throw ConfigError("noise_std must be non-negative");
  if (scintillation_std < 0.0) throw ConfigError("scintillation_std must be non-negative");
  if (aspect_min_deg > aspect_max_deg) throw ConfigError("aspect range is inverted");
  if (min_scatterers < 1 || max_scatterers < min_scatterers)
    throw ConfigError("scatterer count range is invalid");
  if (!class_names.empty() && static_cast<int>(class_names.size()) != num_classes)
    throw ConfigError("class_names length must equal num_classes");
}

std::vector<int> Dataset::indices_for_class(const std::string& label) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (profiles[i].label == label) out.push_back(static_cast<int>(i));
  }
  return out;
}

namespace {

std::string default_class_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "class-%02d", index);
  return buf;
}

ScattererModel draw_class_model(const DatasetSpec& spec, const RadarParams& params,
                                int class_index, const std::string& name) {
  Rng rng(derive_seed(spec.seed, 0x10000 + static_cast<std::uint64_t>(class_index)));
  ScattererModel model;
  model.class_name = name;
  int count = spec.min_scatterers +
              static_cast<int>(rng.below(static_cast<std::uint64_t>(
                  spec.max_scatterers - spec.min_scatterers + 1)));
  const double window = params.window_m();
  // Keep scatterers inside the central 80% of the window so every aspect
  // projection (which only shrinks ranges toward zero) stays unambiguous.
  for (int i = 0; i < count; ++i) {
    ScattererModel::Point p;
    p.range_m = rng.uniform(0.1 * window, 0.9 * window);
    p.amplitude = rng.uniform(0.2, 1.0);
    model.scatterers.push_back(p);
  }
  return model;
}

}  // namespace

Dataset generate_dataset(const DatasetSpec& spec) {
  spec.validate();
  RadarParams params = RadarParams::from_center(spec.center_frequency_hz, spec.bandwidth_hz,
                                                spec.num_cells);

  std::vector<std::string> names = spec.class_names;
  if (names.empty()) {
    for (int c = 0; c < spec.num_classes; ++c) names.push_back(default_class_name(c));
  }

  Dataset dataset;
  dataset.manifest.name = spec.name;
  dataset.manifest.classes = names;
  dataset.manifest.n_r = spec.num_cells;
  dataset.manifest.range_resolution_m = range_resolution(spec.bandwidth_hz);
  dataset.manifest.seed = spec.seed;
  dataset.manifest.generator_version = kVersion;
  dataset.manifest.num_profiles = spec.num_classes * spec.profiles_per_class;
  dataset.manifest.center_frequency_hz = spec.center_frequency_hz;
  dataset.manifest.bandwidth_hz = spec.bandwidth_hz;

  // Output order fixed by (class index, profile index).
  for (int c = 0; c < spec.num_classes; ++c) {
    ScattererModel model = draw_class_model(spec, params, c, names[c]);
    std::uint64_t class_seed = derive_seed(spec.seed, 0x20000 + static_cast<std::uint64_t>(c));
    for (int p = 0; p < spec.profiles_per_class; ++p) {
      std::uint64_t profile_seed = derive_seed(class_seed, static_cast<std::uint64_t>(p));
      Rng rng(profile_seed);
      double aspect = rng.uniform(spec.aspect_min_deg, spec.aspect_max_deg);
      ScattererModel view = model;
      for (auto& sc : view.scatterers) {
        double jitter = 1.0 + spec.scintillation_std * rng.normal(0.0, 1.0);
        sc.amplitude = std::max(0.05, sc.amplitude * std::max(0.05, jitter));
      }
      FrequencyResponse response = synthesize_frequency_response(
          view, params, aspect, spec.noise_std, derive_seed(profile_seed, 0x5EED));
      RangeProfile profile = idft(response);
      profile.label = names[c];
      profile.aspect_deg = aspect;
      dataset.profiles.push_back(std::move(profile));
    }
  }
  return dataset;
}

namespace {

json manifest_to_json(const DatasetManifest& m) {
  return json{{"name", m.name},
              {"classes", m.classes},
              {"n_r", m.n_r},
              {"range_resolution_m", m.range_resolution_m},
              {"seed", m.seed},
              {"generator_version", m.generator_version},
              {"num_profiles", m.num_profiles},
              {"center_frequency_hz", m.center_frequency_hz},
              {"bandwidth_hz", m.bandwidth_hz}};
}

DatasetManifest manifest_from_json(const json& j) {
  DatasetManifest m;
  m.name = j.at("name").get<std::string>();
  m.classes = j.at("classes").get<std::vector<std::string>>();
  m.n_r = j.at("n_r").get<int>();
  m.range_resolution_m = j.at("range_resolution_m").get<double>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.generator_version = j.at("generator_version").get<std::string>();
  m.num_profiles = j.at("num_profiles").get<int>();
  m.center_frequency_hz = j.at("center_frequency_hz").get<double>();
  m.bandwidth_hz = j.at("bandwidth_hz").get<double>();
  return m;
}

}  // namespace

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw ConfigError("cannot write manifest under " + dir.string());
    out << manifest_to_json(dataset.manifest).dump(2) << "\n";
  }
  std::ofstream out(dir / "profiles.jsonl", std::ios::binary);
  if (!out) throw ConfigError("cannot write profiles under " + dir.string());
  for (const auto& profile : dataset.profiles) {
    json rec;
    rec["label"] = profile.label;
    rec["aspect_deg"] = profile.aspect_deg.value_or(0.0);
    std::vector<double> re(profile.samples.size()), im(profile.samples.size());
    for (std::size_t i = 0; i < profile.samples.size(); ++i) {
      re[i] = profile.samples[i].real();
      im[i] = profile.samples[i].imag();
    }
    rec["real"] = re;
    rec["imag"] = im;
    out << rec.dump() << "\n";
  }
}

Dataset load_dataset(const std::filesystem::path& dir) {
  std::ifstream manifest_in(dir / "manifest.json", std::ios::binary);
  if (!manifest_in) throw ConfigError("missing manifest.json in " + dir.string());
  json manifest_json = json::parse(manifest_in);

  Dataset dataset;
  dataset.manifest = manifest_from_json(manifest_json);

  std::ifstream in(dir / "profiles.jsonl", std::ios::binary);
  if (!in) throw ConfigError("missing profiles.jsonl in " + dir.string());
  const double delta_r = dataset.manifest.range_resolution_m;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    auto re = rec.at("real").get<std::vector<double>>();
    auto im = rec.at("imag").get<std::vector<double>>();
    if (static_cast<int>(re.size()) != dataset.manifest.n_r || re.size() != im.size()) {
      throw ConfigError("profiles.jsonl line " + std::to_string(line_no) +
                        ": array length disagrees with manifest n_r");
    }
    RangeProfile profile;
    profile.range_resolution_m = delta_r;
    profile.label = rec.at("label").get<std::string>();
    profile.aspect_deg = rec.at("aspect_deg").get<double>();
    profile.samples.resize(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) profile.samples[i] = {re[i], im[i]};
    dataset.profiles.push_back(std::move(profile));
    ++line_no;
  }
  if (static_cast<int>(dataset.profiles.size()) != dataset.manifest.num_profiles) {
    throw ConfigError("profiles.jsonl record count disagrees with manifest");
  }
  return dataset;
}

std::uint64_t dataset_fingerprint(const Dataset& dataset) {
  std::ostringstream key;
  key << dataset.manifest.name << "|" << dataset.manifest.n_r << "|"
      << dataset.manifest.seed << "|" << dataset.manifest.num_profiles;
  for (const auto& c : dataset.manifest.classes) key << "|" << c;
  return fnv1a64(key.str());
}

}  // namespace hrrp
