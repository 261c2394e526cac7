#include "hrrpbench/prompt.hpp"

#include <algorithm>
#include <cstdio>

#include "hrrpbench/errors.hpp"

namespace hrrp {

const char* section_name(SectionKind kind) {
  switch (kind) {
    case SectionKind::SystemInstruction: return "SYSTEM INSTRUCTION";
    case SectionKind::Background: return "BACKGROUND";
    case SectionKind::CandidateList: return "CANDIDATE CLASSES";
    case SectionKind::ReasoningSteps: return "REASONING STEPS";
    case SectionKind::OutputFormat: return "OUTPUT FORMAT";
    case SectionKind::SupportExamples: return "SUPPORT EXAMPLES";
    case SectionKind::Query: return "QUERY";
    case SectionKind::InstructionCue: return "INSTRUCTION";
  }
  return "?";
}

ScOrder parse_sc_order(const std::string& text) {
  if (text == "amplitude") return ScOrder::Amplitude;
  if (text == "position") return ScOrder::Position;
  throw ConfigError("sc_order must be 'amplitude' or 'position', got '" + text + "'");
}

void PromptConfig::validate() const {
  if (amplitude_decimals < 1 || amplitude_decimals > 6)
    throw ConfigError("amplitude_decimals must be in 1..6");
}

namespace {

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::string serialize_ordered(const ScatteringCenterSet& set, const PromptConfig& cfg) {
  if (cfg.sc_order == ScOrder::Amplitude) return serialize(set, cfg.amplitude_decimals);
  ScatteringCenterSet by_position = set;
  std::sort(by_position.centers.begin(), by_position.centers.end(),
            [](const ScatteringCenter& a, const ScatteringCenter& b) {
              return a.position_index < b.position_index;
            });
  return serialize(by_position, cfg.amplitude_decimals);
}

const ScatteringCenterSet& set_for(const std::map<int, ScatteringCenterSet>& sc_sets,
                                   const ProfileRef& ref) {
  auto it = sc_sets.find(ref.line);
  if (it == sc_sets.end())
    throw ConfigError("no scattering-center set for dataset line " + std::to_string(ref.line));
  return it->second;
}

}  // namespace

PromptDocument build_prompt(const Episode& episode, int query_index,
                            const std::map<int, ScatteringCenterSet>& sc_sets,
                            const PromptConfig& cfg, const PromptTemplates& templates) {
  cfg.validate();
  if (query_index < 0 || query_index >= static_cast<int>(episode.queries.size()))
    throw ConfigError("query_index out of range");

  PromptDocument doc;

  if (cfg.include_system_instruction)
    doc.sections.push_back({SectionKind::SystemInstruction, templates.system_instruction});
  if (cfg.include_background)
    doc.sections.push_back({SectionKind::Background, templates.background});

  if (cfg.include_candidate_list) {
    std::string classes;
    for (std::size_t i = 0; i < episode.classes.size(); ++i) {
      classes += std::to_string(i + 1) + ". " + episode.classes[i];
      if (i + 1 < episode.classes.size()) classes += "\n";
    }
    std::string body = replace_all(templates.candidate_list, "{{n_classes}}",
                                   std::to_string(episode.classes.size()));
    body = replace_all(body, "{{classes}}", classes);
    doc.sections.push_back({SectionKind::CandidateList, body});
  }

  if (cfg.include_reasoning_steps)
    doc.sections.push_back({SectionKind::ReasoningSteps, templates.reasoning_steps});
  if (cfg.include_output_format)
    doc.sections.push_back({SectionKind::OutputFormat, templates.output_format});

  // Support examples in episode order: class-major, shot order within class.
  for (const auto& ref : episode.support) {
    doc.examples.emplace_back(serialize_ordered(set_for(sc_sets, ref), cfg), ref.label);
  }
  if (!doc.examples.empty()) {
    std::string body;
    for (std::size_t i = 0; i < doc.examples.size(); ++i) {
      body += "Example " + std::to_string(i + 1) + " (label: " + doc.examples[i].second +
              "):\n" + doc.examples[i].first;
      if (i + 1 < doc.examples.size()) body += "\n";
    }
    doc.sections.push_back({SectionKind::SupportExamples, body});
  }

  doc.query_text = serialize_ordered(set_for(sc_sets, episode.queries[query_index]), cfg);
  doc.sections.push_back({SectionKind::Query, doc.query_text});

  doc.instruction_cue = templates.instruction_cue;
  doc.sections.push_back({SectionKind::InstructionCue, doc.instruction_cue});

  return doc;
}

std::string render(const PromptDocument& doc) {
  std::string out;
  for (const auto& section : doc.sections) {
    out += "[";
    out += section_name(section.kind);
    out += "]\n";
    out += section.text;
    out += "\n\n";
  }
  // Single trailing newline.
  if (!out.empty()) out.pop_back();
  return out;
}

}  // namespace hrrp
