#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hrrpbench/fewshot.hpp"
#include "hrrpbench/scatter.hpp"

namespace hrrp {

enum class SectionKind {
  SystemInstruction,
  Background,
  CandidateList,
  ReasoningSteps,
  OutputFormat,
  SupportExamples,
  Query,
  InstructionCue,
};

const char* section_name(SectionKind kind);

enum class ScOrder { Amplitude, Position };

ScOrder parse_sc_order(const std::string& text);  // "amplitude" | "position"

// Per-section toggles plus serialization knobs. Disabled sections are absent
// from the document entirely.
struct PromptConfig {
  bool include_system_instruction = true;
  bool include_background = true;
  bool include_candidate_list = true;
  bool include_output_format = true;
  bool include_reasoning_steps = true;
  int amplitude_decimals = 3;
  ScOrder sc_order = ScOrder::Amplitude;

  void validate() const;  // throws ConfigError
};

// Canonical section texts. The repository ships the same texts under
// templates/; load() overrides any subset from *.txt files in a directory.
struct PromptTemplates {
  std::string system_instruction;
  std::string background;
  std::string candidate_list;  // placeholders: {{n_classes}}, {{classes}}
  std::string reasoning_steps;
  std::string output_format;
  std::string instruction_cue;

  static const PromptTemplates& defaults();
  static PromptTemplates load(const std::filesystem::path& dir);
  std::uint64_t hash() const;
};

inline constexpr const char* kPromptTemplateVersion = "1";

struct PromptDocument {
  struct Section {
    SectionKind kind;
    std::string text;  // body, without the rendered header
  };
  std::vector<Section> sections;  // fixed order, disabled sections absent
  std::vector<std::pair<std::string, std::string>> examples;  // (serialized, label)
  std::string query_text;
  std::string instruction_cue;
};

// Assembles the document for one query of an episode. sc_sets maps dataset
// line numbers to extracted center sets and must cover every support profile
// and the query; a gap raises ConfigError. Support examples appear grouped by
// class in episode class order.
PromptDocument build_prompt(const Episode& episode, int query_index,
                            const std::map<int, ScatteringCenterSet>& sc_sets,
                            const PromptConfig& cfg,
                            const PromptTemplates& templates = PromptTemplates::defaults());

// Deterministic rendering: every section as "[HEADER]\n<body>\n\n", LF line
// endings, single trailing newline.
std::string render(const PromptDocument& doc);

}  // namespace hrrp
