#include <fstream>
#include <sstream>

#include "hrrpbench/errors.hpp"
#include "hrrpbench/prompt.hpp"
#include "hrrpbench/rng.hpp"

namespace hrrp {

// Canonical prompt texts, template version 1. The copies under templates/
// must match these byte-for-byte (covered by a test).

namespace {

const char* kSystemInstruction =
    "You are an expert radar signal analyst performing automatic target\n"
    "recognition (ATR). You identify an unknown target from the dominant\n"
    "scattering centers of its high-resolution range profile (HRRP). Work\n"
    "strictly from the data given in this prompt.";

const char* kBackground =
    "A high-resolution range profile (HRRP) is a one-dimensional radar\n"
    "signature: the projection of a target's reflectivity onto the radar\n"
    "line of sight, sampled in range bins. Its dominant peaks are scattering\n"
    "centers (SCs), localized reflectors such as the nose, engine intakes,\n"
    "wing roots and tail of an aircraft. Each SC below is written as a\n"
    "dictionary with 'position_index' (the range bin of the reflector) and\n"
    "'amplitude' (its strength relative to the strongest reflector, in\n"
    "(0, 1]). Targets of the same class produce similar SC layouts: similar\n"
    "spacing between strong reflectors and similar amplitude patterns, with\n"
    "small shifts caused by viewing aspect.";

const char* kCandidateList =
    "The target belongs to exactly one of the following {{n_classes}}\n"
    "candidate classes:\n"
    "{{classes}}";

const char* kReasoningSteps =
    "Reasoning steps:\n"
    "1. Note how many scattering centers the query has and how far apart\n"
    "   the strongest ones sit.\n"
    "2. Compare the query's strong-center positions and amplitude pattern\n"
    "   with each labeled support example.\n"
    "3. Prefer matches in relative spacing over absolute positions; small\n"
    "   shifts of all centers together are expected.\n"
    "4. Pick the candidate class whose support example is most consistent\n"
    "   with the query.";

const char* kOutputFormat =
    "Output format: reply with exactly two lines.\n"
    "ANSWER: <one class name copied verbatim from the candidate list>\n"
    "REASON: <one or two sentences naming the scattering-center evidence>";

const char* kInstructionCue =
    "Classify the query above. Choose exactly one class from the candidate\n"
    "list and answer in the required format.";

std::string read_file_if_present(const std::filesystem::path& file, const std::string& fallback) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return fallback;
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  // Template files end with a newline; the body is stored without it.
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

}  // namespace

const PromptTemplates& PromptTemplates::defaults() {
  static const PromptTemplates t{kSystemInstruction, kBackground,     kCandidateList,
                                 kReasoningSteps,    kOutputFormat,   kInstructionCue};
  return t;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw ConfigError("template directory not found: " + dir.string());
  PromptTemplates t = defaults();
  t.system_instruction = read_file_if_present(dir / "system_instruction.txt", t.system_instruction);
  t.background = read_file_if_present(dir / "background.txt", t.background);
  t.candidate_list = read_file_if_present(dir / "candidate_list.txt", t.candidate_list);
  t.reasoning_steps = read_file_if_present(dir / "reasoning_steps.txt", t.reasoning_steps);
  t.output_format = read_file_if_present(dir / "output_format.txt", t.output_format);
  t.instruction_cue = read_file_if_present(dir / "instruction_cue.txt", t.instruction_cue);
  return t;
}

std::uint64_t PromptTemplates::hash() const {
  std::string all = system_instruction + "\x1f" + background + "\x1f" + candidate_list + "\x1f" +
                    reasoning_steps + "\x1f" + output_format + "\x1f" + instruction_cue;
  return fnv1a64(all);
}

}  // namespace hrrp
