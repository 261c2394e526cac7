#pragma once

#include <string>
#include <vector>

namespace hrrp {

// Rows: truth classes in roster order. Columns: predicted roster classes
// plus one trailing column for anything outside the roster (UNPARSEABLE,
// backend failures).
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<long>> counts;  // labels.size() x (labels.size() + 1)

  static ConfusionMatrix build(const std::vector<std::string>& predictions,
                               const std::vector<std::string>& truths,
                               const std::vector<std::string>& roster);

  long total() const;
  long correct() const;
  long unparseable() const;
};

struct Accuracy {
  long correct = 0;
  long total = 0;

  double fraction() const;
  std::string percent() const;  // 2 decimals, e.g. "62.22"
};

// "62.22" from 0.622222...; all reported percentages use this.
std::string format_percent(double fraction);

// Exact rational correct/total; predictions outside the roster (UNPARSEABLE)
// are incorrect. DomainError on empty input.
Accuracy accuracy(const std::vector<std::string>& predictions,
                  const std::vector<std::string>& truths);

enum class F1Mode { Macro, Micro, Weighted };

F1Mode parse_f1_mode(const std::string& name);
const char* f1_mode_name(F1Mode mode);

// Per-class F1 (0 on zero division), in roster order.
std::vector<double> per_class_f1(const ConfusionMatrix& cm);

// Unweighted mean of per-class F1 over the full roster.
double macro_f1(const std::vector<std::string>& predictions,
                const std::vector<std::string>& truths,
                const std::vector<std::string>& roster);

double f1_score(const ConfusionMatrix& cm, F1Mode mode);

}  // namespace hrrp
