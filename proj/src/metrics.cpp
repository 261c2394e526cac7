#include "hrrpbench/metrics.hpp"

#include <algorithm>
#include <cstdio>

#include "hrrpbench/errors.hpp"

namespace hrrp {

ConfusionMatrix ConfusionMatrix::build(const std::vector<std::string>& predictions,
                                       const std::vector<std::string>& truths,
                                       const std::vector<std::string>& roster) {
  if (predictions.size() != truths.size())
    throw DomainError("predictions and truths must have equal length");
  if (predictions.empty()) throw DomainError("cannot build a confusion matrix from no records");

  ConfusionMatrix cm;
  cm.labels = roster;
  cm.counts.assign(roster.size(), std::vector<long>(roster.size() + 1, 0));

  auto index_of = [&roster](const std::string& label) -> std::size_t {
    auto it = std::find(roster.begin(), roster.end(), label);
    return static_cast<std::size_t>(it - roster.begin());
  };

  for (std::size_t i = 0; i < truths.size(); ++i) {
    std::size_t row = index_of(truths[i]);
    if (row >= roster.size()) throw DomainError("truth label '" + truths[i] + "' not in roster");
    std::size_t col = index_of(predictions[i]);
    if (col >= roster.size()) col = roster.size();  // UNPARSEABLE / out-of-roster column
    cm.counts[row][col]++;
  }
  return cm;
}

long ConfusionMatrix::total() const {
  long t = 0;
  for (const auto& row : counts)
    for (long c : row) t += c;
  return t;
}

long ConfusionMatrix::correct() const {
  long t = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
  return t;
}

long ConfusionMatrix::unparseable() const {
  long t = 0;
  for (const auto& row : counts) t += row.back();
  return t;
}

double Accuracy::fraction() const {
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

std::string Accuracy::percent() const { return format_percent(fraction()); }

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * fraction);
  return buf;
}

Accuracy accuracy(const std::vector<std::string>& predictions,
                  const std::vector<std::string>& truths) {
  if (predictions.size() != truths.size())
    throw DomainError("predictions and truths must have equal length");
  if (predictions.empty()) throw DomainError("accuracy of an empty record set is undefined");
  Accuracy acc;
  acc.total = static_cast<long>(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == truths[i]) ++acc.correct;
  }
  return acc;
}

F1Mode parse_f1_mode(const std::string& name) {
  if (name == "macro") return F1Mode::Macro;
  if (name == "micro") return F1Mode::Micro;
  if (name == "weighted") return F1Mode::Weighted;
  throw ConfigError("f1_mode must be macro, micro, or weighted");
}

const char* f1_mode_name(F1Mode mode) {
  switch (mode) {
    case F1Mode::Macro: return "macro";
    case F1Mode::Micro: return "micro";
    case F1Mode::Weighted: return "weighted";
  }
  return "?";
}

std::vector<double> per_class_f1(const ConfusionMatrix& cm) {
  const std::size_t k = cm.labels.size();
  std::vector<double> f1(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    long tp = cm.counts[c][c];
    long fn = 0, fp = 0;
    for (std::size_t j = 0; j < k + 1; ++j) {
      if (j != c) fn += cm.counts[c][j];
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (i != c) fp += cm.counts[i][c];
    }
    long denom = 2 * tp + fp + fn;
    f1[c] = denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  }
  return f1;
}

double macro_f1(const std::vector<std::string>& predictions,
                const std::vector<std::string>& truths,
                const std::vector<std::string>& roster) {
  ConfusionMatrix cm = ConfusionMatrix::build(predictions, truths, roster);
  return f1_score(cm, F1Mode::Macro);
}

double f1_score(const ConfusionMatrix& cm, F1Mode mode) {
  const std::size_t k = cm.labels.size();
  if (k == 0) throw DomainError("empty roster");
  std::vector<double> f1 = per_class_f1(cm);

  switch (mode) {
    case F1Mode::Macro: {
      double sum = 0.0;
      for (double v : f1) sum += v;
      return sum / static_cast<double>(k);
    }
    case F1Mode::Micro: {
      // Single-label multi-class micro-F1: global TP over all decisions.
      long tp = cm.correct();
      long total = cm.total();
      return total == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(total);
    }
    case F1Mode::Weighted: {
      double sum = 0.0;
      long total = cm.total();
      if (total == 0) return 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        long support = 0;
        for (long v : cm.counts[c]) support += v;
        sum += f1[c] * static_cast<double>(support);
      }
      return sum / static_cast<double>(total);
    }
  }
  throw DomainError("unknown f1 mode");
}

}  // namespace hrrp
