#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hrrpbench/scatter.hpp"
#include "hrrpbench/signal.hpp"

namespace hrrp {

enum class FeatureScheme { HrrpAmplitude, ScFeatures };

struct FeatureVector {
  std::vector<double> values;
  FeatureScheme scheme;
};

// L-infinity-normalized amplitude vector, length N_r.
FeatureVector featurize_hrrp(const RangeProfile& profile);

// Interleaved (position_index / n_r, amplitude) pairs in non-increasing
// amplitude order (ties: lower index), zero-padded to 2 * m_sc entries.
FeatureVector featurize_sc(const ScatteringCenterSet& centers, int m_sc, int n_r);

// Plain squared Euclidean distance with fixed summation order; shared by
// the 1-NN classifier and the nearest-neighbor mock so both rank supports
// bit-identically.
double squared_distance(const FeatureVector& a, const FeatureVector& b);

enum class ClassifierKind { LinearSvm, RandomForest, OneNn };

ClassifierKind parse_classifier_kind(const std::string& name);  // "linear_svm" | ...
const char* classifier_kind_name(ClassifierKind kind);

// One-vs-rest hinge loss, L2 penalty, deterministic full-batch subgradient
// descent with step step_scale / sqrt(t).
struct SvmHyperParams {
  double lambda = 0.01;
  int iterations = 500;
  double step_scale = 0.1;
};

// Seeded bootstrap, Gini splits, depth cap.
struct ForestHyperParams {
  int num_trees = 25;
  int max_depth = 4;
};

struct BaselineHyperParams {
  SvmHyperParams svm;
  ForestHyperParams forest;
};

class ClassifierModel {
 public:
  ClassifierKind kind() const { return kind_; }
  const std::vector<std::string>& roster() const { return roster_; }
  FeatureScheme scheme() const { return scheme_; }

  // Roster-class prediction; ConfigError on feature-scheme mismatch.
  std::string predict(const FeatureVector& feature) const;

 private:
  friend ClassifierModel train(ClassifierKind, const std::vector<FeatureVector>&,
                               const std::vector<std::string>&, const BaselineHyperParams&,
                               std::uint64_t);
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  ClassifierKind kind_ = ClassifierKind::OneNn;
  FeatureScheme scheme_ = FeatureScheme::ScFeatures;
  std::vector<std::string> roster_;
};

// Deterministic for fixed (inputs, hyperparams, seed). The roster is the
// order of first appearance in `labels`; ties in prediction break toward the
// earlier roster entry. Throws TrainError when labels cover fewer than 2
// classes.
ClassifierModel train(ClassifierKind kind, const std::vector<FeatureVector>& features,
                      const std::vector<std::string>& labels,
                      const BaselineHyperParams& params, std::uint64_t seed);

std::string predict(const ClassifierModel& model, const FeatureVector& feature);

}  // namespace hrrp
