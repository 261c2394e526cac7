#include "hrrpbench/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "hrrpbench/errors.hpp"
#include "hrrpbench/rng.hpp"

namespace hrrp {

FeatureVector featurize_hrrp(const RangeProfile& profile) {
  AmplitudeProfile norm = normalize(amplitude_profile(profile));
  return {std::move(norm.values), FeatureScheme::HrrpAmplitude};
}

FeatureVector featurize_sc(const ScatteringCenterSet& centers, int m_sc, int n_r) {
  if (m_sc < 1) throw DomainError("m_sc must be positive");
  if (n_r < 1) throw DomainError("n_r must be positive");
  if (static_cast<int>(centers.size()) > m_sc)
    throw DomainError("center set larger than m_sc");

  std::vector<ScatteringCenter> ordered = centers.centers;
  std::sort(ordered.begin(), ordered.end(),
            [](const ScatteringCenter& a, const ScatteringCenter& b) {
              if (a.amplitude != b.amplitude) return a.amplitude > b.amplitude;
              return a.position_index < b.position_index;
            });

  FeatureVector fv;
  fv.scheme = FeatureScheme::ScFeatures;
  fv.values.assign(static_cast<std::size_t>(2 * m_sc), 0.0);
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    fv.values[2 * i] = static_cast<double>(ordered[i].position_index) / static_cast<double>(n_r);
    fv.values[2 * i + 1] = ordered[i].amplitude;
  }
  return fv;
}

double squared_distance(const FeatureVector& a, const FeatureVector& b) {
  if (a.values.size() != b.values.size())
    throw ConfigError("feature vectors have different lengths");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    double d = a.values[i] - b.values[i];
    acc += d * d;
  }
  return acc;
}

ClassifierKind parse_classifier_kind(const std::string& name) {
  if (name == "linear_svm") return ClassifierKind::LinearSvm;
  if (name == "random_forest") return ClassifierKind::RandomForest;
  if (name == "one_nn") return ClassifierKind::OneNn;
  throw ConfigError("unknown classifier kind '" + name + "'");
}

const char* classifier_kind_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::LinearSvm: return "linear_svm";
    case ClassifierKind::RandomForest: return "random_forest";
    case ClassifierKind::OneNn: return "one_nn";
  }
  return "?";
}

// ---------------------------------------------------------------------------

namespace {

struct TreeNode {
  int feature = -1;       // -1 marks a leaf
  double threshold = 0.0;
  int left = -1, right = -1;
  int label = 0;  // roster index at leaves
};

struct Tree {
  std::vector<TreeNode> nodes;

  int predict(const std::vector<double>& x) const {
    int node = 0;
    while (nodes[node].feature >= 0) {
      node = x[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                             : nodes[node].right;
    }
    return nodes[node].label;
  }
};

}  // namespace

struct ClassifierModel::Impl {
  std::size_t dims = 0;
  // linear_svm: one (w, b) per roster class
  std::vector<std::vector<double>> weights;
  std::vector<double> biases;
  // one_nn: stored exemplars
  std::vector<FeatureVector> exemplars;
  std::vector<int> exemplar_labels;
  // random_forest
  std::vector<Tree> trees;
};

namespace {

int majority_label(const std::vector<int>& labels, const std::vector<int>& indices,
                   int num_classes) {
  std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
  for (int i : indices) counts[static_cast<std::size_t>(labels[i])]++;
  int best = 0;
  for (int c = 1; c < num_classes; ++c) {
    if (counts[c] > counts[best]) best = c;  // ties keep the earlier roster class
  }
  return best;
}

double gini(const std::vector<int>& counts, int total) {
  if (total == 0) return 0.0;
  double g = 1.0;
  for (int c : counts) {
    double p = static_cast<double>(c) / total;
    g -= p * p;
  }
  return g;
}

void build_tree_node(Tree& tree, const std::vector<FeatureVector>& features,
                     const std::vector<int>& labels, std::vector<int> indices, int depth,
                     const ForestHyperParams& params, int num_classes, Rng& rng) {
  const int node_index = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();

  bool pure = true;
  for (std::size_t i = 1; i < indices.size(); ++i) {
    if (labels[indices[i]] != labels[indices[0]]) {
      pure = false;
      break;
    }
  }
  if (pure || depth >= params.max_depth || indices.size() < 2) {
    tree.nodes[node_index].label = majority_label(labels, indices, num_classes);
    return;
  }

  const int dims = static_cast<int>(features[0].values.size());
  int subset = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(dims))));
  std::vector<int> feature_pool(static_cast<std::size_t>(dims));
  for (int i = 0; i < dims; ++i) feature_pool[static_cast<std::size_t>(i)] = i;
  rng.shuffle(feature_pool);
  feature_pool.resize(static_cast<std::size_t>(subset));
  std::sort(feature_pool.begin(), feature_pool.end());

  int best_feature = -1;
  double best_threshold = 0.0;
  double best_impurity = 1e300;
  for (int f : feature_pool) {
    std::vector<double> values;
    for (int i : indices) values.push_back(features[i].values[static_cast<std::size_t>(f)]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t v = 0; v + 1 < values.size(); ++v) {
      double threshold = 0.5 * (values[v] + values[v + 1]);
      std::vector<int> left_counts(static_cast<std::size_t>(num_classes), 0);
      std::vector<int> right_counts(static_cast<std::size_t>(num_classes), 0);
      int left_total = 0, right_total = 0;
      for (int i : indices) {
        if (features[i].values[static_cast<std::size_t>(f)] <= threshold) {
          left_counts[static_cast<std::size_t>(labels[i])]++;
          ++left_total;
        } else {
          right_counts[static_cast<std::size_t>(labels[i])]++;
          ++right_total;
        }
      }
      double impurity = (left_total * gini(left_counts, left_total) +
                         right_total * gini(right_counts, right_total)) /
                        static_cast<double>(indices.size());
      if (impurity < best_impurity) {
        best_impurity = impurity;
        best_feature = f;
        best_threshold = threshold;
      }
    }
  }

  if (best_feature < 0) {
    tree.nodes[node_index].label = majority_label(labels, indices, num_classes);
    return;
  }

  std::vector<int> left_indices, right_indices;
  for (int i : indices) {
    if (features[i].values[static_cast<std::size_t>(best_feature)] <= best_threshold) {
      left_indices.push_back(i);
    } else {
      right_indices.push_back(i);
    }
  }
  if (left_indices.empty() || right_indices.empty()) {
    tree.nodes[node_index].label = majority_label(labels, indices, num_classes);
    return;
  }

  tree.nodes[node_index].feature = best_feature;
  tree.nodes[node_index].threshold = best_threshold;
  tree.nodes[node_index].left = static_cast<int>(tree.nodes.size());
  build_tree_node(tree, features, labels, std::move(left_indices), depth + 1, params,
                  num_classes, rng);
  tree.nodes[node_index].right = static_cast<int>(tree.nodes.size());
  build_tree_node(tree, features, labels, std::move(right_indices), depth + 1, params,
                  num_classes, rng);
}

}  // namespace

ClassifierModel train(ClassifierKind kind, const std::vector<FeatureVector>& features,
                      const std::vector<std::string>& labels,
                      const BaselineHyperParams& params, std::uint64_t seed) {
  if (features.empty() || features.size() != labels.size())
    throw TrainError("features and labels must be non-empty and equal-sized");
  for (const auto& f : features) {
    if (f.scheme != features[0].scheme || f.values.size() != features[0].values.size())
      throw TrainError("inconsistent feature vectors");
  }

  ClassifierModel model;
  model.kind_ = kind;
  model.scheme_ = features[0].scheme;
  for (const auto& label : labels) {
    if (std::find(model.roster_.begin(), model.roster_.end(), label) == model.roster_.end())
      model.roster_.push_back(label);
  }
  if (model.roster_.size() < 2) throw TrainError("training needs at least 2 classes");

  std::vector<int> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y[i] = static_cast<int>(std::find(model.roster_.begin(), model.roster_.end(), labels[i]) -
                            model.roster_.begin());
  }

  auto impl = std::make_shared<ClassifierModel::Impl>();
  const int num_classes = static_cast<int>(model.roster_.size());
  const std::size_t dims = features[0].values.size();
  const std::size_t n = features.size();
  impl->dims = dims;

  switch (kind) {
    case ClassifierKind::OneNn: {
      impl->exemplars = features;
      impl->exemplar_labels = y;
      break;
    }
    case ClassifierKind::LinearSvm: {
      impl->weights.assign(static_cast<std::size_t>(num_classes),
                           std::vector<double>(dims, 0.0));
      impl->biases.assign(static_cast<std::size_t>(num_classes), 0.0);
      for (int c = 0; c < num_classes; ++c) {
        auto& w = impl->weights[static_cast<std::size_t>(c)];
        double& b = impl->biases[static_cast<std::size_t>(c)];
        for (int t = 1; t <= params.svm.iterations; ++t) {
          const double step = params.svm.step_scale / std::sqrt(static_cast<double>(t));
          std::vector<double> grad(dims, 0.0);
          double grad_b = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            const double target = y[i] == c ? 1.0 : -1.0;
            double margin = b;
            for (std::size_t d = 0; d < dims; ++d) margin += w[d] * features[i].values[d];
            if (target * margin < 1.0) {
              for (std::size_t d = 0; d < dims; ++d) grad[d] -= target * features[i].values[d];
              grad_b -= target;
            }
          }
          const double inv_n = 1.0 / static_cast<double>(n);
          for (std::size_t d = 0; d < dims; ++d) {
            grad[d] = grad[d] * inv_n + 2.0 * params.svm.lambda * w[d];
            w[d] -= step * grad[d];
          }
          b -= step * grad_b * inv_n;
        }
      }
      break;
    }
    case ClassifierKind::RandomForest: {
      for (int t = 0; t < params.forest.num_trees; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        std::vector<int> bootstrap(n);
        for (std::size_t i = 0; i < n; ++i)
          bootstrap[i] = static_cast<int>(rng.below(n));
        Tree tree;
        build_tree_node(tree, features, y, std::move(bootstrap), 0, params.forest,
                        num_classes, rng);
        impl->trees.push_back(std::move(tree));
      }
      break;
    }
  }

  model.impl_ = std::move(impl);
  return model;
}

std::string ClassifierModel::predict(const FeatureVector& feature) const {
  if (feature.scheme != scheme_)
    throw ConfigError("feature scheme does not match the trained model");
  if (!impl_) throw ConfigError("model is untrained");
  if (feature.values.size() != impl_->dims)
    throw ConfigError("feature length does not match the trained model");

  switch (kind_) {
    case ClassifierKind::OneNn: {
      std::size_t best = 0;
      double best_distance = squared_distance(feature, impl_->exemplars[0]);
      for (std::size_t i = 1; i < impl_->exemplars.size(); ++i) {
        double d = squared_distance(feature, impl_->exemplars[i]);
        if (d < best_distance) {  // ties keep the earliest exemplar
          best_distance = d;
          best = i;
        }
      }
      return roster_[static_cast<std::size_t>(impl_->exemplar_labels[best])];
    }
    case ClassifierKind::LinearSvm: {
      std::size_t best = 0;
      double best_value = -1e300;
      for (std::size_t c = 0; c < impl_->weights.size(); ++c) {
        double value = impl_->biases[c];
        for (std::size_t d = 0; d < feature.values.size(); ++d)
          value += impl_->weights[c][d] * feature.values[d];
        if (value > best_value) {  // ties keep the earlier roster class
          best_value = value;
          best = c;
        }
      }
      return roster_[best];
    }
    case ClassifierKind::RandomForest: {
      std::vector<int> votes(roster_.size(), 0);
      for (const auto& tree : impl_->trees) votes[static_cast<std::size_t>(tree.predict(feature.values))]++;
      std::size_t best = 0;
      for (std::size_t c = 1; c < votes.size(); ++c) {
        if (votes[c] > votes[best]) best = c;
      }
      return roster_[best];
    }
  }
  throw ConfigError("unknown classifier kind");
}

std::string predict(const ClassifierModel& model, const FeatureVector& feature) {
  return model.predict(feature);
}

}  // namespace hrrp
