#pragma once

/// Random forest of CART trees for binary arousal/valence classification.
///
/// Training is reproducible: every tree derives its own RNG stream from
/// (seed, tree index), draws a stratified bootstrap (class counts
/// preserved), and grows greedily on Gini impurity with a random feature
/// subset per split. Prediction is a majority vote over trees; an even
/// split votes high (+1) by convention.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "empath/errors.hpp"
#include "empath/feature_vector.hpp"
#include "empath/rng.hpp"
#include "empath/types.hpp"

namespace empath {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kModelFormatName = "empath-forest";

struct ForestHyperparams {
  int n_trees = 100;
  int max_depth = 8;
  int min_leaf = 2;
  int features_per_split = 0;  // 0 = ceil(sqrt(d))

  void validate() const {
    if (n_trees < 1) throw ConfigError("n_trees must be >= 1");
    if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
    if (min_leaf < 1) throw ConfigError("min_leaf must be >= 1");
    if (features_per_split < 0) throw ConfigError("features_per_split must be >= 0");
  }
};

/// Axis-aligned threshold node. leaf == 0 marks an internal node; otherwise
/// leaf holds the class in {-1, +1}. Children index into the tree's node
/// array; values strictly below the threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int leaf = 0;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  int predict(const std::vector<double>& values) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].leaf == 0) {
      const TreeNode& n = nodes[static_cast<std::size_t>(i)];
      i = values[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].leaf;
  }
};

struct ForestModel {
  SignalKind modality = SignalKind::EEG;
  EmotionDim dimension = EmotionDim::Arousal;
  std::vector<std::string> feature_names;
  ForestHyperparams hyperparams;
  std::uint64_t train_seed = 0;
  double train_accuracy = 0.0;
  std::vector<DecisionTree> trees;

  void check_compatible(const FeatureVector& features) const {
    if (features.modality != modality)
      throw ValidationError(std::string("model expects ") + to_string(modality) +
                            " features, got " + to_string(features.modality));
    if (features.names != feature_names)
      throw ValidationError("feature name list does not match the model");
  }

  /// Signed vote sum over trees (diagnostic).
  int vote_sum(const FeatureVector& features) const {
    check_compatible(features);
    int sum = 0;
    for (const DecisionTree& tree : trees) sum += tree.predict(features.values);
    return sum;
  }

  /// Majority vote; ties over an even forest go high (+1).
  BinaryLevel predict(const FeatureVector& features) const {
    return vote_sum(features) < 0 ? BinaryLevel::Low : BinaryLevel::High;
  }
};

namespace detail {

struct SplitScan {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted child Gini
};

inline double gini(std::size_t pos, std::size_t total) {
  if (total == 0) return 0.0;
  const double p = static_cast<double>(pos) / static_cast<double>(total);
  return 2.0 * p * (1.0 - p);
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<FeatureVector>& data, const std::vector<int>& labels,
              const ForestHyperparams& hp, int features_per_split, Rng& rng)
      : data_(data), labels_(labels), hp_(hp), m_(features_per_split), rng_(rng) {}

  DecisionTree build(const std::vector<std::size_t>& sample) {
    tree_.nodes.clear();
    grow(sample, 0);
    return std::move(tree_);
  }

 private:
  int grow(const std::vector<std::size_t>& sample, int depth) {
    std::size_t pos = 0;
    for (std::size_t i : sample)
      if (labels_[i] > 0) ++pos;
    const std::size_t n = sample.size();
    const bool pure = pos == 0 || pos == n;
    if (pure || depth >= hp_.max_depth || n < 2 * static_cast<std::size_t>(hp_.min_leaf))
      return make_leaf(pos, n);

    const SplitScan split = best_split(sample, gini(pos, n));
    if (!split.found) return make_leaf(pos, n);

    std::vector<std::size_t> left, right;
    left.reserve(n);
    right.reserve(n);
    for (std::size_t i : sample) {
      if (data_[i].values[static_cast<std::size_t>(split.feature)] < split.threshold)
        left.push_back(i);
      else
        right.push_back(i);
    }
    const int node_index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[static_cast<std::size_t>(node_index)].feature = split.feature;
    tree_.nodes[static_cast<std::size_t>(node_index)].threshold = split.threshold;
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    tree_.nodes[static_cast<std::size_t>(node_index)].left = l;
    tree_.nodes[static_cast<std::size_t>(node_index)].right = r;
    return node_index;
  }

  int make_leaf(std::size_t pos, std::size_t n) {
    TreeNode leaf;
    leaf.leaf = 2 * pos >= n ? 1 : -1;  // tie votes high
    tree_.nodes.push_back(leaf);
    return static_cast<int>(tree_.nodes.size()) - 1;
  }

  SplitScan best_split(const std::vector<std::size_t>& sample, double parent_impurity) {
    // Draw m distinct candidate features (partial Fisher-Yates).
    const std::size_t d = data_.front().values.size();
    std::vector<std::size_t> features(d);
    for (std::size_t i = 0; i < d; ++i) features[i] = i;
    const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(m_), d);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_.below(d - i));
      std::swap(features[i], features[j]);
    }

    SplitScan best;
    best.impurity = parent_impurity - 1e-12;  // require strict improvement
    std::vector<std::pair<double, int>> column(sample.size());
    const std::size_t n = sample.size();
    const std::size_t min_leaf = static_cast<std::size_t>(hp_.min_leaf);
    std::size_t total_pos = 0;
    for (std::size_t i : sample)
      if (labels_[i] > 0) ++total_pos;

    for (std::size_t fi = 0; fi < m; ++fi) {
      const std::size_t f = features[fi];
      for (std::size_t k = 0; k < n; ++k)
        column[k] = {data_[sample[k]].values[f], labels_[sample[k]]};
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::size_t left_pos = 0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        if (column[k].second > 0) ++left_pos;
        const std::size_t nl = k + 1, nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        if (!(column[k].first < column[k + 1].first)) continue;  // no boundary here
        const double impurity = (static_cast<double>(nl) * gini(left_pos, nl) +
                                 static_cast<double>(nr) * gini(total_pos - left_pos, nr)) /
                                static_cast<double>(n);
        if (impurity < best.impurity) {
          best.found = true;
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (column[k].first + column[k + 1].first);
          best.impurity = impurity;
        }
      }
    }
    return best;
  }

  const std::vector<FeatureVector>& data_;
  const std::vector<int>& labels_;
  const ForestHyperparams& hp_;
  int m_;
  Rng& rng_;
  DecisionTree tree_;
};

}  // namespace detail

/// Fits one forest for (modality, dimension). Requires at least two
/// examples of each class and identical feature name lists.
inline ForestModel train_forest(const std::vector<FeatureVector>& data,
                                const std::vector<BinaryLevel>& labels, SignalKind modality,
                                EmotionDim dimension, const ForestHyperparams& hyperparams,
                                std::uint64_t seed) {
  hyperparams.validate();
  if (data.size() != labels.size())
    throw ValidationError("train_forest: data/labels size mismatch");
  if (data.empty()) throw TrainingError("train_forest: empty dataset");
  for (const FeatureVector& fv : data) {
    fv.validate();
    if (fv.modality != modality)
      throw ValidationError(std::string("train_forest: expected ") + to_string(modality) +
                            " features, got " + to_string(fv.modality));
    if (fv.names != data.front().names)
      throw ValidationError("train_forest: inconsistent feature names across dataset");
  }
  std::vector<std::size_t> pos_idx, neg_idx;
  std::vector<int> int_labels(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int_labels[i] = to_int(labels[i]);
    (int_labels[i] > 0 ? pos_idx : neg_idx).push_back(i);
  }
  if (pos_idx.size() < 2 || neg_idx.size() < 2)
    throw TrainingError("train_forest: need at least 2 examples per class (got " +
                        std::to_string(neg_idx.size()) + " low / " +
                        std::to_string(pos_idx.size()) + " high)");

  const std::size_t d = data.front().values.size();
  int m = hyperparams.features_per_split;
  if (m == 0) m = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));

  ForestModel model;
  model.modality = modality;
  model.dimension = dimension;
  model.feature_names = data.front().names;
  model.hyperparams = hyperparams;
  model.train_seed = seed;
  model.trees.reserve(static_cast<std::size_t>(hyperparams.n_trees));

  for (int t = 0; t < hyperparams.n_trees; ++t) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(t)));
    // Stratified bootstrap: per-class sampling with replacement keeps the
    // class balance of every tree equal to the dataset's.
    std::vector<std::size_t> sample;
    sample.reserve(data.size());
    for (const auto* cls : {&neg_idx, &pos_idx})
      for (std::size_t k = 0; k < cls->size(); ++k)
        sample.push_back((*cls)[static_cast<std::size_t>(rng.below(cls->size()))]);
    detail::TreeBuilder builder(data, int_labels, hyperparams, m, rng);
    model.trees.push_back(builder.build(sample));
  }

  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (to_int(model.predict(data[i])) == int_labels[i]) ++correct;
  model.train_accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  return model;
}

// ─── Persistence ─────────────────────────────────────────────────────────────

namespace detail {

inline nlohmann::ordered_json node_to_json(const DecisionTree& tree, int index,
                                           const std::vector<std::string>& names) {
  const TreeNode& n = tree.nodes[static_cast<std::size_t>(index)];
  nlohmann::ordered_json j;
  if (n.leaf != 0) {
    j["leaf"] = n.leaf;
    return j;
  }
  j["feature"] = names[static_cast<std::size_t>(n.feature)];
  j["threshold"] = n.threshold;
  j["low"] = node_to_json(tree, n.left, names);
  j["high"] = node_to_json(tree, n.right, names);
  return j;
}

inline int node_from_json(const nlohmann::json& j, DecisionTree& tree,
                          const std::vector<std::string>& names) {
  const int index = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("leaf")) {
    const int leaf = j.at("leaf").get<int>();
    if (leaf != 1 && leaf != -1) throw ParseError("model: leaf class must be -1 or +1");
    tree.nodes[static_cast<std::size_t>(index)].leaf = leaf;
    return index;
  }
  const std::string feature = j.at("feature").get<std::string>();
  const auto it = std::find(names.begin(), names.end(), feature);
  if (it == names.end()) throw ParseError("model: split on unknown feature '" + feature + "'");
  tree.nodes[static_cast<std::size_t>(index)].feature =
      static_cast<int>(it - names.begin());
  tree.nodes[static_cast<std::size_t>(index)].threshold = j.at("threshold").get<double>();
  const int l = node_from_json(j.at("low"), tree, names);
  const int r = node_from_json(j.at("high"), tree, names);
  tree.nodes[static_cast<std::size_t>(index)].left = l;
  tree.nodes[static_cast<std::size_t>(index)].right = r;
  return index;
}

}  // namespace detail

inline std::string model_to_json(const ForestModel& model) {
  nlohmann::ordered_json j;
  j["format"] = kModelFormatName;
  j["version"] = kModelFormatVersion;
  j["modality"] = to_string(model.modality);
  j["dimension"] = to_string(model.dimension);
  j["feature_names"] = model.feature_names;
  j["hyperparams"] = {{"n_trees", model.hyperparams.n_trees},
                      {"max_depth", model.hyperparams.max_depth},
                      {"min_leaf", model.hyperparams.min_leaf},
                      {"features_per_split", model.hyperparams.features_per_split}};
  j["train_seed"] = model.train_seed;
  j["train_accuracy"] = model.train_accuracy;
  nlohmann::ordered_json trees = nlohmann::ordered_json::array();
  for (const DecisionTree& tree : model.trees)
    trees.push_back(detail::node_to_json(tree, 0, model.feature_names));
  j["trees"] = std::move(trees);
  return j.dump(1) + "\n";
}

inline ForestModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model: invalid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kModelFormatName)
      throw ParseError("model: not a forest model file");
    if (j.at("version").get<int>() != kModelFormatVersion)
      throw ParseError("model: incompatible format version " +
                       std::to_string(j.at("version").get<int>()) + " (expected " +
                       std::to_string(kModelFormatVersion) + ")");
    ForestModel model;
    model.modality = signal_kind_from_string(j.at("modality").get<std::string>());
    model.dimension = emotion_dim_from_string(j.at("dimension").get<std::string>());
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    const auto& hp = j.at("hyperparams");
    model.hyperparams.n_trees = hp.at("n_trees").get<int>();
    model.hyperparams.max_depth = hp.at("max_depth").get<int>();
    model.hyperparams.min_leaf = hp.at("min_leaf").get<int>();
    model.hyperparams.features_per_split = hp.at("features_per_split").get<int>();
    model.train_seed = j.at("train_seed").get<std::uint64_t>();
    model.train_accuracy = j.at("train_accuracy").get<double>();
    for (const auto& tj : j.at("trees")) {
      DecisionTree tree;
      detail::node_from_json(tj, tree, model.feature_names);
      model.trees.push_back(std::move(tree));
    }
    if (model.trees.empty()) throw ParseError("model: no trees");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model: missing or mistyped field: ") + e.what());
  }
}

inline void save_model(const ForestModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << model_to_json(model);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline ForestModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file '" + path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace empath
