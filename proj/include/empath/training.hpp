#pragma once

/// Dataset-to-models pipeline: window-level feature extraction on the
/// engine's hop grid, a quadrant-stratified train/holdout split, and the
/// (modality x dimension) forest trainer.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "empath/config.hpp"
#include "empath/engine.hpp"
#include "empath/errors.hpp"
#include "empath/forest.hpp"
#include "empath/labels.hpp"
#include "empath/signal.hpp"

namespace empath {

/// Extracts one feature vector per full window of the trial's stream,
/// using the same window/hop grid and preprocessing as the engine. Windows
/// that cannot support extraction (e.g. no detectable beats) are skipped.
inline std::vector<FeatureVector> window_features(const TrialRecord& trial, SignalKind kind,
                                                  const EngineConfig& cfg) {
  std::vector<FeatureVector> features;
  const auto it = trial.streams.find(kind);
  if (it == trial.streams.end() || it->second.empty()) return features;
  const std::vector<SampleBlock>& blocks = it->second;
  const double fs = blocks.front().sample_rate;
  const std::size_t expected = static_cast<std::size_t>(std::floor(cfg.window_s * fs + 1e-6));
  const double t_end = blocks.back().end_time();

  for (double t = cfg.window_s; t <= t_end + 1e-9; t += cfg.hop_s) {
    SampleBlock window_block;
    window_block.kind = kind;
    window_block.sample_rate = fs;
    window_block.channels = blocks.front().channels;
    window_block.data.assign(window_block.channels.size(), {});
    bool have_start = false;
    for (const SampleBlock& b : blocks) {
      const auto clamp_index = [&](double at) {
        const double pos = (at - b.start_time) * b.sample_rate;
        if (pos <= 0.0) return std::size_t{0};
        return std::min(static_cast<std::size_t>(std::ceil(pos - 1e-6)), b.sample_count());
      };
      const std::size_t lo = clamp_index(t - cfg.window_s);
      const std::size_t hi = clamp_index(t);
      if (lo >= hi) continue;
      if (!have_start) {
        window_block.start_time = b.time_at(lo);
        have_start = true;
      }
      for (std::size_t c = 0; c < b.channel_count(); ++c)
        window_block.data[c].insert(window_block.data[c].end(),
                                    b.data[c].begin() + static_cast<std::ptrdiff_t>(lo),
                                    b.data[c].begin() + static_cast<std::ptrdiff_t>(hi));
    }
    if (!have_start || window_block.sample_count() + 1 < expected) continue;
    try {
      const SampleBlock pre =
          preprocess(window_block, cfg.eeg_filter, cfg.ppg_filter, cfg.eda_filter);
      features.push_back(extract_features(pre, cfg.features));
    } catch (const InsufficientDataError&) {
      // window unusable for this modality; the engine would skip it too
    }
  }
  return features;
}

/// Splits trials into (train, holdout), stratified by topic category so no
/// quadrant can vanish from either side. Within each category the last
/// round(frac * n) trials in dataset order are held out.
inline std::pair<std::vector<TrialRecord>, std::vector<TrialRecord>> split_stratified(
    const std::vector<TrialRecord>& trials, double holdout_frac) {
  if (holdout_frac < 0.0 || holdout_frac >= 1.0)
    throw ConfigError("holdout fraction must be in [0, 1)");
  std::map<Quadrant, std::vector<std::size_t>> by_category;
  for (std::size_t i = 0; i < trials.size(); ++i)
    by_category[trials[i].topic_category].push_back(i);

  std::vector<bool> hold(trials.size(), false);
  for (const auto& [category, indices] : by_category) {
    const std::size_t n_hold = static_cast<std::size_t>(
        std::llround(holdout_frac * static_cast<double>(indices.size())));
    for (std::size_t k = indices.size() - n_hold; k < indices.size(); ++k)
      hold[indices[k]] = true;
  }
  std::pair<std::vector<TrialRecord>, std::vector<TrialRecord>> out;
  for (std::size_t i = 0; i < trials.size(); ++i)
    (hold[i] ? out.second : out.first).push_back(trials[i]);
  return out;
}

struct TrainingSummary {
  struct PerModel {
    SignalKind modality;
    EmotionDim dimension;
    std::size_t n_windows = 0;
    double train_accuracy = 0.0;
  };
  std::vector<PerModel> models;
  std::vector<std::string> warnings;
  std::size_t trial_count = 0;
};

/// Trains up to six models (three modalities x two dimensions) from labeled
/// trials. Modalities absent from every trial are skipped with a warning,
/// mirroring sessions where a sensor never came up. Trials shorter than one
/// window are rejected.
inline ModelSet train_models(const std::vector<TrialRecord>& trials, const EngineConfig& cfg,
                             const ForestHyperparams& hyperparams, std::uint64_t seed,
                             TrainingSummary* summary = nullptr) {
  if (trials.empty()) throw TrainingError("train_models: empty dataset");
  cfg.validate();
  for (const TrialRecord& trial : trials) {
    trial.validate();
    for (const auto& [kind, blocks] : trial.streams)
      if (!blocks.empty() && blocks.back().end_time() < cfg.window_s)
        throw ValidationError("trial '" + trial.trial_id + "': stream " +
                              std::string(to_string(kind)) + " is shorter than one window (" +
                              std::to_string(cfg.window_s) + " s)");
  }

  TrainingSummary local;
  TrainingSummary& sum = summary ? *summary : local;
  sum.trial_count = trials.size();

  ModelSet models;
  for (SignalKind kind : kSignalKinds) {
    std::vector<FeatureVector> features;
    std::vector<BinaryLevel> arousal_labels, valence_labels;
    for (const TrialRecord& trial : trials) {
      auto trial_features = window_features(trial, kind, cfg);
      for (auto& fv : trial_features) {
        features.push_back(std::move(fv));
        arousal_labels.push_back(binarize_arousal(trial.label.arousal_rate));
        valence_labels.push_back(binarize_valence(trial.label.valence_rate, cfg.valence_polarity));
      }
    }
    if (features.empty()) {
      sum.warnings.push_back(std::string("no usable ") + to_string(kind) +
                             " windows; skipping its models");
      continue;
    }
    for (EmotionDim dim : kEmotionDims) {
      const auto& labels = dim == EmotionDim::Arousal ? arousal_labels : valence_labels;
      ForestModel model = train_forest(features, labels, kind, dim, hyperparams,
                                       Rng::derive(seed, fnv1a(ModelSet::file_name(kind, dim))));
      sum.models.push_back({kind, dim, features.size(), model.train_accuracy});
      models.set(std::move(model));
    }
  }
  if (models.count() == 0) throw TrainingError("train_models: no modality produced features");
  return models;
}

}  // namespace empath
