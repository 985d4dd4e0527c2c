#pragma once

/// Engine configuration: window/hop cadence, fusion weights, valence
/// polarity, per-modality filter specs, and feature extraction parameters.
/// Serialized as JSON; every field is optional and defaults apply.

#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "empath/errors.hpp"
#include "empath/features.hpp"
#include "empath/fusion.hpp"
#include "empath/labels.hpp"
#include "empath/preprocess.hpp"

namespace empath {

struct EngineConfig {
  double window_s = 20.0;
  double hop_s = 5.0;
  double buffer_capacity_s = 30.0;
  FusionWeights arousal_weights = default_arousal_weights();
  FusionWeights valence_weights = default_valence_weights();
  ValencePolarity valence_polarity = ValencePolarity::Inverted;
  FilterSpec eeg_filter = default_eeg_filter();
  FilterSpec ppg_filter = default_ppg_filter();
  FilterSpec eda_filter = default_eda_filter();
  FeatureParams features;
  std::string models_dir;  // default model directory; CLI flags override

  void validate() const {
    if (!(hop_s > 0.0)) throw ConfigError("hop_s must be positive");
    if (!(window_s >= hop_s)) throw ConfigError("window_s must be at least hop_s");
    if (!(buffer_capacity_s >= window_s))
      throw ConfigError("buffer_capacity_s must be at least window_s");
    arousal_weights.validate();
    valence_weights.validate();
    if (features.eda.tonic_cutoff_hz <= 0.0) throw ConfigError("tonic cutoff must be positive");
  }

  BinaryLevel binarized_arousal(int rate) const { return binarize_arousal(rate); }
  BinaryLevel binarized_valence(int rate) const {
    return binarize_valence(rate, valence_polarity);
  }
};

namespace detail {

inline nlohmann::ordered_json filter_to_json(const FilterSpec& spec) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(spec.kind);
  if (spec.low_hz) j["low_hz"] = *spec.low_hz;
  if (spec.high_hz) j["high_hz"] = *spec.high_hz;
  j["order"] = spec.order;
  j["zero_phase"] = spec.zero_phase;
  return j;
}

inline FilterSpec filter_from_json(const nlohmann::json& j, FilterSpec base) {
  if (j.contains("kind")) base.kind = filter_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("low_hz")) base.low_hz = j.at("low_hz").get<double>();
  if (j.contains("high_hz")) base.high_hz = j.at("high_hz").get<double>();
  if (j.contains("order")) base.order = j.at("order").get<int>();
  if (j.contains("zero_phase")) base.zero_phase = j.at("zero_phase").get<bool>();
  return base;
}

inline nlohmann::ordered_json weights_to_json(const FusionWeights& w) {
  return {{"eeg", w.eeg}, {"eda", w.eda}, {"ppg", w.ppg}};
}

inline FusionWeights weights_from_json(const nlohmann::json& j, FusionWeights base) {
  if (j.contains("eeg")) base.eeg = j.at("eeg").get<double>();
  if (j.contains("eda")) base.eda = j.at("eda").get<double>();
  if (j.contains("ppg")) base.ppg = j.at("ppg").get<double>();
  return base;
}

}  // namespace detail

inline std::string config_to_json(const EngineConfig& cfg) {
  nlohmann::ordered_json j;
  j["window_s"] = cfg.window_s;
  j["hop_s"] = cfg.hop_s;
  j["buffer_capacity_s"] = cfg.buffer_capacity_s;
  j["weights"] = {{"arousal", detail::weights_to_json(cfg.arousal_weights)},
                  {"valence", detail::weights_to_json(cfg.valence_weights)}};
  j["valence_polarity"] = to_string(cfg.valence_polarity);
  j["filters"] = {{"eeg", detail::filter_to_json(cfg.eeg_filter)},
                  {"ppg", detail::filter_to_json(cfg.ppg_filter)},
                  {"eda", detail::filter_to_json(cfg.eda_filter)}};
  j["eda_tonic_cutoff_hz"] = cfg.features.eda.tonic_cutoff_hz;
  if (!cfg.models_dir.empty()) j["models_dir"] = cfg.models_dir;
  return j.dump(2) + "\n";
}

inline EngineConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: invalid JSON: ") + e.what());
  }
  EngineConfig cfg;
  try {
    if (j.contains("window_s")) cfg.window_s = j.at("window_s").get<double>();
    if (j.contains("hop_s")) cfg.hop_s = j.at("hop_s").get<double>();
    if (j.contains("buffer_capacity_s"))
      cfg.buffer_capacity_s = j.at("buffer_capacity_s").get<double>();
    if (j.contains("weights")) {
      const auto& w = j.at("weights");
      if (w.contains("arousal"))
        cfg.arousal_weights = detail::weights_from_json(w.at("arousal"), cfg.arousal_weights);
      if (w.contains("valence"))
        cfg.valence_weights = detail::weights_from_json(w.at("valence"), cfg.valence_weights);
    }
    if (j.contains("valence_polarity"))
      cfg.valence_polarity =
          valence_polarity_from_string(j.at("valence_polarity").get<std::string>());
    if (j.contains("filters")) {
      const auto& f = j.at("filters");
      if (f.contains("eeg")) cfg.eeg_filter = detail::filter_from_json(f.at("eeg"), cfg.eeg_filter);
      if (f.contains("ppg")) cfg.ppg_filter = detail::filter_from_json(f.at("ppg"), cfg.ppg_filter);
      if (f.contains("eda")) cfg.eda_filter = detail::filter_from_json(f.at("eda"), cfg.eda_filter);
    }
    if (j.contains("eda_tonic_cutoff_hz"))
      cfg.features.eda.tonic_cutoff_hz = j.at("eda_tonic_cutoff_hz").get<double>();
    if (j.contains("models_dir")) cfg.models_dir = j.at("models_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: mistyped field: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

inline EngineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return config_from_json(text);
}

inline void save_config(const EngineConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << config_to_json(cfg);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace empath
