#pragma once

/// Real-time recognition engine: streaming ingestion, sliding-window
/// scheduling (20 s window, 5 s hop by default), per-modality classification,
/// and weighted fusion into timestamped emotion events.
///
/// Scheduling is stream-time driven — tick times come from sample
/// timestamps, never the wall clock — so live and replayed sessions share
/// one code path and replay is bit-deterministic at any speed.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "empath/config.hpp"
#include "empath/errors.hpp"
#include "empath/features.hpp"
#include "empath/forest.hpp"
#include "empath/fusion.hpp"
#include "empath/preprocess.hpp"
#include "empath/signal.hpp"
#include "empath/stream_buffer.hpp"

namespace empath {

/// The six per-(modality, dimension) classifiers. Any subset may be present;
/// a modality participates in fusion only when both of its models exist.
struct ModelSet {
  std::optional<ForestModel> models[3][2];

  static std::string file_name(SignalKind kind, EmotionDim dim) {
    std::string name = to_string(kind);
    for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return "model_" + name + "_" + to_string(dim) + ".json";
  }

  void set(ForestModel model) {
    models[index_of(model.modality)][dim_index(model.dimension)] = std::move(model);
  }

  const ForestModel* find(SignalKind kind, EmotionDim dim) const {
    const auto& slot = models[index_of(kind)][dim_index(dim)];
    return slot ? &*slot : nullptr;
  }

  bool has_modality(SignalKind kind) const {
    return find(kind, EmotionDim::Arousal) != nullptr && find(kind, EmotionDim::Valence) != nullptr;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (const auto& row : models)
      for (const auto& slot : row)
        if (slot) ++n;
    return n;
  }

  void save_dir(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (SignalKind kind : kSignalKinds)
      for (EmotionDim dim : kEmotionDims)
        if (const ForestModel* m = find(kind, dim)) save_model(*m, dir / file_name(kind, dim));
  }

  /// Loads whichever of the six model files exist in the directory.
  static ModelSet load_dir(const std::filesystem::path& dir) {
    ModelSet set;
    for (SignalKind kind : kSignalKinds) {
      for (EmotionDim dim : kEmotionDims) {
        const auto path = dir / file_name(kind, dim);
        if (!std::filesystem::exists(path)) continue;
        ForestModel model = load_model(path);
        if (model.modality != kind || model.dimension != dim)
          throw ValidationError("model file '" + path.string() +
                                "' does not match its file name");
        set.set(std::move(model));
      }
    }
    if (set.count() == 0)
      throw IoError("no model files found in '" + dir.string() + "'");
    return set;
  }

 private:
  static std::size_t index_of(SignalKind kind) { return static_cast<std::size_t>(kind); }
  static std::size_t dim_index(EmotionDim dim) { return static_cast<std::size_t>(dim); }
};

/// One recognition result per hop.
struct EmotionEvent {
  EmotionState state;
  double window_start = 0.0;
  double window_end = 0.0;
  std::vector<ModalityPrediction> per_modality;
  double latency_ms = 0.0;  // wall-clock compute time; diagnostic only
};

/// Classifies one already-sliced window block with the modality's two
/// models. Returns nullopt when the modality cannot contribute: models
/// missing, or the window does not support extraction (too short, no
/// detectable beats).
inline std::optional<ModalityPrediction> classify_window(const SampleBlock& window_block,
                                                         const ModelSet& models,
                                                         const EngineConfig& cfg) {
  const ForestModel* arousal_model = models.find(window_block.kind, EmotionDim::Arousal);
  const ForestModel* valence_model = models.find(window_block.kind, EmotionDim::Valence);
  if (!arousal_model || !valence_model) return std::nullopt;
  try {
    const SampleBlock pre =
        preprocess(window_block, cfg.eeg_filter, cfg.ppg_filter, cfg.eda_filter);
    const FeatureVector features = extract_features(pre, cfg.features);
    return ModalityPrediction{window_block.kind, arousal_model->predict(features),
                              valence_model->predict(features)};
  } catch (const InsufficientDataError&) {
    return std::nullopt;
  }
}

class RealtimeEngine {
 public:
  RealtimeEngine(EngineConfig cfg, ModelSet models)
      : cfg_(std::move(cfg)), models_(std::move(models)) {
    cfg_.validate();
    reset();
  }

  const EngineConfig& config() const { return cfg_; }
  const ModelSet& models() const { return models_; }

  void reset() {
    buffers_.clear();
    for (SignalKind kind : kSignalKinds)
      buffers_.emplace(kind, StreamBuffer(kind, cfg_.buffer_capacity_s));
    last_state_.reset();
    last_tick_ = -1.0;
  }

  /// Appends a block to its stream's buffer. Out-of-order blocks are
  /// rejected; empty blocks are a no-op.
  void ingest(const SampleBlock& block) { buffers_.at(block.kind).append(block); }

  double watermark(SignalKind kind) const { return buffers_.at(kind).watermark(); }

  /// Runs one recognition pass for the window ending at stream_time, which
  /// must lie on the hop grid. Returns nothing during warm-up (no modality
  /// has a full window yet).
  std::optional<EmotionEvent> tick(double stream_time) {
    const double hops = stream_time / cfg_.hop_s;
    if (std::abs(hops - std::round(hops)) > 1e-6)
      throw ValidationError("tick time " + std::to_string(stream_time) +
                            " is not on the hop grid (" + std::to_string(cfg_.hop_s) + " s)");
    if (stream_time <= last_tick_)
      throw ValidationError("tick time must increase monotonically");
    last_tick_ = stream_time;

    const double from = stream_time - cfg_.window_s;
    if (from < -1e-9) return std::nullopt;

    const auto t0 = std::chrono::steady_clock::now();
    bool any_window = false;
    std::vector<ModalityPrediction> predictions;
    for (SignalKind kind : kSignalKinds) {
      const auto window_block = buffers_.at(kind).slice(from, stream_time);
      if (!window_block) continue;
      any_window = true;
      if (const auto pred = classify_window(*window_block, models_, cfg_))
        predictions.push_back(*pred);
    }
    if (!any_window) return std::nullopt;  // warm-up

    EmotionEvent event;
    event.state =
        fuse(predictions, cfg_.arousal_weights, cfg_.valence_weights, stream_time, last_state_);
    last_state_ = event.state;
    event.window_start = from;
    event.window_end = stream_time;
    event.per_modality = std::move(predictions);
    event.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return event;
  }

  /// Replays a trial from a clean engine state. speed <= 0 runs unpaced
  /// ("max"); any positive speed only paces the loop with sleeps — the
  /// emitted events are identical at every speed.
  std::vector<EmotionEvent> replay(const TrialRecord& trial, double speed = 0.0) {
    trial.validate();
    reset();
    const double t_end = trial.duration();
    std::vector<EmotionEvent> events;
    if (t_end < cfg_.window_s) return events;

    double chunk_start = 0.0;
    for (double t = cfg_.hop_s; t <= t_end + 1e-9; t += cfg_.hop_s) {
      for (const auto& [kind, blocks] : trial.streams)
        for (const SampleBlock& block : blocks)
          ingest_span(block, chunk_start, t);
      if (speed > 0.0)
        std::this_thread::sleep_for(
            std::chrono::duration<double>((t - chunk_start) / speed));
      chunk_start = t;
      if (t + 1e-9 >= cfg_.window_s) {
        if (auto event = tick(t)) events.push_back(std::move(*event));
      }
    }
    return events;
  }

 private:
  /// Ingests the portion of a block whose sample times fall in [from, to).
  void ingest_span(const SampleBlock& block, double from, double to) {
    const double fs = block.sample_rate;
    const auto clamp_index = [&](double t) {
      const double pos = (t - block.start_time) * fs;
      if (pos <= 0.0) return std::size_t{0};
      return std::min(static_cast<std::size_t>(std::ceil(pos - 1e-6)), block.sample_count());
    };
    const std::size_t lo = clamp_index(from);
    const std::size_t hi = clamp_index(to);
    if (lo >= hi) return;
    SampleBlock chunk;
    chunk.kind = block.kind;
    chunk.sample_rate = fs;
    chunk.channels = block.channels;
    chunk.start_time = block.time_at(lo);
    chunk.data.reserve(block.channel_count());
    for (const auto& channel : block.data)
      chunk.data.emplace_back(channel.begin() + static_cast<std::ptrdiff_t>(lo),
                              channel.begin() + static_cast<std::ptrdiff_t>(hi));
    ingest(chunk);
  }

  EngineConfig cfg_;
  ModelSet models_;
  std::map<SignalKind, StreamBuffer> buffers_;
  std::optional<EmotionState> last_state_;
  double last_tick_ = -1.0;
};

// ─── Event log ───────────────────────────────────────────────────────────────

/// One event as a single JSON line. latency_ms is wall-clock diagnostics and
/// is excluded from the canonical log so that replays of the same signal are
/// byte-identical; pass include_latency for profiling output.
inline std::string event_to_json_line(const EmotionEvent& event, bool include_latency = false) {
  nlohmann::ordered_json j;
  j["t"] = event.state.timestamp;
  j["window"] = {event.window_start, event.window_end};
  j["arousal"] = to_int(event.state.arousal);
  j["valence"] = to_int(event.state.valence);
  j["quadrant"] = to_string(event.state.quadrant);
  j["expression"] = to_string(event.state.expression);
  j["p_arousal"] = event.state.p_arousal;
  j["p_valence"] = event.state.p_valence;
  nlohmann::ordered_json per;
  for (const ModalityPrediction& p : event.per_modality)
    per[to_string(p.modality)] = {{"arousal", to_int(p.arousal)},
                                  {"valence", to_int(p.valence)}};
  j["per_modality"] = std::move(per);
  if (include_latency) j["latency_ms"] = event.latency_ms;
  return j.dump();
}

}  // namespace empath
