#pragma once

/// Recognition-quality evaluation: replays labeled trials through the
/// engine and reports how often each modality and the fused output agree
/// with the reported binary labels.
///
/// Trial-level agreement (default): a trial agrees on a route when the
/// majority of its window events match the binarized label; vote ties go
/// high, matching the fusion tie rule. --per-window instead counts every
/// window event.
///
/// A second, batch route classifies windows by direct trial slicing without
/// the streaming engine; both routes must produce identical events on any
/// trial, which the test suite enforces.

#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"

#include "empath/engine.hpp"
#include "empath/labels.hpp"
#include "empath/signal.hpp"

namespace empath {

struct RouteStats {
  std::size_t agreed = 0;
  std::size_t total = 0;
  // confusion[label][prediction], index 0 = low, 1 = high
  std::size_t confusion[2][2] = {{0, 0}, {0, 0}};

  double percent() const {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(agreed) / static_cast<double>(total);
  }

  void add(BinaryLevel label, BinaryLevel predicted) {
    ++total;
    if (label == predicted) ++agreed;
    ++confusion[label == BinaryLevel::High ? 1 : 0][predicted == BinaryLevel::High ? 1 : 0];
  }
};

/// Row indices of AlignmentReport::stats.
enum class AlignmentRoute { EEG = 0, PPG = 1, EDA = 2, Fused = 3 };

inline const char* to_string(AlignmentRoute r) {
  switch (r) {
    case AlignmentRoute::EEG: return "EEG";
    case AlignmentRoute::PPG: return "PPG";
    case AlignmentRoute::EDA: return "EDA";
    case AlignmentRoute::Fused: return "Fused";
  }
  throw ValidationError("invalid AlignmentRoute");
}

struct AlignmentReport {
  std::size_t trial_count = 0;    // trials that produced at least one event
  std::size_t skipped_trials = 0; // too short or no usable windows
  bool per_window = false;
  std::array<std::array<RouteStats, 2>, 4> stats;  // [route][dimension]

  RouteStats& at(AlignmentRoute route, EmotionDim dim) {
    return stats[static_cast<std::size_t>(route)][static_cast<std::size_t>(dim)];
  }
  const RouteStats& at(AlignmentRoute route, EmotionDim dim) const {
    return stats[static_cast<std::size_t>(route)][static_cast<std::size_t>(dim)];
  }

  std::string to_text() const {
    std::string out = "Alignment (" + std::string(per_window ? "per window" : "per trial") +
                      ", " + std::to_string(trial_count) + " trials";
    if (skipped_trials > 0) out += ", " + std::to_string(skipped_trials) + " skipped";
    out += ")\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-6s %18s %18s\n", "route", "arousal", "valence");
    out += line;
    for (AlignmentRoute route : {AlignmentRoute::EEG, AlignmentRoute::PPG, AlignmentRoute::EDA,
                                 AlignmentRoute::Fused}) {
      const RouteStats& a = at(route, EmotionDim::Arousal);
      const RouteStats& v = at(route, EmotionDim::Valence);
      std::snprintf(line, sizeof line, "%-6s %7.1f%% (%zu/%zu) %7.1f%% (%zu/%zu)\n",
                    to_string(route), a.percent(), a.agreed, a.total, v.percent(), v.agreed,
                    v.total);
      out += line;
    }
    return out;
  }

  std::string to_json() const {
    nlohmann::ordered_json j;
    j["trial_count"] = trial_count;
    j["skipped_trials"] = skipped_trials;
    j["per_window"] = per_window;
    for (AlignmentRoute route : {AlignmentRoute::EEG, AlignmentRoute::PPG, AlignmentRoute::EDA,
                                 AlignmentRoute::Fused}) {
      nlohmann::ordered_json r;
      for (EmotionDim dim : kEmotionDims) {
        const RouteStats& s = at(route, dim);
        r[to_string(dim)] = {{"percent", s.percent()},
                             {"agreed", s.agreed},
                             {"total", s.total},
                             {"confusion",
                              {{"low_low", s.confusion[0][0]},
                               {"low_high", s.confusion[0][1]},
                               {"high_low", s.confusion[1][0]},
                               {"high_high", s.confusion[1][1]}}}};
      }
      j[to_string(route)] = std::move(r);
    }
    return j.dump(2) + "\n";
  }
};

/// Batch classification route: slices windows straight out of the trial's
/// blocks on the same hop grid the engine uses, with no stream buffering.
/// Exists as the independent cross-check of the streaming path (and powers
/// evaluate_alignment's batch mode).
inline std::vector<EmotionEvent> classify_trial_batch(const TrialRecord& trial,
                                                      const ModelSet& models,
                                                      const EngineConfig& cfg) {
  trial.validate();
  std::vector<EmotionEvent> events;
  const double t_end = trial.duration();
  std::optional<EmotionState> last_state;
  for (double t = cfg.window_s; t <= t_end + 1e-9; t += cfg.hop_s) {
    const double from = t - cfg.window_s;
    bool any_window = false;
    std::vector<ModalityPrediction> predictions;
    for (const auto& [kind, blocks] : trial.streams) {
      SampleBlock window_block;
      window_block.kind = kind;
      bool have_start = false;
      for (const SampleBlock& b : blocks) {
        const double fs = b.sample_rate;
        const auto clamp_index = [&](double at) {
          const double pos = (at - b.start_time) * fs;
          if (pos <= 0.0) return std::size_t{0};
          return std::min(static_cast<std::size_t>(std::ceil(pos - 1e-6)), b.sample_count());
        };
        const std::size_t lo = clamp_index(from);
        const std::size_t hi = clamp_index(t);
        if (lo >= hi) continue;
        if (!have_start) {
          window_block.sample_rate = fs;
          window_block.channels = b.channels;
          window_block.data.assign(b.channel_count(), {});
          window_block.start_time = b.time_at(lo);
          have_start = true;
        }
        for (std::size_t c = 0; c < b.channel_count(); ++c)
          window_block.data[c].insert(window_block.data[c].end(),
                                      b.data[c].begin() + static_cast<std::ptrdiff_t>(lo),
                                      b.data[c].begin() + static_cast<std::ptrdiff_t>(hi));
      }
      if (!have_start) continue;
      const std::size_t expected =
          static_cast<std::size_t>(std::floor(cfg.window_s * window_block.sample_rate + 1e-6));
      if (window_block.sample_count() + 1 < expected) continue;
      any_window = true;
      if (const auto pred = classify_window(window_block, models, cfg))
        predictions.push_back(*pred);
    }
    if (!any_window) continue;
    EmotionEvent event;
    event.state = fuse(predictions, cfg.arousal_weights, cfg.valence_weights, t, last_state);
    last_state = event.state;
    event.window_start = from;
    event.window_end = t;
    event.per_modality = std::move(predictions);
    events.push_back(std::move(event));
  }
  return events;
}

namespace detail {

inline BinaryLevel majority_level(const std::vector<int>& votes) {
  int sum = 0;
  for (int v : votes) sum += v;
  return sum < 0 ? BinaryLevel::Low : BinaryLevel::High;  // tie goes high
}

inline void tally_route(RouteStats& stats, const std::vector<int>& votes, BinaryLevel label,
                        bool per_window) {
  if (votes.empty()) return;
  if (per_window) {
    for (int v : votes) stats.add(label, level_from_int(v));
  } else {
    stats.add(label, majority_level(votes));
  }
}

}  // namespace detail

/// Replays every trial and aggregates agreement. use_batch selects the
/// direct-slicing route instead of the streaming engine.
inline AlignmentReport evaluate_alignment(const std::vector<TrialRecord>& trials,
                                          const ModelSet& models, const EngineConfig& cfg,
                                          bool per_window = false, bool use_batch = false) {
  if (trials.empty()) throw ValidationError("evaluate_alignment: empty dataset");
  cfg.validate();
  AlignmentReport report;
  report.per_window = per_window;

  RealtimeEngine engine(cfg, models);
  for (const TrialRecord& trial : trials) {
    const std::vector<EmotionEvent> events =
        use_batch ? classify_trial_batch(trial, models, cfg) : engine.replay(trial);
    if (events.empty()) {
      ++report.skipped_trials;
      continue;
    }
    ++report.trial_count;
    const BinaryLevel label_arousal = binarize_arousal(trial.label.arousal_rate);
    const BinaryLevel label_valence =
        binarize_valence(trial.label.valence_rate, cfg.valence_polarity);

    std::array<std::array<std::vector<int>, 2>, 4> votes;
    for (const EmotionEvent& event : events) {
      votes[static_cast<std::size_t>(AlignmentRoute::Fused)][0].push_back(
          to_int(event.state.arousal));
      votes[static_cast<std::size_t>(AlignmentRoute::Fused)][1].push_back(
          to_int(event.state.valence));
      for (const ModalityPrediction& p : event.per_modality) {
        votes[static_cast<std::size_t>(p.modality)][0].push_back(to_int(p.arousal));
        votes[static_cast<std::size_t>(p.modality)][1].push_back(to_int(p.valence));
      }
    }
    for (std::size_t route = 0; route < 4; ++route) {
      detail::tally_route(report.stats[route][0], votes[route][0], label_arousal, per_window);
      detail::tally_route(report.stats[route][1], votes[route][1], label_valence, per_window);
    }
  }
  if (report.trial_count == 0)
    throw ValidationError("evaluate_alignment: no trial produced any events");
  return report;
}

}  // namespace empath
