#pragma once

/// Weighted decision fusion of per-modality binary predictions, and the
/// mapping of the fused arousal/valence pair onto agent expressions.
///
/// Per dimension the fused score is the weighted sum of signed votes
/// (EEG, EDA, PPG); a negative score means low (-1), otherwise high (+1).
/// Defaults follow the engine calibration: valence weights (1, 1, 1),
/// arousal weights (1, 2, 2) — EDA and PPG are the more reliable arousal
/// carriers. With these defaults and all three modalities present the sum
/// is always odd, so a zero score is unreachable.
///
/// Missing modalities simply drop their term. If the remaining sum is zero
/// the previous window's level is held; at session start the calm default
/// (low, -1) applies.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "empath/errors.hpp"
#include "empath/types.hpp"

namespace empath {

/// Per-dimension fusion weights, one per modality. All must be positive.
struct FusionWeights {
  double eeg = 1.0;
  double eda = 1.0;
  double ppg = 1.0;

  double for_kind(SignalKind kind) const {
    switch (kind) {
      case SignalKind::EEG: return eeg;
      case SignalKind::EDA: return eda;
      case SignalKind::PPG: return ppg;
    }
    throw ValidationError("invalid SignalKind");
  }

  void validate() const {
    if (!(eeg > 0.0) || !(eda > 0.0) || !(ppg > 0.0))
      throw ConfigError("fusion weights must all be positive");
  }
};

inline FusionWeights default_arousal_weights() { return {1.0, 2.0, 2.0}; }
inline FusionWeights default_valence_weights() { return {1.0, 1.0, 1.0}; }

/// Signed binary arousal/valence prediction from one modality.
struct ModalityPrediction {
  SignalKind modality = SignalKind::EEG;
  BinaryLevel arousal = BinaryLevel::Low;
  BinaryLevel valence = BinaryLevel::Low;
};

/// Fused emotional state of one window.
struct EmotionState {
  BinaryLevel arousal = BinaryLevel::Low;
  BinaryLevel valence = BinaryLevel::Low;
  Quadrant quadrant = Quadrant::LALV;
  Expression expression = Expression::Sadness;
  double p_arousal = 0.0;  // raw weighted sums, kept for diagnostics
  double p_valence = 0.0;
  double timestamp = 0.0;  // stream seconds
};

inline std::pair<Quadrant, Expression> quadrant_expression(BinaryLevel arousal,
                                                           BinaryLevel valence) {
  const bool high_arousal = arousal == BinaryLevel::High;
  const bool high_valence = valence == BinaryLevel::High;
  if (high_arousal && high_valence) return {Quadrant::HAHV, Expression::StrongHappiness};
  if (high_arousal) return {Quadrant::HALV, Expression::AngerScaredness};
  if (high_valence) return {Quadrant::LAHV, Expression::SlightHappiness};
  return {Quadrant::LALV, Expression::Sadness};
}

inline EmotionState fuse(const std::vector<ModalityPrediction>& predictions,
                         const FusionWeights& arousal_weights,
                         const FusionWeights& valence_weights, double timestamp,
                         const std::optional<EmotionState>& previous = std::nullopt) {
  arousal_weights.validate();
  valence_weights.validate();
  for (std::size_t i = 0; i < predictions.size(); ++i)
    for (std::size_t j = i + 1; j < predictions.size(); ++j)
      if (predictions[i].modality == predictions[j].modality)
        throw ValidationError(std::string("duplicate prediction for modality ") +
                              to_string(predictions[i].modality));

  double p_arousal = 0.0, p_valence = 0.0;
  for (const ModalityPrediction& p : predictions) {
    p_arousal += arousal_weights.for_kind(p.modality) * to_int(p.arousal);
    p_valence += valence_weights.for_kind(p.modality) * to_int(p.valence);
  }

  const auto decide = [&](double score, BinaryLevel held) {
    if (score < 0.0) return BinaryLevel::Low;
    if (score > 0.0) return BinaryLevel::High;
    return held;  // zero only possible with missing modalities
  };
  EmotionState state;
  state.p_arousal = p_arousal;
  state.p_valence = p_valence;
  state.arousal = decide(p_arousal, previous ? previous->arousal : BinaryLevel::Low);
  state.valence = decide(p_valence, previous ? previous->valence : BinaryLevel::Low);
  const auto [quadrant, expression] = quadrant_expression(state.arousal, state.valence);
  state.quadrant = quadrant;
  state.expression = expression;
  state.timestamp = timestamp;
  return state;
}

/// Modal quadrant of a window sequence; ties go to the quadrant seen most
/// recently among the tied ones, favoring responsiveness to transitions.
inline Quadrant majority_emotion(const std::vector<EmotionState>& states) {
  if (states.empty()) throw ValidationError("majority_emotion: empty state list");
  std::map<Quadrant, std::size_t> counts;
  std::map<Quadrant, std::size_t> last_index;
  for (std::size_t i = 0; i < states.size(); ++i) {
    ++counts[states[i].quadrant];
    last_index[states[i].quadrant] = i;
  }
  Quadrant best = states.front().quadrant;
  std::size_t best_count = 0, best_last = 0;
  for (const auto& [quadrant, count] : counts) {
    const std::size_t last = last_index[quadrant];
    if (count > best_count || (count == best_count && last > best_last)) {
      best = quadrant;
      best_count = count;
      best_last = last;
    }
  }
  return best;
}

}  // namespace empath
