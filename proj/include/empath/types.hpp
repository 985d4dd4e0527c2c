#pragma once

/// Vocabulary types shared across the library: signal modalities, binary
/// emotion levels, arousal/valence quadrants, and agent expressions.

#include <array>
#include <string>

#include "empath/errors.hpp"

namespace empath {

// ─── Signal modalities ───────────────────────────────────────────────────────

enum class SignalKind { EEG, PPG, EDA };

inline constexpr std::array<SignalKind, 3> kSignalKinds{SignalKind::EEG, SignalKind::PPG,
                                                        SignalKind::EDA};

inline const char* to_string(SignalKind k) {
  switch (k) {
    case SignalKind::EEG: return "EEG";
    case SignalKind::PPG: return "PPG";
    case SignalKind::EDA: return "EDA";
  }
  throw ValidationError("invalid SignalKind");
}

inline SignalKind signal_kind_from_string(const std::string& s) {
  if (s == "EEG") return SignalKind::EEG;
  if (s == "PPG") return SignalKind::PPG;
  if (s == "EDA") return SignalKind::EDA;
  throw ParseError("unknown signal kind: '" + s + "'");
}

// ─── Binary emotion levels ───────────────────────────────────────────────────

/// Binary arousal or valence level: low = -1, high = +1.
enum class BinaryLevel : int { Low = -1, High = 1 };

inline int to_int(BinaryLevel l) { return static_cast<int>(l); }

inline BinaryLevel level_from_int(int v) {
  if (v == -1) return BinaryLevel::Low;
  if (v == 1) return BinaryLevel::High;
  throw ValidationError("binary level must be -1 or +1, got " + std::to_string(v));
}

enum class EmotionDim { Arousal, Valence };

inline constexpr std::array<EmotionDim, 2> kEmotionDims{EmotionDim::Arousal, EmotionDim::Valence};

inline const char* to_string(EmotionDim d) {
  return d == EmotionDim::Arousal ? "arousal" : "valence";
}

inline EmotionDim emotion_dim_from_string(const std::string& s) {
  if (s == "arousal") return EmotionDim::Arousal;
  if (s == "valence") return EmotionDim::Valence;
  throw ParseError("unknown emotion dimension: '" + s + "'");
}

// ─── Quadrants and expressions ───────────────────────────────────────────────

/// Cells of the binary arousal × valence plane.
enum class Quadrant { HAHV, HALV, LAHV, LALV };

inline constexpr std::array<Quadrant, 4> kQuadrants{Quadrant::HAHV, Quadrant::HALV, Quadrant::LAHV,
                                                    Quadrant::LALV};

inline const char* to_string(Quadrant q) {
  switch (q) {
    case Quadrant::HAHV: return "HAHV";
    case Quadrant::HALV: return "HALV";
    case Quadrant::LAHV: return "LAHV";
    case Quadrant::LALV: return "LALV";
  }
  throw ValidationError("invalid Quadrant");
}

inline Quadrant quadrant_from_string(const std::string& s) {
  if (s == "HAHV") return Quadrant::HAHV;
  if (s == "HALV") return Quadrant::HALV;
  if (s == "LAHV") return Quadrant::LAHV;
  if (s == "LALV") return Quadrant::LALV;
  throw ParseError("unknown quadrant: '" + s + "'");
}

/// Agent behavior mode: neutral shows no expressions and answers from the
/// neutral response pool; empathetic mirrors the detected emotion.
enum class SessionMode { Neutral, Empathetic };

inline const char* to_string(SessionMode m) {
  return m == SessionMode::Neutral ? "neutral" : "empathetic";
}

inline SessionMode session_mode_from_string(const std::string& s) {
  if (s == "neutral") return SessionMode::Neutral;
  if (s == "empathetic") return SessionMode::Empathetic;
  throw ParseError("unknown session mode: '" + s + "'");
}

/// Agent expressions, one per quadrant.
enum class Expression { StrongHappiness, AngerScaredness, SlightHappiness, Sadness };

inline const char* to_string(Expression e) {
  switch (e) {
    case Expression::StrongHappiness: return "StrongHappiness";
    case Expression::AngerScaredness: return "AngerScaredness";
    case Expression::SlightHappiness: return "SlightHappiness";
    case Expression::Sadness: return "Sadness";
  }
  throw ValidationError("invalid Expression");
}

inline Expression expression_from_string(const std::string& s) {
  if (s == "StrongHappiness") return Expression::StrongHappiness;
  if (s == "AngerScaredness") return Expression::AngerScaredness;
  if (s == "SlightHappiness") return Expression::SlightHappiness;
  if (s == "Sadness") return Expression::Sadness;
  throw ParseError("unknown expression: '" + s + "'");
}

}  // namespace empath
