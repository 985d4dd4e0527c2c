#pragma once

/// Binarization of 1..5 self-report ratings into low/high levels.
///
/// Arousal: ratings <= 3 map to low (-1), 4..5 to high (+1).
/// Valence supports two polarities:
///   Inverted (default): ratings > 3 map to low (-1) — the polarity the
///     rest of this engine is calibrated against.
///   Standard: ratings > 3 map to high (+1), mirroring the arousal rule.
/// The two differ only by sign; training and evaluation must use the same
/// setting, which is carried in the engine config.

#include <string>

#include "empath/errors.hpp"
#include "empath/types.hpp"

namespace empath {

enum class ValencePolarity { Inverted, Standard };

inline const char* to_string(ValencePolarity p) {
  return p == ValencePolarity::Inverted ? "inverted" : "standard";
}

inline ValencePolarity valence_polarity_from_string(const std::string& s) {
  if (s == "inverted") return ValencePolarity::Inverted;
  if (s == "standard") return ValencePolarity::Standard;
  throw ParseError("unknown valence polarity: '" + s + "'");
}

inline void check_rating(int rate) {
  if (rate < 1 || rate > 5)
    throw ValidationError("rating out of range 1..5: " + std::to_string(rate));
}

inline BinaryLevel binarize_arousal(int rate) {
  check_rating(rate);
  return rate <= 3 ? BinaryLevel::Low : BinaryLevel::High;
}

inline BinaryLevel binarize_valence(int rate, ValencePolarity polarity = ValencePolarity::Inverted) {
  check_rating(rate);
  const bool above = rate > 3;
  if (polarity == ValencePolarity::Inverted) return above ? BinaryLevel::Low : BinaryLevel::High;
  return above ? BinaryLevel::High : BinaryLevel::Low;
}

}  // namespace empath
