#pragma once

/// Window-level feature container shared by all modality extractors.
/// Failed extraction is an error, never a NaN: every stored value is finite.

#include <cmath>
#include <string>
#include <unordered_set>
#include <vector>

#include "empath/errors.hpp"
#include "empath/types.hpp"

namespace empath {

struct FeatureVector {
  SignalKind modality = SignalKind::EEG;
  std::vector<std::string> names;
  std::vector<double> values;
  double window_start = 0.0;  // seconds
  double window_len = 0.0;    // seconds

  double at(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return values[i];
    throw ValidationError("feature '" + name + "' not present");
  }

  void validate() const {
    if (names.size() != values.size())
      throw ValidationError("feature names/values length mismatch");
    std::unordered_set<std::string> seen;
    for (const auto& n : names)
      if (!seen.insert(n).second) throw ValidationError("duplicate feature name '" + n + "'");
    for (std::size_t i = 0; i < values.size(); ++i)
      if (!std::isfinite(values[i]))
        throw ValidationError("non-finite value for feature '" + names[i] + "'");
  }
};

}  // namespace empath
