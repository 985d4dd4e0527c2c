#pragma once

/// Domain types for raw signals and labeled conversation trials.
///
/// A SampleBlock is a contiguous, uniformly sampled multichannel segment;
/// gaps in a stream are represented by block boundaries, never by NaN.
/// A TrialRecord bundles the streams of one conversation trial together
/// with its self-reported label and the user speech spans.

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "empath/errors.hpp"
#include "empath/types.hpp"

namespace empath {

/// Contiguous multichannel signal segment. Units: EEG microvolts,
/// EDA microsiemens, PPG arbitrary optical units. Immutable by convention
/// once built; all pipeline stages return fresh blocks.
struct SampleBlock {
  SignalKind kind = SignalKind::EEG;
  double start_time = 0.0;   // seconds, session-relative
  double sample_rate = 0.0;  // Hz
  std::vector<std::string> channels;
  std::vector<std::vector<double>> data;  // [channel][sample]

  std::size_t channel_count() const { return channels.size(); }

  std::size_t sample_count() const { return data.empty() ? 0 : data.front().size(); }

  double duration() const {
    return sample_rate > 0.0 ? static_cast<double>(sample_count()) / sample_rate : 0.0;
  }

  /// One past the last sample, i.e. start_time + n/fs.
  double end_time() const { return start_time + duration(); }

  double time_at(std::size_t i) const {
    return start_time + static_cast<double>(i) / sample_rate;
  }

  void validate() const {
    if (sample_rate <= 0.0) throw ValidationError("sample_rate must be positive");
    if (data.size() != channels.size())
      throw ValidationError("data row count (" + std::to_string(data.size()) +
                            ") != channel count (" + std::to_string(channels.size()) + ")");
    const std::size_t n = sample_count();
    for (std::size_t c = 0; c < data.size(); ++c) {
      if (data[c].size() != n)
        throw ValidationError("channel '" + channels[c] + "' has ragged sample count");
      for (double v : data[c])
        if (!std::isfinite(v))
          throw ValidationError("non-finite sample in channel '" + channels[c] + "'");
    }
  }
};

/// Self-reported arousal/valence rating on the 1..5 scale.
struct SelfReportLabel {
  int arousal_rate = 3;
  int valence_rate = 3;

  void validate() const {
    if (arousal_rate < 1 || arousal_rate > 5)
      throw ValidationError("arousal_rate out of range 1..5: " + std::to_string(arousal_rate));
    if (valence_rate < 1 || valence_rate > 5)
      throw ValidationError("valence_rate out of range 1..5: " + std::to_string(valence_rate));
  }
};

/// One labeled conversation trial: per-modality signal streams plus the
/// reported label. A stream may be absent entirely (sensor dropout), but a
/// present stream must be consistent and strictly time-ordered.
struct TrialRecord {
  std::string trial_id;
  Quadrant topic_category = Quadrant::HAHV;
  std::map<SignalKind, std::vector<SampleBlock>> streams;
  SelfReportLabel label;
  std::vector<std::pair<double, double>> speech_spans;  // (start, end) seconds

  /// Longest stream end time, in seconds. 0 when there are no streams.
  double duration() const {
    double d = 0.0;
    for (const auto& [kind, blocks] : streams)
      if (!blocks.empty()) d = std::max(d, blocks.back().end_time());
    return d;
  }

  void validate() const {
    if (trial_id.empty()) throw ValidationError("trial_id must be non-empty");
    label.validate();
    for (const auto& [kind, blocks] : streams) {
      double prev_end = -1.0;
      double rate = 0.0;
      std::size_t n_channels = 0;
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        const SampleBlock& b = blocks[i];
        if (b.kind != kind)
          throw ValidationError(std::string("stream ") + to_string(kind) +
                                " contains a block of kind " + to_string(b.kind));
        b.validate();
        if (i == 0) {
          rate = b.sample_rate;
          n_channels = b.channel_count();
        } else {
          if (b.sample_rate != rate)
            throw ValidationError(std::string("stream ") + to_string(kind) +
                                  " mixes sample rates");
          if (b.channel_count() != n_channels)
            throw ValidationError(std::string("stream ") + to_string(kind) +
                                  " mixes channel counts");
          if (b.start_time < prev_end - 1e-9)
            throw ValidationError(std::string("stream ") + to_string(kind) +
                                  " blocks overlap or are out of order at t=" +
                                  std::to_string(b.start_time));
        }
        prev_end = b.end_time();
      }
    }
    for (const auto& [s, e] : speech_spans) {
      if (!(s >= 0.0) || !(e > s))
        throw ValidationError("speech span must satisfy 0 <= start < end");
    }
  }
};

}  // namespace empath
