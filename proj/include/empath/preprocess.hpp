#pragma once

/// Per-modality signal conditioning, applied identically in the training and
/// real-time paths. All three functions are pure and shape-preserving: the
/// output block keeps the input's channels, sample count, and sample rate.

#include <string>

#include "empath/filters.hpp"
#include "empath/signal.hpp"

namespace empath {

inline FilterSpec default_eeg_filter() {
  return {FilterKind::Bandpass, 1.0, 45.0, 4, true};
}

inline FilterSpec default_ppg_filter() {
  return {FilterKind::Bandpass, 0.5, 8.0, 2, true};
}

inline FilterSpec default_eda_filter() {
  return {FilterKind::Lowpass, std::nullopt, 1.0, 2, true};
}

namespace detail {

inline void require_block(const SampleBlock& block, SignalKind kind, const char* op) {
  if (block.kind != kind)
    throw ValidationError(std::string(op) + ": expected " + to_string(kind) + " block, got " +
                          to_string(block.kind));
  block.validate();
  if (block.duration() < 2.0)
    throw InsufficientDataError(std::string(op) + ": need at least 2 s for filter warm-up, got " +
                                std::to_string(block.duration()) + " s");
}

inline SampleBlock filter_block(const SampleBlock& block, const FilterSpec& spec) {
  const SosFilter filter = SosFilter::design(spec, block.sample_rate);
  SampleBlock out = block;
  for (auto& channel : out.data) channel = filter.apply(channel);
  return out;
}

}  // namespace detail

/// Removes the per-channel mean, then band-passes 1–45 Hz (zero phase).
inline SampleBlock preprocess_eeg(const SampleBlock& block,
                                  const FilterSpec& spec = default_eeg_filter()) {
  detail::require_block(block, SignalKind::EEG, "preprocess_eeg");
  if (block.sample_rate < 100.0)
    throw ValidationError("preprocess_eeg: sample_rate must be at least 100 Hz");
  SampleBlock centered = block;
  for (auto& channel : centered.data) {
    double mean = 0.0;
    for (double v : channel) mean += v;
    mean /= static_cast<double>(channel.size());
    for (double& v : channel) v -= mean;
  }
  return detail::filter_block(centered, spec);
}

/// Band-passes 0.5–8 Hz (zero phase), keeping cardiac fundamentals and
/// their first harmonics.
inline SampleBlock preprocess_ppg(const SampleBlock& block,
                                  const FilterSpec& spec = default_ppg_filter()) {
  detail::require_block(block, SignalKind::PPG, "preprocess_ppg");
  return detail::filter_block(block, spec);
}

/// Clamps negative conductance samples to 0 (counted via `clamped`), then
/// low-passes at 1 Hz (zero phase).
inline SampleBlock preprocess_eda(const SampleBlock& block,
                                  const FilterSpec& spec = default_eda_filter(),
                                  std::size_t* clamped = nullptr) {
  detail::require_block(block, SignalKind::EDA, "preprocess_eda");
  SampleBlock clipped = block;
  std::size_t count = 0;
  for (auto& channel : clipped.data) {
    for (double& v : channel) {
      if (v < 0.0) {
        v = 0.0;
        ++count;
      }
    }
  }
  if (clamped) *clamped = count;
  return detail::filter_block(clipped, spec);
}

/// Dispatch by block kind, with the given per-modality specs.
inline SampleBlock preprocess(const SampleBlock& block, const FilterSpec& eeg,
                              const FilterSpec& ppg, const FilterSpec& eda,
                              std::size_t* eda_clamped = nullptr) {
  switch (block.kind) {
    case SignalKind::EEG: return preprocess_eeg(block, eeg);
    case SignalKind::PPG: return preprocess_ppg(block, ppg);
    case SignalKind::EDA: return preprocess_eda(block, eda, eda_clamped);
  }
  throw ValidationError("preprocess: invalid SignalKind");
}

}  // namespace empath
