#pragma once

// Shared fixtures for the test suites: block/trial builders and a couple of
// reference signal generators with known ground truth.

#include <cmath>
#include <numbers>
#include <vector>

#include "empath/signal.hpp"

namespace test_helpers {

using namespace empath;

inline SampleBlock make_block(SignalKind kind, double fs, double duration_s,
                              std::vector<std::vector<double>> data,
                              std::vector<std::string> channels, double start_time = 0.0) {
  SampleBlock b;
  b.kind = kind;
  b.sample_rate = fs;
  b.start_time = start_time;
  b.channels = std::move(channels);
  b.data = std::move(data);
  (void)duration_s;
  return b;
}

inline std::vector<double> sinusoid(double freq_hz, double fs, double duration_s,
                                    double amplitude = 1.0, double phase = 0.0) {
  const auto n = static_cast<std::size_t>(std::llround(fs * duration_s));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amplitude *
           std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / fs + phase);
  return x;
}

inline std::vector<double> constant(double value, double fs, double duration_s) {
  return std::vector<double>(static_cast<std::size_t>(std::llround(fs * duration_s)), value);
}

inline SampleBlock eeg_block(std::vector<std::vector<double>> data, double fs = 250.0) {
  std::vector<std::string> channels;
  for (std::size_t c = 0; c < data.size(); ++c) channels.push_back("ch" + std::to_string(c + 1));
  return make_block(SignalKind::EEG, fs, 0, std::move(data), std::move(channels));
}

inline SampleBlock ppg_block(std::vector<double> data, double fs = 128.0) {
  return make_block(SignalKind::PPG, fs, 0, {std::move(data)}, {"ppg"});
}

inline SampleBlock eda_block(std::vector<double> data, double fs = 128.0) {
  return make_block(SignalKind::EDA, fs, 0, {std::move(data)}, {"eda"});
}

/// Pulse train with a Gaussian systolic wave and a small dicrotic bump at
/// each beat time. Ground truth: peaks at the given beat times.
inline std::vector<double> pulse_train(const std::vector<double>& beat_times, double fs,
                                       double duration_s) {
  const auto n = static_cast<std::size_t>(std::llround(fs * duration_s));
  std::vector<double> x(n, 0.0);
  for (double beat : beat_times) {
    for (std::size_t i = 0; i < n; ++i) {
      const double u = static_cast<double>(i) / fs - beat;
      if (u < -0.4 || u > 0.8) continue;
      x[i] += std::exp(-u * u / (2.0 * 0.05 * 0.05)) +
              0.25 * std::exp(-(u - 0.3) * (u - 0.3) / (2.0 * 0.08 * 0.08));
    }
  }
  return x;
}

inline std::vector<double> regular_beats(double interval_s, double duration_s,
                                         double first_beat = 0.3) {
  std::vector<double> beats;
  for (double t = first_beat; t < duration_s; t += interval_s) beats.push_back(t);
  return beats;
}

/// Cuts every stream down to the given duration (for sub-window trials the
/// generator itself refuses to produce).
inline TrialRecord truncate_trial(TrialRecord trial, double duration_s) {
  for (auto& [kind, blocks] : trial.streams) {
    for (auto& block : blocks) {
      const double span = duration_s - block.start_time;
      const auto keep = span <= 0.0
                            ? std::size_t{0}
                            : std::min(block.sample_count(),
                                       static_cast<std::size_t>(span * block.sample_rate + 1e-6));
      for (auto& channel : block.data) channel.resize(keep);
    }
  }
  return trial;
}

/// Biexponential skin-conductance bump with unit peak height.
inline double scr_shape(double u, double rise_s = 0.3, double decay_s = 1.2) {
  if (u <= 0.0) return 0.0;
  const double t_peak = std::log(decay_s / rise_s) * rise_s * decay_s / (decay_s - rise_s);
  const double norm = std::exp(-t_peak / decay_s) - std::exp(-t_peak / rise_s);
  return (std::exp(-u / decay_s) - std::exp(-u / rise_s)) / norm;
}

}  // namespace test_helpers
