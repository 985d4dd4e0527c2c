#pragma once

/// Systolic peak detection on a preprocessed PPG waveform and conversion to
/// a normal-to-normal interval series.
///
/// Detector: a sample is a candidate peak when it is a local maximum above
/// an adaptive threshold (centered 1 s rolling mean + 0.5 x rolling std);
/// candidates closer than 0.4 s keep only the taller one. Intervals outside
/// [300, 2000] ms are dropped as artifacts.
///
/// The threshold offset has a floor of 0.25 x the whole-window std: inside
/// a beat gap the local std collapses and a purely local threshold starts
/// accepting filter ripple as beats.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "empath/errors.hpp"
#include "empath/hrv.hpp"
#include "empath/signal.hpp"

namespace empath {

struct PpgPeakParams {
  double rolling_window_s = 1.0;
  double threshold_stds = 0.5;
  double global_std_floor = 0.25;  // fraction of whole-window std
  double min_distance_s = 0.4;
  double min_duration_s = 20.0;      // HRV features need at least 20 s of data
  double median_deviation = 0.3;     // NN artifact rule: drop intervals this far from the median
};

/// Peak sample indices of one channel.
inline std::vector<std::size_t> detect_peak_indices(const std::vector<double>& x, double fs,
                                                    const PpgPeakParams& params = {}) {
  std::vector<std::size_t> peaks;
  if (x.size() < 3) return peaks;
  const std::size_t half =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(params.rolling_window_s * fs / 2.0)));

  // Prefix sums for O(1) centered rolling mean/std.
  std::vector<double> cum(x.size() + 1, 0.0), cum2(x.size() + 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    cum[i + 1] = cum[i] + x[i];
    cum2[i + 1] = cum2[i] + x[i] * x[i];
  }
  const double global_mean = cum.back() / static_cast<double>(x.size());
  const double global_std = std::sqrt(
      std::max(0.0, cum2.back() / static_cast<double>(x.size()) - global_mean * global_mean));
  const auto threshold_at = [&](std::size_t i) {
    const std::size_t lo = i > half ? i - half : 0;
    const std::size_t hi = std::min(x.size(), i + half + 1);
    const double n = static_cast<double>(hi - lo);
    const double mean = (cum[hi] - cum[lo]) / n;
    const double var = std::max(0.0, (cum2[hi] - cum2[lo]) / n - mean * mean);
    const double offset = std::max(params.threshold_stds * std::sqrt(var),
                                   params.global_std_floor * global_std);
    return mean + offset;
  };

  const std::size_t min_gap =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(params.min_distance_s * fs)));
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    if (!(x[i] > x[i - 1] && x[i] >= x[i + 1])) continue;
    if (!(x[i] > threshold_at(i))) continue;
    if (!peaks.empty() && i - peaks.back() < min_gap) {
      if (x[i] > x[peaks.back()]) peaks.back() = i;  // keep the taller of the pair
      continue;
    }
    peaks.push_back(i);
  }
  return peaks;
}

/// Detects beats in a preprocessed single-channel PPG block and returns the
/// surviving NN intervals. Throws when fewer than 2 intervals remain.
inline NNSeries detect_ppg_peaks(const SampleBlock& block, const PpgPeakParams& params = {}) {
  if (block.kind != SignalKind::PPG) throw ValidationError("detect_ppg_peaks: expected PPG block");
  block.validate();
  if (block.channel_count() != 1)
    throw ValidationError("detect_ppg_peaks: expected a single channel, got " +
                          std::to_string(block.channel_count()));
  if (block.duration() < params.min_duration_s - 1e-9)
    throw InsufficientDataError("detect_ppg_peaks: need at least " +
                                std::to_string(params.min_duration_s) + " s, got " +
                                std::to_string(block.duration()) + " s");

  const auto peaks = detect_peak_indices(block.data[0], block.sample_rate, params);
  std::vector<double> intervals;
  for (std::size_t k = 1; k < peaks.size(); ++k) {
    const double interval_ms =
        1000.0 * static_cast<double>(peaks[k] - peaks[k - 1]) / block.sample_rate;
    if (interval_ms >= kNnMinMs && interval_ms <= kNnMaxMs) intervals.push_back(interval_ms);
  }
  if (intervals.size() < 2)
    throw InsufficientDataError("detect_ppg_peaks: no beats (fewer than 2 usable intervals)");

  // Artifact rejection: a missed or doubled beat shows up as an interval far
  // from the window's rhythm; drop anything deviating more than
  // median_deviation from the median interval.
  std::vector<double> sorted = intervals;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted.size() % 2 == 1
                            ? sorted[sorted.size() / 2]
                            : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  NNSeries nn;
  for (double v : intervals)
    if (std::abs(v - median) <= params.median_deviation * median) nn.intervals_ms.push_back(v);
  if (nn.intervals_ms.size() < 2)
    throw InsufficientDataError("detect_ppg_peaks: no beats (fewer than 2 usable intervals)");
  return nn;
}

}  // namespace empath
