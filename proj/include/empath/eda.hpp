#pragma once

/// Electrodermal activity decomposition and features.
///
/// The tonic baseline is a zero-phase 0.05 Hz low-pass of the preprocessed
/// signal; the phasic component is the residual, so tonic + phasic rebuilds
/// the input exactly. Phasic peaks are local maxima with topographic
/// prominence of at least 0.01 uS.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "empath/errors.hpp"
#include "empath/feature_vector.hpp"
#include "empath/filters.hpp"
#include "empath/signal.hpp"

namespace empath {

struct EdaParams {
  double tonic_cutoff_hz = 0.05;
  int tonic_order = 2;
  double peak_min_prominence = 0.01;  // microsiemens
  double min_duration_s = 20.0;
};

struct EdaComponents {
  std::vector<double> tonic;
  std::vector<double> phasic;
  double sample_rate = 0.0;
  double start_time = 0.0;
  double window_len = 0.0;
};

/// Splits a preprocessed single-channel EDA block into tonic and phasic
/// components. phasic := input - tonic, so the sum reconstructs the input.
inline EdaComponents eda_decompose(const SampleBlock& block, const EdaParams& params = {}) {
  if (block.kind != SignalKind::EDA) throw ValidationError("eda_decompose: expected EDA block");
  block.validate();
  if (block.channel_count() != 1)
    throw ValidationError("eda_decompose: expected a single channel, got " +
                          std::to_string(block.channel_count()));
  if (block.duration() < params.min_duration_s - 1e-9)
    throw InsufficientDataError("eda_decompose: need at least " +
                                std::to_string(params.min_duration_s) + " s, got " +
                                std::to_string(block.duration()) + " s");

  FilterSpec spec{FilterKind::Lowpass, std::nullopt, params.tonic_cutoff_hz, params.tonic_order,
                  true};
  const SosFilter filter = SosFilter::design(spec, block.sample_rate);

  EdaComponents out;
  out.sample_rate = block.sample_rate;
  out.start_time = block.start_time;
  out.window_len = block.duration();
  out.tonic = filter.filtfilt(block.data[0]);
  out.phasic.resize(out.tonic.size());
  for (std::size_t i = 0; i < out.tonic.size(); ++i)
    out.phasic[i] = block.data[0][i] - out.tonic[i];
  return out;
}

/// Local maxima of x with prominence >= min_prominence. Prominence is the
/// height above the higher of the two valley floors reached before a taller
/// sample (or the signal edge) on each side.
inline std::vector<std::size_t> prominent_peaks(const std::vector<double>& x,
                                                double min_prominence) {
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    if (!(x[i] > x[i - 1] && x[i] >= x[i + 1])) continue;
    double left_min = x[i];
    for (std::size_t j = i; j-- > 0;) {
      if (x[j] > x[i]) break;
      left_min = std::min(left_min, x[j]);
    }
    double right_min = x[i];
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      if (x[j] > x[i]) break;
      right_min = std::min(right_min, x[j]);
    }
    const double prominence = x[i] - std::max(left_min, right_min);
    if (prominence >= min_prominence) peaks.push_back(i);
  }
  return peaks;
}

/// Statistics of the two components and of the detected phasic peaks.
/// With zero peaks the peak-amplitude statistics are 0 by convention.
inline FeatureVector eda_features(const EdaComponents& components, const EdaParams& params = {}) {
  if (components.tonic.size() != components.phasic.size() || components.tonic.empty())
    throw ValidationError("eda_features: malformed components");

  const auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const auto var_of = [&](const std::vector<double>& v, double m) {
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
  };

  const double tonic_mean = mean_of(components.tonic);
  const double tonic_var = var_of(components.tonic, tonic_mean);
  const double phasic_mean = mean_of(components.phasic);
  const double phasic_var = var_of(components.phasic, phasic_mean);

  const auto peaks = prominent_peaks(components.phasic, params.peak_min_prominence);
  double peaks_mean = 0.0, peaks_var = 0.0;
  if (!peaks.empty()) {
    std::vector<double> amplitudes(peaks.size());
    for (std::size_t k = 0; k < peaks.size(); ++k) amplitudes[k] = components.phasic[peaks[k]];
    peaks_mean = mean_of(amplitudes);
    peaks_var = var_of(amplitudes, peaks_mean);
  }

  // Mean positive slope of the phasic component, in uS per second.
  double pos_sum = 0.0;
  std::size_t pos_count = 0;
  for (std::size_t i = 0; i + 1 < components.phasic.size(); ++i) {
    const double d = (components.phasic[i + 1] - components.phasic[i]) * components.sample_rate;
    if (d > 0.0) {
      pos_sum += d;
      ++pos_count;
    }
  }
  const double pos_derivatives = pos_count > 0 ? pos_sum / static_cast<double>(pos_count) : 0.0;

  FeatureVector features;
  features.modality = SignalKind::EDA;
  features.window_start = components.start_time;
  features.window_len = components.window_len;
  features.names = {"tonic_mean",  "tonic_std",  "tonic_var",  "phasic_mean",
                    "phasic_std",  "phasic_var", "peaks_count", "peaks_mean",
                    "peaks_std",   "peaks_var",  "peaks_pos_derivatives"};
  features.values = {tonic_mean,
                     std::sqrt(tonic_var),
                     tonic_var,
                     phasic_mean,
                     std::sqrt(phasic_var),
                     phasic_var,
                     static_cast<double>(peaks.size()),
                     peaks_mean,
                     std::sqrt(peaks_var),
                     peaks_var,
                     pos_derivatives};
  features.validate();
  return features;
}

}  // namespace empath
