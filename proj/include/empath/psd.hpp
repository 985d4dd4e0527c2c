#pragma once

/// Welch power spectral density and EEG band-power features.
///
/// Defaults: 4 s Hann segments (periodic window), 50% overlap, one-sided
/// density, mean across channels, band integration by trapezoid rule.
/// 4 s segments give 0.25 Hz bin spacing, enough to resolve the 0.5 Hz
/// lower delta edge.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "empath/errors.hpp"
#include "empath/feature_vector.hpp"
#include "empath/fft.hpp"
#include "empath/signal.hpp"

namespace empath {

struct WelchParams {
  double segment_s = 4.0;
  double overlap = 0.5;  // fraction of segment
};

struct EegBand {
  const char* name;
  double low_hz;
  double high_hz;
};

/// Canonical band set; order is the feature order.
inline constexpr std::array<EegBand, 5> kEegBands{{
    {"psd_delta", 0.5, 4.0},
    {"psd_theta", 4.0, 8.0},
    {"psd_alpha", 8.0, 12.0},
    {"psd_beta", 12.0, 30.0},
    {"psd_gamma", 30.0, 45.0},
}};

/// One-sided Welch PSD of a single channel. Returns bin densities; bin k
/// sits at frequency k * fs / nperseg, written to `freqs` when non-null.
inline std::vector<double> welch_psd(const std::vector<double>& x, double fs,
                                     const WelchParams& params = {},
                                     std::vector<double>* freqs = nullptr) {
  const std::size_t nperseg = static_cast<std::size_t>(std::llround(params.segment_s * fs));
  if (nperseg < 8) throw ConfigError("welch_psd: segment too short");
  if (x.size() < nperseg)
    throw InsufficientDataError("welch_psd: need at least " + std::to_string(nperseg) +
                                " samples, got " + std::to_string(x.size()));
  const std::size_t step =
      std::max<std::size_t>(1, nperseg - static_cast<std::size_t>(std::llround(
                                             params.overlap * static_cast<double>(nperseg))));
  const std::size_t nseg = 1 + (x.size() - nperseg) / step;

  // Periodic Hann window.
  std::vector<double> window(nperseg);
  double u = 0.0;  // window power, sum w^2
  for (std::size_t i = 0; i < nperseg; ++i) {
    window[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                      static_cast<double>(nperseg)));
    u += window[i] * window[i];
  }

  const std::size_t nbins = nperseg / 2 + 1;
  std::vector<double> psd(nbins, 0.0);
  std::vector<double> seg(nperseg);
  for (std::size_t s = 0; s < nseg; ++s) {
    for (std::size_t i = 0; i < nperseg; ++i) seg[i] = x[s * step + i] * window[i];
    const auto spectrum = fft_real(seg);
    for (std::size_t k = 0; k < nbins; ++k) psd[k] += std::norm(spectrum[k]);
  }
  const double scale = 1.0 / (static_cast<double>(nseg) * fs * u);
  for (std::size_t k = 0; k < nbins; ++k) {
    psd[k] *= scale;
    const bool interior = k != 0 && !(nperseg % 2 == 0 && k == nbins - 1);
    if (interior) psd[k] *= 2.0;  // fold negative frequencies
  }
  if (freqs) {
    freqs->resize(nbins);
    for (std::size_t k = 0; k < nbins; ++k)
      (*freqs)[k] = static_cast<double>(k) * fs / static_cast<double>(nperseg);
  }
  return psd;
}

/// Integrates a PSD over [low_hz, high_hz] with the trapezoid rule, using
/// the bins that fall inside the band.
inline double band_power(const std::vector<double>& psd, const std::vector<double>& freqs,
                         double low_hz, double high_hz) {
  constexpr double eps = 1e-9;
  std::size_t first = psd.size(), last = 0;
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    if (freqs[k] >= low_hz - eps && freqs[k] <= high_hz + eps) {
      first = std::min(first, k);
      last = std::max(last, k);
    }
  }
  if (first >= psd.size()) return 0.0;
  if (first == last) return psd[first] * (high_hz - low_hz);
  double power = 0.0;
  for (std::size_t k = first; k < last; ++k)
    power += 0.5 * (psd[k] + psd[k + 1]) * (freqs[k + 1] - freqs[k]);
  return power;
}

/// Five EEG band powers (delta..gamma), channel-averaged Welch PSD.
/// Input must be a preprocessed EEG block of at least 4 s.
inline FeatureVector eeg_band_psd(const SampleBlock& block, const WelchParams& params = {}) {
  if (block.kind != SignalKind::EEG) throw ValidationError("eeg_band_psd: expected EEG block");
  block.validate();
  if (block.duration() < params.segment_s - 1e-9)
    throw InsufficientDataError("eeg_band_psd: need at least " + std::to_string(params.segment_s) +
                                " s, got " + std::to_string(block.duration()) + " s");
  if (block.sample_rate < 2.0 * kEegBands.back().high_hz)
    throw ValidationError("eeg_band_psd: gamma band unrepresentable below " +
                          std::to_string(2.0 * kEegBands.back().high_hz) + " Hz sampling");
  if (block.channel_count() == 0) throw ValidationError("eeg_band_psd: no channels");

  std::vector<double> freqs;
  std::vector<double> mean_psd;
  for (std::size_t c = 0; c < block.channel_count(); ++c) {
    const auto psd = welch_psd(block.data[c], block.sample_rate, params, c == 0 ? &freqs : nullptr);
    if (c == 0)
      mean_psd = psd;
    else
      for (std::size_t k = 0; k < psd.size(); ++k) mean_psd[k] += psd[k];
  }
  for (double& v : mean_psd) v /= static_cast<double>(block.channel_count());

  FeatureVector features;
  features.modality = SignalKind::EEG;
  features.window_start = block.start_time;
  features.window_len = block.duration();
  for (const EegBand& band : kEegBands) {
    features.names.emplace_back(band.name);
    features.values.push_back(band_power(mean_psd, freqs, band.low_hz, band.high_hz));
  }
  features.validate();
  return features;
}

}  // namespace empath
