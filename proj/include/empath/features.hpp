#pragma once

/// Per-modality feature extraction entry point. Feature names and their
/// order are stable contract strings: models persist the expected list and
/// refuse mismatched vectors.

#include <string>
#include <vector>

#include "empath/eda.hpp"
#include "empath/feature_vector.hpp"
#include "empath/hrv.hpp"
#include "empath/ppg.hpp"
#include "empath/psd.hpp"
#include "empath/signal.hpp"

namespace empath {

struct FeatureParams {
  WelchParams welch;
  PpgPeakParams ppg;
  EdaParams eda;
};

inline const std::vector<std::string>& feature_names(SignalKind kind) {
  static const std::vector<std::string> eeg = {"psd_delta", "psd_theta", "psd_alpha", "psd_beta",
                                               "psd_gamma"};
  static const std::vector<std::string> ppg = {
      "HRV_MeanNN", "HRV_SDNN",  "HRV_RMSSD", "HRV_SDSD",  "HRV_CVNN", "HRV_MedianNN",
      "HRV_CVSD",   "HRV_MadNN", "HRV_MCVNN", "HRV_IQRNN", "HRV_pNN50", "HRV_pNN20",
      "HRV_HTI",    "HRV_TINN"};
  static const std::vector<std::string> eda = {
      "tonic_mean",  "tonic_std",  "tonic_var",   "phasic_mean", "phasic_std", "phasic_var",
      "peaks_count", "peaks_mean", "peaks_std",   "peaks_var",   "peaks_pos_derivatives"};
  switch (kind) {
    case SignalKind::EEG: return eeg;
    case SignalKind::PPG: return ppg;
    case SignalKind::EDA: return eda;
  }
  throw ValidationError("feature_names: invalid SignalKind");
}

/// Extracts the modality's feature vector from a preprocessed window block.
/// Throws InsufficientDataError when the window cannot support extraction
/// (too short, no detectable beats).
inline FeatureVector extract_features(const SampleBlock& preprocessed,
                                      const FeatureParams& params = {}) {
  switch (preprocessed.kind) {
    case SignalKind::EEG: return eeg_band_psd(preprocessed, params.welch);
    case SignalKind::PPG: {
      const NNSeries nn = detect_ppg_peaks(preprocessed, params.ppg);
      FeatureVector features = hrv_features(nn);
      features.window_start = preprocessed.start_time;
      features.window_len = preprocessed.duration();
      return features;
    }
    case SignalKind::EDA: {
      const EdaComponents components = eda_decompose(preprocessed, params.eda);
      return eda_features(components, params.eda);
    }
  }
  throw ValidationError("extract_features: invalid SignalKind");
}

}  // namespace empath
