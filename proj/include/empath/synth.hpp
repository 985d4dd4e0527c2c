#pragma once

/// Deterministic synthetic trial generator.
///
/// Produces labeled trials whose signals embed class-dependent signatures,
/// so the full pipeline can be trained and evaluated at desk scale without
/// recorded data. The signatures are learnable test signals, not
/// physiological claims:
///
///   arousal high  -> more frequent and larger EDA skin-conductance bumps,
///                    lower NN-interval jitter (PPG), stronger 20 Hz EEG power
///   valence high  -> stronger 10 Hz EEG power, shorter mean NN interval,
///                    higher EDA tonic level
///
/// Every trial derives its own RNG stream from (seed, trial index), so a
/// dataset is reproducible byte-for-byte from its spec.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "empath/errors.hpp"
#include "empath/labels.hpp"
#include "empath/rng.hpp"
#include "empath/signal.hpp"

namespace empath {

/// Class-conditional effect sizes. All are additive shifts applied when the
/// trial's binary class for the coupled dimension is high.
struct SynthEffects {
  // arousal couplings
  double eda_scr_rate_per_min = 10.0;  // extra skin-conductance bumps per minute
  double eda_scr_amp_us = 0.45;        // extra bump amplitude
  double hrv_dispersion_drop = 0.8;    // fractional NN jitter reduction, in [0, 1)
  double eeg_beta_uv = 8.0;            // extra 20 Hz amplitude
  // valence couplings
  double eeg_alpha_uv = 9.0;       // extra 10 Hz amplitude
  double ppg_mean_nn_drop_s = 0.12;  // mean NN reduction
  double eda_tonic_us = 0.8;       // extra tonic level

  void validate() const {
    for (double v : {eda_scr_rate_per_min, eda_scr_amp_us, eeg_beta_uv, eeg_alpha_uv,
                     ppg_mean_nn_drop_s, eda_tonic_us})
      if (v < 0.0) throw ConfigError("synth effect sizes must be >= 0");
    if (hrv_dispersion_drop < 0.0 || hrv_dispersion_drop >= 1.0)
      throw ConfigError("hrv_dispersion_drop must be in [0, 1)");
  }

  static SynthEffects strong() { return {}; }

  static SynthEffects none() {
    SynthEffects e;
    e.eda_scr_rate_per_min = 0.0;
    e.eda_scr_amp_us = 0.0;
    e.hrv_dispersion_drop = 0.0;
    e.eeg_beta_uv = 0.0;
    e.eeg_alpha_uv = 0.0;
    e.ppg_mean_nn_drop_s = 0.0;
    e.eda_tonic_us = 0.0;
    return e;
  }
};

struct SynthSpec {
  std::uint64_t seed = 1;
  int trials_per_quadrant = 4;
  double duration_s = 40.0;
  SynthEffects effects = SynthEffects::strong();

  // stream configuration (common OpenBCI / Shimmer rates)
  double eeg_rate_hz = 250.0;
  int eeg_channels = 8;
  double ppg_rate_hz = 128.0;
  double eda_rate_hz = 128.0;

  // baseline signal parameters
  double eeg_noise_uv = 8.0;
  double eeg_alpha_base_uv = 3.0;
  double eeg_beta_base_uv = 2.5;
  double eeg_theta_base_uv = 2.0;
  double ppg_noise = 0.02;
  double ppg_mean_nn_s = 0.8;
  double ppg_jitter_s = 0.045;
  double eda_noise_us = 0.01;
  double eda_tonic_base_us = 2.0;
  double eda_scr_rate_base_per_min = 2.0;
  double eda_scr_amp_base_us = 0.15;
  double scr_rise_s = 0.3;
  double scr_decay_s = 1.2;

  void validate() const {
    effects.validate();
    if (trials_per_quadrant < 1) throw ConfigError("trials_per_quadrant must be >= 1");
    if (duration_s < 20.0) throw ConfigError("synth duration must be at least 20 s");
    if (eeg_channels < 1) throw ConfigError("eeg_channels must be >= 1");
  }
};

namespace detail {

/// Biexponential bump normalized to unit peak height.
inline double scr_bump(double u, double rise_s, double decay_s) {
  if (u <= 0.0) return 0.0;
  const double t_peak = std::log(decay_s / rise_s) * rise_s * decay_s / (decay_s - rise_s);
  const double norm = std::exp(-t_peak / decay_s) - std::exp(-t_peak / rise_s);
  return (std::exp(-u / decay_s) - std::exp(-u / rise_s)) / norm;
}

inline SampleBlock synth_eeg(const SynthSpec& spec, bool high_arousal, bool high_valence,
                             Rng& rng) {
  SampleBlock block;
  block.kind = SignalKind::EEG;
  block.sample_rate = spec.eeg_rate_hz;
  const std::size_t n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.eeg_rate_hz));
  const double alpha = spec.eeg_alpha_base_uv + (high_valence ? spec.effects.eeg_alpha_uv : 0.0);
  const double beta = spec.eeg_beta_base_uv + (high_arousal ? spec.effects.eeg_beta_uv : 0.0);
  for (int c = 0; c < spec.eeg_channels; ++c) {
    block.channels.push_back("ch" + std::to_string(c + 1));
    const double phase_a = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double phase_b = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double phase_t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / spec.eeg_rate_hz;
      x[i] = alpha * std::sin(2.0 * std::numbers::pi * 10.0 * t + phase_a) +
             beta * std::sin(2.0 * std::numbers::pi * 20.0 * t + phase_b) +
             spec.eeg_theta_base_uv * std::sin(2.0 * std::numbers::pi * 6.0 * t + phase_t) +
             spec.eeg_noise_uv * rng.normal();
    }
    block.data.push_back(std::move(x));
  }
  return block;
}

inline SampleBlock synth_ppg(const SynthSpec& spec, bool high_arousal, bool high_valence,
                             Rng& rng) {
  SampleBlock block;
  block.kind = SignalKind::PPG;
  block.sample_rate = spec.ppg_rate_hz;
  block.channels = {"ppg"};
  const std::size_t n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.ppg_rate_hz));
  std::vector<double> x(n, 0.0);

  const double mean_nn =
      spec.ppg_mean_nn_s - (high_valence ? spec.effects.ppg_mean_nn_drop_s : 0.0);
  const double jitter =
      spec.ppg_jitter_s * (high_arousal ? 1.0 - spec.effects.hrv_dispersion_drop : 1.0);

  double beat = 0.3;
  while (beat < spec.duration_s) {
    for (std::size_t i = 0; i < n; ++i) {
      const double u = static_cast<double>(i) / spec.ppg_rate_hz - beat;
      if (u < -0.4 || u > 0.8) continue;
      x[i] += std::exp(-u * u / (2.0 * 0.05 * 0.05)) +
              0.25 * std::exp(-(u - 0.3) * (u - 0.3) / (2.0 * 0.08 * 0.08));
    }
    const double step = mean_nn + jitter * std::clamp(rng.normal(), -2.5, 2.5);
    beat += std::max(0.4, step);
  }
  for (double& v : x) v += spec.ppg_noise * rng.normal();
  block.data.push_back(std::move(x));
  return block;
}

inline SampleBlock synth_eda(const SynthSpec& spec, bool high_arousal, bool high_valence,
                             Rng& rng) {
  SampleBlock block;
  block.kind = SignalKind::EDA;
  block.sample_rate = spec.eda_rate_hz;
  block.channels = {"eda"};
  const std::size_t n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.eda_rate_hz));

  const double tonic = spec.eda_tonic_base_us + (high_valence ? spec.effects.eda_tonic_us : 0.0);
  const double drift_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / spec.eda_rate_hz;
    x[i] = tonic + 0.15 * std::sin(2.0 * std::numbers::pi * 0.01 * t + drift_phase) +
           spec.eda_noise_us * rng.normal();
  }

  const double rate_per_s =
      (spec.eda_scr_rate_base_per_min + (high_arousal ? spec.effects.eda_scr_rate_per_min : 0.0)) /
      60.0;
  const double amp_base =
      spec.eda_scr_amp_base_us + (high_arousal ? spec.effects.eda_scr_amp_us : 0.0);
  double onset = rate_per_s > 0.0 ? rng.exponential(rate_per_s) : spec.duration_s + 1.0;
  while (onset < spec.duration_s) {
    const double amp = amp_base * rng.uniform(0.8, 1.2);
    const std::size_t i0 = static_cast<std::size_t>(onset * spec.eda_rate_hz);
    const std::size_t i1 =
        std::min(n, i0 + static_cast<std::size_t>(8.0 * spec.scr_decay_s * spec.eda_rate_hz));
    for (std::size_t i = i0; i < i1; ++i) {
      const double u = static_cast<double>(i) / spec.eda_rate_hz - onset;
      x[i] += amp * scr_bump(u, spec.scr_rise_s, spec.scr_decay_s);
    }
    onset += rng.exponential(rate_per_s);
  }
  block.data.push_back(std::move(x));
  return block;
}

}  // namespace detail

/// Builds one labeled trial. trial_index selects the per-trial RNG stream.
inline TrialRecord synth_trial(const SynthSpec& spec, Quadrant category, int trial_index) {
  spec.validate();
  Rng rng(Rng::derive(spec.seed, static_cast<std::uint64_t>(trial_index)));

  const bool high_arousal = category == Quadrant::HAHV || category == Quadrant::HALV;
  const bool high_valence = category == Quadrant::HAHV || category == Quadrant::LAHV;

  TrialRecord trial;
  char id[32];
  std::snprintf(id, sizeof id, "trial_%04d_%s", trial_index, to_string(category));
  trial.trial_id = id;
  trial.topic_category = category;
  trial.label.arousal_rate = high_arousal ? 4 + static_cast<int>(rng.below(2))
                                          : 1 + static_cast<int>(rng.below(2));
  trial.label.valence_rate = high_valence ? 4 + static_cast<int>(rng.below(2))
                                          : 1 + static_cast<int>(rng.below(2));
  trial.speech_spans = {{0.25 * spec.duration_s, 0.9 * spec.duration_s}};
  trial.streams[SignalKind::EEG] = {detail::synth_eeg(spec, high_arousal, high_valence, rng)};
  trial.streams[SignalKind::PPG] = {detail::synth_ppg(spec, high_arousal, high_valence, rng)};
  trial.streams[SignalKind::EDA] = {detail::synth_eda(spec, high_arousal, high_valence, rng)};
  trial.validate();
  return trial;
}

/// Full dataset: trials_per_quadrant trials for each of the four quadrants,
/// interleaved so any prefix stays class-balanced.
inline std::vector<TrialRecord> synth_dataset(const SynthSpec& spec) {
  spec.validate();
  std::vector<TrialRecord> trials;
  trials.reserve(static_cast<std::size_t>(spec.trials_per_quadrant) * 4);
  int index = 0;
  for (int i = 0; i < spec.trials_per_quadrant; ++i)
    for (Quadrant q : kQuadrants) trials.push_back(synth_trial(spec, q, index++));
  return trials;
}

}  // namespace empath
