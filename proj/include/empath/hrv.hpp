#pragma once

/// Time-domain heart-rate-variability features over a normal-to-normal
/// interbeat interval series.
///
/// Definitions (all intervals in milliseconds):
///   MeanNN   mean(NN)
///   SDNN     sample standard deviation (ddof 1)
///   RMSSD    sqrt(mean(diff^2)) over successive differences
///   SDSD     sample standard deviation of successive differences
///   CVNN     SDNN / MeanNN
///   MedianNN median(NN)
///   CVSD     RMSSD / MeanNN
///   MadNN    1.4826 * median(|NN - median(NN)|)
///   MCVNN    MadNN / MedianNN
///   IQRNN    Q3 - Q1, linear-interpolation quantiles
///   pNN50    % of |successive differences| > 50 ms
///   pNN20    % of |successive differences| > 20 ms
///   HTI      N / max bin count of the NN histogram (bin width 7.8125 ms)
///   TINN     baseline width of the least-squares triangular fit to that
///            histogram (ms)

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "empath/errors.hpp"
#include "empath/feature_vector.hpp"

namespace empath {

inline constexpr double kNnMinMs = 300.0;
inline constexpr double kNnMaxMs = 2000.0;
inline constexpr double kHrvBinWidthMs = 7.8125;
inline constexpr std::size_t kHrvGeometricMinIntervals = 20;  // for HTI/TINN

/// Normal-to-normal interbeat intervals after artifact rejection.
struct NNSeries {
  std::vector<double> intervals_ms;

  void validate() const {
    if (intervals_ms.size() < 2)
      throw InsufficientDataError("NN series needs at least 2 intervals, got " +
                                  std::to_string(intervals_ms.size()));
    for (double v : intervals_ms)
      if (!(v >= kNnMinMs && v <= kNnMaxMs))
        throw ValidationError("NN interval outside [300, 2000] ms: " + std::to_string(v));
  }
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

/// Linear-interpolation quantile of an unsorted copy.
inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= v.size()) return v[lo];
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

struct NnHistogram {
  double origin = 0.0;  // leftmost bin edge, multiple of the bin width
  std::vector<std::size_t> counts;

  double edge(std::size_t i) const { return origin + static_cast<double>(i) * kHrvBinWidthMs; }
  double center(std::size_t i) const { return edge(i) + kHrvBinWidthMs / 2.0; }
};

inline NnHistogram nn_histogram(const std::vector<double>& nn) {
  const auto [lo_it, hi_it] = std::minmax_element(nn.begin(), nn.end());
  NnHistogram h;
  h.origin = std::floor(*lo_it / kHrvBinWidthMs) * kHrvBinWidthMs;
  const std::size_t nbins =
      static_cast<std::size_t>(std::floor((*hi_it - h.origin) / kHrvBinWidthMs)) + 1;
  h.counts.assign(nbins, 0);
  for (double x : nn) {
    std::size_t i = static_cast<std::size_t>(std::floor((x - h.origin) / kHrvBinWidthMs));
    if (i >= nbins) i = nbins - 1;
    ++h.counts[i];
  }
  return h;
}

/// Least-squares triangular fit: the triangle is pinned to the histogram
/// peak (X, Y) and its feet N <= X <= M slide over bin edges; returns M - N
/// of the best fit. Ties prefer the narrower, then the leftmost triangle.
inline double triangular_baseline_width(const NnHistogram& h) {
  const std::size_t peak =
      static_cast<std::size_t>(std::max_element(h.counts.begin(), h.counts.end()) -
                               h.counts.begin());
  const double x_peak = h.center(peak);
  const double y_peak = static_cast<double>(h.counts[peak]);
  double best_sse = std::numeric_limits<double>::infinity();
  double best_width = 0.0;
  double best_n = 0.0;
  for (std::size_t ni = 0; ni <= peak; ++ni) {
    const double n_edge = h.edge(ni);
    for (std::size_t mi = peak + 1; mi <= h.counts.size(); ++mi) {
      const double m_edge = h.edge(mi);
      double sse = 0.0;
      for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double c = h.center(i);
        double q = 0.0;
        if (c > n_edge && c < m_edge) {
          q = c <= x_peak ? y_peak * (c - n_edge) / (x_peak - n_edge)
                          : y_peak * (m_edge - c) / (m_edge - x_peak);
        }
        const double r = static_cast<double>(h.counts[i]) - q;
        sse += r * r;
      }
      const double width = m_edge - n_edge;
      const bool better = sse < best_sse - 1e-12 ||
                          (std::abs(sse - best_sse) <= 1e-12 &&
                           (width < best_width || (width == best_width && n_edge < best_n)));
      if (better) {
        best_sse = sse;
        best_width = width;
        best_n = n_edge;
      }
    }
  }
  return best_width;
}

}  // namespace detail

/// Computes all 14 time-domain features. Requires >= 2 intervals; the
/// geometric features (HTI, TINN) additionally require >= 20.
inline FeatureVector hrv_features(const NNSeries& nn) {
  nn.validate();
  const std::vector<double>& x = nn.intervals_ms;
  if (x.size() < kHrvGeometricMinIntervals)
    throw InsufficientDataError("HRV_HTI/HRV_TINN need at least " +
                                std::to_string(kHrvGeometricMinIntervals) + " intervals, got " +
                                std::to_string(x.size()));

  std::vector<double> diffs(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) diffs[i] = x[i + 1] - x[i];

  const double mean_nn = detail::mean_of(x);
  const double sdnn = detail::sample_std(x);
  double sum_sq_diff = 0.0;
  std::size_t over50 = 0, over20 = 0;
  for (double d : diffs) {
    sum_sq_diff += d * d;
    if (std::abs(d) > 50.0) ++over50;
    if (std::abs(d) > 20.0) ++over20;
  }
  const double rmssd = std::sqrt(sum_sq_diff / static_cast<double>(diffs.size()));
  const double sdsd = detail::sample_std(diffs);
  const double median_nn = detail::quantile(x, 0.5);
  std::vector<double> abs_dev(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) abs_dev[i] = std::abs(x[i] - median_nn);
  const double mad_nn = 1.4826 * detail::quantile(abs_dev, 0.5);
  const double iqr_nn = detail::quantile(x, 0.75) - detail::quantile(x, 0.25);
  const double pnn50 = 100.0 * static_cast<double>(over50) / static_cast<double>(diffs.size());
  const double pnn20 = 100.0 * static_cast<double>(over20) / static_cast<double>(diffs.size());

  const auto hist = detail::nn_histogram(x);
  const std::size_t max_count = *std::max_element(hist.counts.begin(), hist.counts.end());
  const double hti = static_cast<double>(x.size()) / static_cast<double>(max_count);
  const double tinn = detail::triangular_baseline_width(hist);

  FeatureVector features;
  features.modality = SignalKind::PPG;
  features.names = {"HRV_MeanNN", "HRV_SDNN",  "HRV_RMSSD", "HRV_SDSD", "HRV_CVNN",
                    "HRV_MedianNN", "HRV_CVSD", "HRV_MadNN", "HRV_MCVNN", "HRV_IQRNN",
                    "HRV_pNN50", "HRV_pNN20", "HRV_HTI",   "HRV_TINN"};
  features.values = {mean_nn,
                     sdnn,
                     rmssd,
                     sdsd,
                     sdnn / mean_nn,
                     median_nn,
                     rmssd / mean_nn,
                     mad_nn,
                     mad_nn / median_nn,
                     iqr_nn,
                     pnn50,
                     pnn20,
                     hti,
                     tinn};
  features.validate();
  return features;
}

}  // namespace empath
