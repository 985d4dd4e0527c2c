#pragma once

/// IIR filtering: Butterworth designs realized as cascaded second-order
/// sections, applied either single-pass or forward-backward (zero phase).
/// Edge transients of the zero-phase path are controlled by odd reflection
/// padding plus steady-state priming of each section, so constants and slow
/// trends pass through without boundary artifacts.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "empath/errors.hpp"

namespace empath {

enum class FilterKind { Lowpass, Highpass, Bandpass };

inline const char* to_string(FilterKind k) {
  switch (k) {
    case FilterKind::Lowpass: return "lowpass";
    case FilterKind::Highpass: return "highpass";
    case FilterKind::Bandpass: return "bandpass";
  }
  throw ValidationError("invalid FilterKind");
}

inline FilterKind filter_kind_from_string(const std::string& s) {
  if (s == "lowpass") return FilterKind::Lowpass;
  if (s == "highpass") return FilterKind::Highpass;
  if (s == "bandpass") return FilterKind::Bandpass;
  throw ParseError("unknown filter kind: '" + s + "'");
}

/// Filter description, exposed through the engine config.
/// Lowpass uses high_hz as its cutoff (upper passband edge), highpass uses
/// low_hz, bandpass uses both.
struct FilterSpec {
  FilterKind kind = FilterKind::Lowpass;
  std::optional<double> low_hz;
  std::optional<double> high_hz;
  int order = 2;
  bool zero_phase = true;

  void validate(double sample_rate) const {
    if (!(sample_rate > 0.0)) throw ConfigError("filter: sample rate must be positive");
    if (order < 1 || order > 8)
      throw ConfigError("filter: order must be in 1..8, got " + std::to_string(order));
    const double nyq = sample_rate / 2.0;
    switch (kind) {
      case FilterKind::Lowpass:
        if (!high_hz || !(*high_hz > 0.0) || !(*high_hz < nyq))
          throw ConfigError("lowpass: high_hz must lie in (0, fs/2)");
        break;
      case FilterKind::Highpass:
        if (!low_hz || !(*low_hz > 0.0) || !(*low_hz < nyq))
          throw ConfigError("highpass: low_hz must lie in (0, fs/2)");
        break;
      case FilterKind::Bandpass:
        if (!low_hz || !high_hz) throw ConfigError("bandpass: both low_hz and high_hz required");
        if (!(*low_hz > 0.0) || !(*low_hz < *high_hz) || !(*high_hz < nyq))
          throw ConfigError("bandpass: need 0 < low_hz < high_hz < fs/2");
        break;
    }
  }
};

/// One second-order section, transfer
/// (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2).
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

class SosFilter {
 public:
  /// Designs a digital Butterworth filter of the given spec at sample rate fs
  /// via the bilinear transform with frequency prewarping.
  static SosFilter design(const FilterSpec& spec, double fs) {
    spec.validate(fs);
    constexpr double pi = std::numbers::pi;
    const int n = spec.order;

    // Analog prototype poles, unit cutoff. Keep one pole per conjugate pair
    // (positive imaginary part); an odd order adds the real pole at -1.
    std::vector<std::complex<double>> pair_poles;
    for (int k = 0; k < n; ++k) {
      const double theta = pi * (2.0 * k + n + 1.0) / (2.0 * n);
      std::complex<double> p(std::cos(theta), std::sin(theta));
      if (p.imag() > 1e-12) pair_poles.push_back(p);
    }
    const bool has_real_pole = (n % 2) == 1;

    SosFilter f;
    f.zero_phase_ = spec.zero_phase;
    f.sample_rate_ = fs;
    // Slowest band edge; sets how much reflection padding the zero-phase
    // pass needs to flush its edge transient.
    f.lowest_edge_hz_ = spec.low_hz ? *spec.low_hz : *spec.high_hz;
    std::complex<double> z_ref;  // frequency at which the gain is pinned to 1

    switch (spec.kind) {
      case FilterKind::Lowpass: {
        const double w = std::tan(pi * *spec.high_hz / fs);
        for (const auto& p : pair_poles)
          f.sections_.push_back(pair_section(bilinear(w * p), 1.0, 2.0, 1.0));
        if (has_real_pole)
          f.sections_.push_back(real_section(bilinear(std::complex<double>(-w, 0.0)), 1.0, 1.0));
        z_ref = {1.0, 0.0};
        break;
      }
      case FilterKind::Highpass: {
        const double w = std::tan(pi * *spec.low_hz / fs);
        for (const auto& p : pair_poles)
          f.sections_.push_back(pair_section(bilinear(w / p), 1.0, -2.0, 1.0));
        if (has_real_pole)
          f.sections_.push_back(real_section(bilinear(std::complex<double>(-w, 0.0)), 1.0, -1.0));
        z_ref = {-1.0, 0.0};
        break;
      }
      case FilterKind::Bandpass: {
        const double wl = std::tan(pi * *spec.low_hz / fs);
        const double wh = std::tan(pi * *spec.high_hz / fs);
        const double bw = wh - wl;
        const double w0sq = wl * wh;
        // Lowpass-to-bandpass transform: each prototype pole p yields the two
        // roots of s^2 - bw*p*s + w0^2 = 0.
        const auto split = [&](std::complex<double> p) {
          const std::complex<double> bp = bw * p;
          const std::complex<double> disc = std::sqrt(bp * bp - 4.0 * w0sq);
          return std::pair{(bp + disc) / 2.0, (bp - disc) / 2.0};
        };
        for (const auto& p : pair_poles) {
          const auto [s1, s2] = split(p);
          f.sections_.push_back(pair_section(bilinear(s1), 1.0, 0.0, -1.0));
          f.sections_.push_back(pair_section(bilinear(s2), 1.0, 0.0, -1.0));
        }
        if (has_real_pole) {
          const auto [s1, s2] = split({-1.0, 0.0});
          const std::complex<double> z1 = bilinear(s1);
          const std::complex<double> z2 = bilinear(s2);
          // z1, z2 are either both real or a conjugate pair; either way the
          // quadratic (1 - z1 q)(1 - z2 q) has real coefficients.
          Biquad s;
          s.b0 = 1.0;
          s.b1 = 0.0;
          s.b2 = -1.0;
          s.a1 = -(z1 + z2).real();
          s.a2 = (z1 * z2).real();
          f.sections_.push_back(s);
        }
        const double omega0 = 2.0 * std::atan(std::sqrt(w0sq));
        z_ref = std::polar(1.0, omega0);
        break;
      }
    }

    // Pin unity gain at the reference frequency.
    const double g = std::abs(f.response_at(z_ref));
    if (!(g > 0.0)) throw ConfigError("filter design produced zero reference gain");
    f.sections_.front().b0 /= g;
    f.sections_.front().b1 /= g;
    f.sections_.front().b2 /= g;
    return f;
  }

  const std::vector<Biquad>& sections() const { return sections_; }
  bool zero_phase() const { return zero_phase_; }

  /// Complex frequency response of the single-pass cascade at z on the unit
  /// circle. The zero-phase path applies the squared magnitude.
  std::complex<double> response_at(std::complex<double> z) const {
    const std::complex<double> q = 1.0 / z;
    std::complex<double> h{1.0, 0.0};
    for (const Biquad& s : sections_)
      h *= (s.b0 + s.b1 * q + s.b2 * q * q) / (1.0 + s.a1 * q + s.a2 * q * q);
    return h;
  }

  /// Single forward pass (direct form II transposed). Each section is primed
  /// with the state it would hold after an infinite run of the first sample,
  /// which removes the startup transient for constants and slow trends.
  std::vector<double> filter_forward(const std::vector<double>& x) const {
    std::vector<double> y = x;
    for (const Biquad& s : sections_) {
      double s1 = 0.0, s2 = 0.0;
      if (!y.empty()) {
        const double den = 1.0 + s.a1 + s.a2;
        const double g = den != 0.0 ? (s.b0 + s.b1 + s.b2) / den : 0.0;
        const double x0 = y.front();
        s1 = ((s.b1 + s.b2) - (s.a1 + s.a2) * g) * x0;
        s2 = (s.b2 - s.a2 * g) * x0;
      }
      for (double& v : y) {
        const double xin = v;
        const double out = s.b0 * xin + s1;
        s1 = s.b1 * xin - s.a1 * out + s2;
        s2 = s.b2 * xin - s.a2 * out;
        v = out;
      }
    }
    return y;
  }

  /// Forward-backward pass with odd reflection padding on both ends.
  /// The reflection pivots are least-squares line fits over a terminal
  /// window rather than the raw boundary samples, so wideband noise riding
  /// on the edge cannot tilt the reflected baseline.
  std::vector<double> filtfilt(const std::vector<double>& x) const {
    if (x.size() < 4)
      throw InsufficientDataError("zero-phase filtering needs at least 4 samples, got " +
                                  std::to_string(x.size()));
    const std::size_t pad = pad_length(x.size());
    const double front_pivot = edge_pivot(x, true);
    const double back_pivot = edge_pivot(x, false);

    std::vector<double> ext;
    ext.reserve(x.size() + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * front_pivot - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * back_pivot - x[x.size() - 1 - i]);

    ext = filter_forward(ext);
    std::reverse(ext.begin(), ext.end());
    ext = filter_forward(ext);
    std::reverse(ext.begin(), ext.end());
    return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
            ext.begin() + static_cast<std::ptrdiff_t>(pad + x.size())};
  }

  /// Applies the filter according to its zero_phase setting.
  std::vector<double> apply(const std::vector<double>& x) const {
    return zero_phase_ ? filtfilt(x) : filter_forward(x);
  }

  /// Padding: two periods of the slowest band edge (at least the classic
  /// 3*(2*sections+1) samples), capped at the signal length minus one.
  std::size_t pad_length(std::size_t n) const {
    const std::size_t floor_pad = 3 * (2 * sections_.size() + 1);
    const std::size_t edge_pad =
        static_cast<std::size_t>(std::llround(2.0 * sample_rate_ / lowest_edge_hz_));
    return std::min(n - 1, std::max(floor_pad, edge_pad));
  }

 private:
  /// Boundary value of the least-squares line over the terminal half period
  /// of the slowest band edge. Equals the raw boundary sample for constants
  /// and ramps; averages out anything faster than the passband.
  double edge_pivot(const std::vector<double>& x, bool front) const {
    const std::size_t w = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(0.5 * sample_rate_ / lowest_edge_hz_)), 2, x.size());
    const std::size_t base = front ? 0 : x.size() - w;
    double sum_y = 0.0, sum_iy = 0.0;
    for (std::size_t i = 0; i < w; ++i) {
      sum_y += x[base + i];
      sum_iy += static_cast<double>(i) * x[base + i];
    }
    const double n = static_cast<double>(w);
    const double sum_i = n * (n - 1.0) / 2.0;
    const double sum_ii = n * (n - 1.0) * (2.0 * n - 1.0) / 6.0;
    const double denom = n * sum_ii - sum_i * sum_i;
    if (denom == 0.0) return x[front ? 0 : x.size() - 1];
    const double slope = (n * sum_iy - sum_i * sum_y) / denom;
    const double intercept = (sum_y - slope * sum_i) / n;
    return front ? intercept : intercept + slope * (n - 1.0);
  }

  static std::complex<double> bilinear(std::complex<double> s) { return (1.0 + s) / (1.0 - s); }

  static Biquad pair_section(std::complex<double> z, double b0, double b1, double b2) {
    Biquad s;
    s.b0 = b0;
    s.b1 = b1;
    s.b2 = b2;
    s.a1 = -2.0 * z.real();
    s.a2 = std::norm(z);
    return s;
  }

  static Biquad real_section(std::complex<double> z, double b0, double b1) {
    Biquad s;
    s.b0 = b0;
    s.b1 = b1;
    s.b2 = 0.0;
    s.a1 = -z.real();
    s.a2 = 0.0;
    return s;
  }

  std::vector<Biquad> sections_;
  bool zero_phase_ = true;
  double sample_rate_ = 1.0;
  double lowest_edge_hz_ = 1.0;
};

}  // namespace empath
