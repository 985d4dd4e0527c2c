#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <numbers>

#include "empath/preprocess.hpp"
#include "empath/rng.hpp"

#include "helpers.hpp"

using namespace empath;
using namespace test_helpers;

namespace {

// Independent frequency-response oracle: evaluates the cascade's transfer
// polynomials directly. The zero-phase pipeline applies |H|^2.
double magnitude_squared_at(const SosFilter& filter, double freq_hz, double fs) {
  const std::complex<double> z =
      std::polar(1.0, 2.0 * std::numbers::pi * freq_hz / fs);
  const std::complex<double> q = 1.0 / z;
  std::complex<double> h{1.0, 0.0};
  for (const Biquad& s : filter.sections()) {
    const std::complex<double> num = s.b0 + s.b1 * q + s.b2 * q * q;
    const std::complex<double> den = 1.0 + s.a1 * q + s.a2 * q * q;
    h *= num / den;
  }
  return std::norm(h);
}

// Amplitude of a sinusoid at freq_hz, measured by demodulation over the
// interior of the signal (the outer 10% absorbs edge transients).
double measured_amplitude(const std::vector<double>& y, double fs, double freq_hz) {
  const std::size_t lo = y.size() / 10;
  const std::size_t hi = y.size() - y.size() / 10;
  double c = 0.0, s = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double w = 2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / fs;
    c += y[i] * std::cos(w);
    s += y[i] * std::sin(w);
  }
  const double n = static_cast<double>(hi - lo);
  return 2.0 * std::sqrt(c * c + s * s) / n;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("EEG preprocessing matches its frequency-response oracle") {
  const double fs = 250.0;
  const SosFilter filter = SosFilter::design(default_eeg_filter(), fs);

  SECTION("10 Hz passband tone preserved within 5%") {
    const auto out = preprocess_eeg(eeg_block({sinusoid(10.0, fs, 20.0)}));
    const double amp = measured_amplitude(out.data[0], fs, 10.0);
    const double predicted = magnitude_squared_at(filter, 10.0, fs);
    CHECK(amp == Catch::Approx(predicted).margin(0.01));
    CHECK(amp > 0.95);
    CHECK(amp < 1.05);
  }

  SECTION("60 Hz stopband tone attenuated below 10%") {
    const auto out = preprocess_eeg(eeg_block({sinusoid(60.0, fs, 20.0)}));
    const double amp = measured_amplitude(out.data[0], fs, 60.0);
    const double predicted = magnitude_squared_at(filter, 60.0, fs);
    CHECK(amp == Catch::Approx(predicted).margin(0.01));
    CHECK(amp < 0.10);
  }

  SECTION("constant 50 uV becomes exactly zero (mean removal)") {
    const auto out = preprocess_eeg(eeg_block({constant(50.0, fs, 20.0)}));
    CHECK(max_abs(out.data[0]) == 0.0);
  }
}

TEST_CASE("PPG preprocessing band") {
  const double fs = 128.0;
  const SosFilter filter = SosFilter::design(default_ppg_filter(), fs);

  SECTION("1.25 Hz cardiac tone preserved within 5%") {
    const auto out = preprocess_ppg(ppg_block(sinusoid(1.25, fs, 20.0)));
    const double amp = measured_amplitude(out.data[0], fs, 1.25);
    CHECK(amp == Catch::Approx(magnitude_squared_at(filter, 1.25, fs)).margin(0.01));
    CHECK(amp > 0.95);
    CHECK(amp < 1.05);
  }

  SECTION("20 Hz tone attenuated below 10%") {
    const auto out = preprocess_ppg(ppg_block(sinusoid(20.0, fs, 20.0)));
    CHECK(measured_amplitude(out.data[0], fs, 20.0) < 0.10);
  }

  SECTION("constant rejected by the bandpass") {
    const auto out = preprocess_ppg(ppg_block(constant(3.0, fs, 20.0)));
    CHECK(max_abs(out.data[0]) < 1e-9);
  }
}

TEST_CASE("EDA preprocessing") {
  const double fs = 128.0;

  SECTION("constant 2 uS passes through") {
    const auto out = preprocess_eda(eda_block(constant(2.0, fs, 20.0)));
    for (double v : out.data[0]) CHECK(v == Catch::Approx(2.0).margin(1e-9));
  }

  SECTION("10 Hz noise of amplitude 0.1 suppressed to within 2 +/- 0.02") {
    auto x = constant(2.0, fs, 20.0);
    const auto noise = sinusoid(10.0, fs, 20.0, 0.1);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += noise[i];
    const auto out = preprocess_eda(eda_block(std::move(x)));
    for (double v : out.data[0]) {
      CHECK(v > 1.98);
      CHECK(v < 2.02);
    }
  }

  SECTION("negative conductance clamped with warning count") {
    auto x = constant(2.0, fs, 20.0);
    x[100] = -0.5;
    std::size_t clamped = 0;
    preprocess_eda(eda_block(std::move(x)), default_eda_filter(), &clamped);
    CHECK(clamped == 1);
  }
}

TEST_CASE("preprocessing is linear, shape-preserving, and deterministic") {
  const double fs = 250.0;
  Rng rng(11);
  std::vector<double> x(5000), y(5000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.normal(0.0, 5.0);
    y[i] = rng.normal(0.0, 5.0);
  }

  SECTION("linearity within 1e-6 relative") {
    const double a = 1.7, b = -0.4;
    std::vector<double> combo(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) combo[i] = a * x[i] + b * y[i];
    const auto fx = preprocess_eeg(eeg_block({x}));
    const auto fy = preprocess_eeg(eeg_block({y}));
    const auto fc = preprocess_eeg(eeg_block({combo}));
    double scale = 0.0;
    for (double v : fc.data[0]) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double expected = a * fx.data[0][i] + b * fy.data[0][i];
      CHECK(std::abs(fc.data[0][i] - expected) <= 1e-6 * scale);
    }
  }

  SECTION("shape preserved") {
    const auto out = preprocess_eeg(eeg_block({x, y}));
    CHECK(out.channel_count() == 2);
    CHECK(out.sample_count() == x.size());
    CHECK(out.sample_rate == fs);
  }

  SECTION("bit-identical across runs") {
    const auto a = preprocess_eeg(eeg_block({x}));
    const auto b2 = preprocess_eeg(eeg_block({x}));
    CHECK(a.data == b2.data);
  }
}

TEST_CASE("preprocessing error paths") {
  SECTION("short input refused") {
    CHECK_THROWS_AS(preprocess_eeg(eeg_block({constant(1.0, 250.0, 1.0)})),
                    InsufficientDataError);
    CHECK_THROWS_AS(preprocess_ppg(ppg_block(constant(1.0, 128.0, 1.5))), InsufficientDataError);
    CHECK_THROWS_AS(preprocess_eda(eda_block(constant(1.0, 128.0, 0.5))), InsufficientDataError);
  }

  SECTION("wrong kind refused") {
    CHECK_THROWS_AS(preprocess_eeg(ppg_block(constant(1.0, 128.0, 20.0))), ValidationError);
  }

  SECTION("EEG below 100 Hz refused") {
    CHECK_THROWS_AS(preprocess_eeg(eeg_block({constant(1.0, 90.0, 20.0)}, 90.0)),
                    ValidationError);
  }

  SECTION("bad filter specs refused") {
    CHECK_THROWS_AS(SosFilter::design({FilterKind::Bandpass, 45.0, 1.0, 4, true}, 250.0),
                    ConfigError);
    CHECK_THROWS_AS(SosFilter::design({FilterKind::Lowpass, std::nullopt, 200.0, 2, true}, 250.0),
                    ConfigError);
    CHECK_THROWS_AS(SosFilter::design({FilterKind::Lowpass, std::nullopt, 1.0, 9, true}, 250.0),
                    ConfigError);
  }
}

TEST_CASE("designs cover odd orders and highpass") {
  const double fs = 250.0;
  const SosFilter hp = SosFilter::design({FilterKind::Highpass, 5.0, std::nullopt, 3, true}, fs);
  CHECK(magnitude_squared_at(hp, 50.0, fs) == Catch::Approx(1.0).margin(1e-3));
  CHECK(magnitude_squared_at(hp, 0.5, fs) < 1e-3);

  const SosFilter bp = SosFilter::design({FilterKind::Bandpass, 2.0, 30.0, 3, true}, fs);
  CHECK(magnitude_squared_at(bp, 10.0, fs) == Catch::Approx(1.0).margin(1e-2));
  CHECK(magnitude_squared_at(bp, 80.0, fs) < 1e-2);
}
