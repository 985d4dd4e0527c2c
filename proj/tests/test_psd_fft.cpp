#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <numbers>

#include "empath/psd.hpp"
#include "empath/rng.hpp"

#include "helpers.hpp"

using namespace empath;
using namespace test_helpers;

namespace {

// Quadratic-time DFT oracle.
std::vector<std::complex<double>> dft_oracle(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> sum{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) *
                           static_cast<double>(j) / static_cast<double>(n);
      sum += x[j] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out[k] = sum;
  }
  return out;
}

}  // namespace

TEST_CASE("fft matches the direct DFT oracle on power-of-two and odd sizes") {
  Rng rng(3);
  for (std::size_t n : {8u, 64u, 100u, 250u, 1000u}) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {rng.normal(), rng.normal()};
    const auto fast = fft(x);
    const auto slow = dft_oracle(x);
    double max_err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      max_err = std::max(max_err, std::abs(fast[k] - slow[k]));
      scale = std::max(scale, std::abs(slow[k]));
    }
    INFO("n = " << n);
    CHECK(max_err <= 1e-9 * std::max(1.0, scale));
  }
}

TEST_CASE("10 Hz sinusoid concentrates in the alpha band") {
  const auto block = eeg_block({sinusoid(10.0, 250.0, 20.0)});
  const auto features = eeg_band_psd(block);
  double total = 0.0;
  for (double v : features.values) total += v;
  CHECK(features.at("psd_alpha") >= 0.9 * total);
  // band power of a unit sinusoid is amplitude^2 / 2
  CHECK(features.at("psd_alpha") == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("all-zero signal yields exactly zero band powers") {
  const auto features = eeg_band_psd(eeg_block({constant(0.0, 250.0, 20.0)}));
  for (double v : features.values) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("channel averaging: silent second channel halves the power") {
  const auto one = eeg_band_psd(eeg_block({sinusoid(10.0, 250.0, 20.0)}));
  const auto two =
      eeg_band_psd(eeg_block({sinusoid(10.0, 250.0, 20.0), constant(0.0, 250.0, 20.0)}));
  CHECK(two.at("psd_alpha") ==
        Catch::Approx(0.5 * one.at("psd_alpha")).epsilon(1e-9));
}

TEST_CASE("band powers scale quadratically with input amplitude") {
  Rng rng(17);
  std::vector<double> x(5000);
  for (auto& v : x) v = rng.normal(0.0, 10.0);
  std::vector<double> scaled(x.size());
  const double k = 3.7;
  for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = k * x[i];

  const auto base = eeg_band_psd(eeg_block({x}));
  const auto boosted = eeg_band_psd(eeg_block({scaled}));
  for (std::size_t i = 0; i < base.values.size(); ++i)
    CHECK(boosted.values[i] == Catch::Approx(k * k * base.values[i]).epsilon(1e-6));
}

TEST_CASE("band powers are nonnegative on arbitrary signals") {
  Rng rng(23);
  for (int round = 0; round < 10; ++round) {
    std::vector<double> x(2000);
    for (auto& v : x) v = rng.normal(0.0, rng.uniform(0.1, 50.0));
    const auto features = eeg_band_psd(eeg_block({x}));
    for (double v : features.values) CHECK(v >= 0.0);
  }
}

TEST_CASE("eeg_band_psd error paths") {
  SECTION("too short") {
    CHECK_THROWS_AS(eeg_band_psd(eeg_block({constant(1.0, 250.0, 3.0)})), InsufficientDataError);
  }
  SECTION("gamma unrepresentable below 90 Hz sampling") {
    CHECK_THROWS_MATCHES(eeg_band_psd(eeg_block({constant(1.0, 80.0, 20.0)}, 80.0)),
                         ValidationError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("gamma band unrepresentable")));
  }
  SECTION("wrong kind") {
    CHECK_THROWS_AS(eeg_band_psd(ppg_block(constant(1.0, 128.0, 20.0))), ValidationError);
  }
}

TEST_CASE("welch segments at non-power-of-two sizes still normalize correctly") {
  // 4 s segments at 250 Hz are 1000-point transforms (Bluestein path).
  const double fs = 250.0;
  std::vector<double> freqs;
  const auto psd = welch_psd(sinusoid(10.0, fs, 20.0), fs, {}, &freqs);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < psd.size(); ++k)
    total += 0.5 * (psd[k] + psd[k + 1]) * (freqs[k + 1] - freqs[k]);
  CHECK(total == Catch::Approx(0.5).margin(0.01));
}
