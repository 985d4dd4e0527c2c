#include <catch2/catch_amalgamated.hpp>

#include "empath/fusion.hpp"
#include "empath/labels.hpp"

using namespace empath;

TEST_CASE("arousal binarization over all five ratings") {
  CHECK(binarize_arousal(1) == BinaryLevel::Low);
  CHECK(binarize_arousal(2) == BinaryLevel::Low);
  CHECK(binarize_arousal(3) == BinaryLevel::Low);
  CHECK(binarize_arousal(4) == BinaryLevel::High);
  CHECK(binarize_arousal(5) == BinaryLevel::High);
  CHECK_THROWS_AS(binarize_arousal(0), ValidationError);
  CHECK_THROWS_AS(binarize_arousal(6), ValidationError);
}

TEST_CASE("valence binarization in both polarities") {
  SECTION("inverted (default): ratings above 3 map low") {
    CHECK(binarize_valence(1, ValencePolarity::Inverted) == BinaryLevel::High);
    CHECK(binarize_valence(2, ValencePolarity::Inverted) == BinaryLevel::High);
    CHECK(binarize_valence(3, ValencePolarity::Inverted) == BinaryLevel::High);
    CHECK(binarize_valence(4, ValencePolarity::Inverted) == BinaryLevel::Low);
    CHECK(binarize_valence(5, ValencePolarity::Inverted) == BinaryLevel::Low);
  }
  SECTION("standard: ratings above 3 map high") {
    CHECK(binarize_valence(1, ValencePolarity::Standard) == BinaryLevel::Low);
    CHECK(binarize_valence(2, ValencePolarity::Standard) == BinaryLevel::Low);
    CHECK(binarize_valence(3, ValencePolarity::Standard) == BinaryLevel::Low);
    CHECK(binarize_valence(4, ValencePolarity::Standard) == BinaryLevel::High);
    CHECK(binarize_valence(5, ValencePolarity::Standard) == BinaryLevel::High);
  }
  SECTION("monotonicity across 1..5") {
    for (int r = 1; r < 5; ++r) {
      CHECK(to_int(binarize_arousal(r + 1)) >= to_int(binarize_arousal(r)));
      CHECK(to_int(binarize_valence(r + 1, ValencePolarity::Inverted)) <=
            to_int(binarize_valence(r, ValencePolarity::Inverted)));
    }
  }
  CHECK_THROWS_AS(binarize_valence(6, ValencePolarity::Inverted), ValidationError);
}

namespace {

ModalityPrediction pred(SignalKind kind, int arousal, int valence) {
  return {kind, level_from_int(arousal), level_from_int(valence)};
}

std::vector<ModalityPrediction> preds(int ea, int ev, int da, int dv, int pa, int pv) {
  return {pred(SignalKind::EEG, ea, ev), pred(SignalKind::EDA, da, dv),
          pred(SignalKind::PPG, pa, pv)};
}

}  // namespace

TEST_CASE("fusion matches the direct weighted-sum oracle on all sign combinations") {
  const FusionWeights wa = default_arousal_weights();
  const FusionWeights wv = default_valence_weights();
  const int signs[2] = {-1, 1};
  for (int ea : signs)
    for (int da : signs)
      for (int pa : signs)
        for (int ev : signs)
          for (int dv : signs)
            for (int pv : signs) {
              const auto state = fuse(preds(ea, ev, da, dv, pa, pv), wa, wv, 0.0);
              // oracle: the weighted sums evaluated from first principles
              const double oa = 1.0 * ea + 2.0 * da + 2.0 * pa;
              const double ov = 1.0 * ev + 1.0 * dv + 1.0 * pv;
              CHECK(oa != 0.0);
              CHECK(ov != 0.0);
              CHECK(state.p_arousal == oa);
              CHECK(state.p_valence == ov);
              CHECK(to_int(state.arousal) == (oa < 0 ? -1 : 1));
              CHECK(to_int(state.valence) == (ov < 0 ? -1 : 1));
            }
}

TEST_CASE("spot checks of the fusion arithmetic") {
  const FusionWeights wa = default_arousal_weights();
  const FusionWeights wv = default_valence_weights();

  auto s1 = fuse(preds(-1, 1, 1, 1, 1, -1), wa, wv, 0.0);
  CHECK(s1.p_arousal == 3.0);   // -1 + 2 + 2
  CHECK(s1.arousal == BinaryLevel::High);
  CHECK(s1.p_valence == 1.0);   // 1 + 1 - 1
  CHECK(s1.valence == BinaryLevel::High);

  auto s2 = fuse(preds(1, -1, -1, -1, -1, 1), wa, wv, 0.0);
  CHECK(s2.p_arousal == -3.0);  // 1 - 2 - 2
  CHECK(s2.arousal == BinaryLevel::Low);
  CHECK(s2.p_valence == -1.0);
  CHECK(s2.valence == BinaryLevel::Low);
}

TEST_CASE("scaling a dimension's weights never changes the decision") {
  const int signs[2] = {-1, 1};
  for (double k : {0.25, 3.0, 17.5}) {
    FusionWeights wa{1.0 * k, 2.0 * k, 2.0 * k};
    FusionWeights wv{k, k, k};
    for (int ea : signs)
      for (int da : signs)
        for (int pa : signs) {
          const auto base =
              fuse(preds(ea, 1, da, 1, pa, 1), default_arousal_weights(), default_valence_weights(), 0.0);
          const auto scaled = fuse(preds(ea, 1, da, 1, pa, 1), wa, wv, 0.0);
          CHECK(base.arousal == scaled.arousal);
          CHECK(base.valence == scaled.valence);
        }
  }
}

TEST_CASE("missing modalities drop their terms; zero sums hold the previous level") {
  const FusionWeights wa = default_arousal_weights();
  const FusionWeights wv = default_valence_weights();

  SECTION("EEG missing: arousal sum can't reach zero, valence can") {
    const std::vector<ModalityPrediction> two = {pred(SignalKind::EDA, 1, 1),
                                                 pred(SignalKind::PPG, -1, -1)};
    const auto fresh = fuse(two, wa, wv, 0.0);
    CHECK(fresh.p_valence == 0.0);
    CHECK(fresh.valence == BinaryLevel::Low);  // session-start default is calm

    EmotionState held;
    held.valence = BinaryLevel::High;
    const auto with_prev = fuse(two, wa, wv, 5.0, held);
    CHECK(with_prev.valence == BinaryLevel::High);  // held from previous window
  }

  SECTION("no predictions at all") {
    const auto state = fuse({}, wa, wv, 0.0);
    CHECK(state.arousal == BinaryLevel::Low);
    CHECK(state.valence == BinaryLevel::Low);
    CHECK(state.quadrant == Quadrant::LALV);
  }

  SECTION("duplicate modality rejected") {
    CHECK_THROWS_AS(
        fuse({pred(SignalKind::EEG, 1, 1), pred(SignalKind::EEG, -1, -1)}, wa, wv, 0.0),
        ValidationError);
  }

  SECTION("nonpositive weight rejected") {
    CHECK_THROWS_AS(fuse(preds(1, 1, 1, 1, 1, 1), FusionWeights{0.0, 2.0, 2.0}, wv, 0.0),
                    ConfigError);
  }
}

TEST_CASE("quadrant and expression mapping is total and injective") {
  CHECK(quadrant_expression(BinaryLevel::High, BinaryLevel::High) ==
        std::pair{Quadrant::HAHV, Expression::StrongHappiness});
  CHECK(quadrant_expression(BinaryLevel::High, BinaryLevel::Low) ==
        std::pair{Quadrant::HALV, Expression::AngerScaredness});
  CHECK(quadrant_expression(BinaryLevel::Low, BinaryLevel::High) ==
        std::pair{Quadrant::LAHV, Expression::SlightHappiness});
  CHECK(quadrant_expression(BinaryLevel::Low, BinaryLevel::Low) ==
        std::pair{Quadrant::LALV, Expression::Sadness});
}

namespace {

EmotionState state_of(Quadrant q, double t) {
  EmotionState s;
  s.quadrant = q;
  s.timestamp = t;
  return s;
}

}  // namespace

TEST_CASE("majority emotion") {
  SECTION("strict majority wins") {
    CHECK(majority_emotion({state_of(Quadrant::HAHV, 0), state_of(Quadrant::HAHV, 5),
                            state_of(Quadrant::LALV, 10)}) == Quadrant::HAHV);
  }
  SECTION("ties go to the most recent among the tied") {
    CHECK(majority_emotion({state_of(Quadrant::HAHV, 0), state_of(Quadrant::LALV, 5)}) ==
          Quadrant::LALV);
    CHECK(majority_emotion({state_of(Quadrant::LALV, 0), state_of(Quadrant::HAHV, 5)}) ==
          Quadrant::HAHV);
    // a tied pair loses to whichever tied quadrant appeared last
    CHECK(majority_emotion({state_of(Quadrant::HAHV, 0), state_of(Quadrant::LALV, 5),
                            state_of(Quadrant::HAHV, 10), state_of(Quadrant::LALV, 15)}) ==
          Quadrant::LALV);
  }
  SECTION("singleton") {
    CHECK(majority_emotion({state_of(Quadrant::LAHV, 0)}) == Quadrant::LAHV);
  }
  SECTION("empty list is an error") {
    CHECK_THROWS_AS(majority_emotion({}), ValidationError);
  }
}
