#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "empath/forest.hpp"
#include "empath/rng.hpp"

using namespace empath;

namespace {

FeatureVector fv(std::vector<double> values, SignalKind kind = SignalKind::EEG) {
  FeatureVector f;
  f.modality = kind;
  for (std::size_t i = 0; i < values.size(); ++i) f.names.push_back("f" + std::to_string(i + 1));
  f.values = std::move(values);
  return f;
}

/// n examples of d standard-normal features; label decided by a threshold on
/// feature 0 with the given separation between class means.
std::pair<std::vector<FeatureVector>, std::vector<BinaryLevel>> make_dataset(
    std::size_t n, std::size_t d, double separation, Rng& rng,
    SignalKind kind = SignalKind::EEG) {
  std::vector<FeatureVector> data;
  std::vector<BinaryLevel> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const bool high = i % 2 == 0;
    std::vector<double> values(d);
    for (auto& v : values) v = rng.normal();
    values[0] += high ? separation : 0.0;
    data.push_back(fv(std::move(values), kind));
    labels.push_back(high ? BinaryLevel::High : BinaryLevel::Low);
  }
  return {data, labels};
}

DecisionTree leaf_tree(int cls) {
  DecisionTree t;
  TreeNode n;
  n.leaf = cls;
  t.nodes.push_back(n);
  return t;
}

DecisionTree stump(int feature, double threshold, int low_class, int high_class) {
  DecisionTree t;
  t.nodes.resize(3);
  t.nodes[0].feature = feature;
  t.nodes[0].threshold = threshold;
  t.nodes[0].left = 1;
  t.nodes[0].right = 2;
  t.nodes[1].leaf = low_class;
  t.nodes[2].leaf = high_class;
  return t;
}

ForestModel manual_model(std::vector<DecisionTree> trees, std::size_t d = 3) {
  ForestModel m;
  m.modality = SignalKind::EEG;
  m.dimension = EmotionDim::Arousal;
  for (std::size_t i = 0; i < d; ++i) m.feature_names.push_back("f" + std::to_string(i + 1));
  m.trees = std::move(trees);
  return m;
}

}  // namespace

TEST_CASE("perfectly separable data classifies a fresh same-distribution split") {
  Rng rng(1);
  auto [train_x, train_y] = make_dataset(200, 5, 8.0, rng);
  const ForestModel model =
      train_forest(train_x, train_y, SignalKind::EEG, EmotionDim::Arousal, {}, 42);
  CHECK(model.train_accuracy == 1.0);

  auto [test_x, test_y] = make_dataset(200, 5, 8.0, rng);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test_x.size(); ++i)
    if (model.predict(test_x[i]) == test_y[i]) ++correct;
  CHECK(correct == test_x.size());
}

TEST_CASE("shuffled labels give chance-level held-out accuracy") {
  // 20 seeds, 500 examples each, labels independent of features; the mean
  // held-out accuracy over seeds must sit in the chance band.
  double accuracy_sum = 0.0;
  ForestHyperparams hp;
  hp.n_trees = 25;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(1000 + seed);
    auto [x, y] = make_dataset(500, 5, 0.0, rng);
    // random labels
    for (auto& label : y) label = rng.below(2) == 0 ? BinaryLevel::Low : BinaryLevel::High;
    std::vector<FeatureVector> train_x(x.begin(), x.begin() + 250);
    std::vector<BinaryLevel> train_y(y.begin(), y.begin() + 250);
    const ForestModel model =
        train_forest(train_x, train_y, SignalKind::EEG, EmotionDim::Arousal, hp, seed);
    std::size_t correct = 0;
    for (std::size_t i = 250; i < 500; ++i)
      if (model.predict(x[i]) == y[i]) ++correct;
    const double acc = 100.0 * static_cast<double>(correct) / 250.0;
    CHECK(acc > 30.0);
    CHECK(acc < 70.0);
    accuracy_sum += acc;
  }
  const double mean_accuracy = accuracy_sum / 20.0;
  CHECK(mean_accuracy > 40.0);
  CHECK(mean_accuracy < 60.0);
}

TEST_CASE("training is reproducible down to the file bytes") {
  Rng rng(2);
  auto [x, y] = make_dataset(120, 4, 2.0, rng, SignalKind::PPG);
  const ForestModel a = train_forest(x, y, SignalKind::PPG, EmotionDim::Valence, {}, 7);
  const ForestModel b = train_forest(x, y, SignalKind::PPG, EmotionDim::Valence, {}, 7);
  CHECK(model_to_json(a) == model_to_json(b));

  const ForestModel c = train_forest(x, y, SignalKind::PPG, EmotionDim::Valence, {}, 8);
  CHECK(model_to_json(a) != model_to_json(c));  // seed matters
}

TEST_CASE("single-tree and vote semantics") {
  SECTION("value below the root threshold lands in the low branch's leaf") {
    const ForestModel m = manual_model({stump(0, 0.5, -1, +1)});
    CHECK(m.predict(fv({0.2, 0.0, 0.0})) == BinaryLevel::Low);
    CHECK(m.predict(fv({0.7, 0.0, 0.0})) == BinaryLevel::High);
  }
  SECTION("three identical trees behave like one") {
    const ForestModel one = manual_model({stump(1, 1.0, -1, +1)});
    const ForestModel three =
        manual_model({stump(1, 1.0, -1, +1), stump(1, 1.0, -1, +1), stump(1, 1.0, -1, +1)});
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
      const auto v = fv({rng.normal(), rng.normal(), rng.normal()});
      CHECK(one.predict(v) == three.predict(v));
    }
  }
  SECTION("an even split votes high") {
    const ForestModel m = manual_model({leaf_tree(-1), leaf_tree(+1)});
    CHECK(m.predict(fv({0.0, 0.0, 0.0})) == BinaryLevel::High);
  }
}

TEST_CASE("prediction is invariant under tree reordering") {
  Rng rng(4);
  auto [x, y] = make_dataset(150, 6, 1.0, rng, SignalKind::EDA);
  ForestModel model = train_forest(x, y, SignalKind::EDA, EmotionDim::Arousal, {}, 5);
  ForestModel shuffled = model;
  rng.shuffle(shuffled.trees);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> values(6);
    for (auto& v : values) v = rng.normal();
    const auto probe = fv(values, SignalKind::EDA);
    CHECK(model.predict(probe) == shuffled.predict(probe));
  }
}

TEST_CASE("model persistence") {
  Rng rng(6);
  auto [x, y] = make_dataset(100, 5, 2.0, rng);
  const ForestModel model = train_forest(x, y, SignalKind::EEG, EmotionDim::Valence, {}, 11);
  const auto dir = std::filesystem::temp_directory_path() / "empath_forest_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "model.json";
  save_model(model, path);

  SECTION("round trip preserves predictions on 1000 random vectors") {
    const ForestModel loaded = load_model(path);
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> values(5);
      for (auto& v : values) v = rng.normal(0.0, 3.0);
      const auto probe = fv(values);
      CHECK(model.predict(probe) == loaded.predict(probe));
    }
    CHECK(model_to_json(loaded) == model_to_json(model));
  }

  SECTION("wrong-modality features are refused after reload") {
    const ForestModel loaded = load_model(path);
    auto probe = fv({1.0, 2.0, 3.0, 4.0, 5.0}, SignalKind::PPG);
    CHECK_THROWS_AS(loaded.predict(probe), ValidationError);
    auto renamed = fv({1.0, 2.0, 3.0, 4.0, 5.0});
    renamed.names[2] = "other";
    CHECK_THROWS_AS(loaded.predict(renamed), ValidationError);
  }

  SECTION("version mismatch is an explicit incompatibility error") {
    auto j = nlohmann::json::parse(model_to_json(model));
    j["version"] = 999;
    CHECK_THROWS_MATCHES(model_from_json(j.dump()), ParseError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("incompatible format version")));
  }

  SECTION("corrupt file is a parse error") {
    std::ofstream(path) << "{not json";
    CHECK_THROWS_AS(load_model(path), ParseError);
  }
}

TEST_CASE("training preconditions") {
  Rng rng(8);
  auto [x, y] = make_dataset(50, 4, 1.0, rng);

  SECTION("single-class labels") {
    std::vector<BinaryLevel> anyhow(y.size(), BinaryLevel::High);
    CHECK_THROWS_AS(train_forest(x, anyhow, SignalKind::EEG, EmotionDim::Arousal, {}, 1),
                    TrainingError);
  }
  SECTION("fewer than two examples of a class") {
    std::vector<BinaryLevel> nearly(y.size(), BinaryLevel::High);
    nearly[0] = BinaryLevel::Low;
    CHECK_THROWS_AS(train_forest(x, nearly, SignalKind::EEG, EmotionDim::Arousal, {}, 1),
                    TrainingError);
  }
  SECTION("inconsistent feature names") {
    auto bad = x;
    bad[3].names[0] = "renamed";
    CHECK_THROWS_AS(train_forest(bad, y, SignalKind::EEG, EmotionDim::Arousal, {}, 1),
                    ValidationError);
  }
  SECTION("bad hyperparams") {
    ForestHyperparams hp;
    hp.n_trees = 0;
    CHECK_THROWS_AS(train_forest(x, y, SignalKind::EEG, EmotionDim::Arousal, hp, 1), ConfigError);
  }
}
