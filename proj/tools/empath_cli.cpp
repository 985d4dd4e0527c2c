// Command-line surface for the engine: dataset synthesis, model training,
// trial replay, alignment evaluation, and the orchestration server.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error, 3 protocol error.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "empath/alignment.hpp"
#include "empath/config.hpp"
#include "empath/engine.hpp"
#include "empath/server.hpp"
#include "empath/session.hpp"
#include "empath/synth.hpp"
#include "empath/training.hpp"
#include "empath/trial_io.hpp"

namespace {

namespace fs = std::filesystem;
using namespace empath;

EngineConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return EngineConfig{};
  return load_config(path);
}

// ─── generate ────────────────────────────────────────────────────────────────

struct GenerateArgs {
  std::string out;
  std::uint64_t seed = 1;
  int trials_per_quadrant = 4;
  double duration_s = 40.0;
  std::string preset = "strong";
};

int cmd_generate(const GenerateArgs& args) {
  SynthSpec spec;
  spec.seed = args.seed;
  spec.trials_per_quadrant = args.trials_per_quadrant;
  spec.duration_s = args.duration_s;
  if (args.preset == "strong")
    spec.effects = SynthEffects::strong();
  else if (args.preset == "none")
    spec.effects = SynthEffects::none();
  else
    throw ConfigError("unknown preset '" + args.preset + "' (strong|none)");

  const auto trials = synth_dataset(spec);
  for (const TrialRecord& trial : trials) save_trial(trial, fs::path(args.out) / trial.trial_id);
  std::printf("wrote %zu trials (%d per quadrant, %.0f s each, seed %llu) to %s\n", trials.size(),
              spec.trials_per_quadrant, spec.duration_s,
              static_cast<unsigned long long>(spec.seed), args.out.c_str());
  return 0;
}

// ─── train ───────────────────────────────────────────────────────────────────

struct TrainArgs {
  std::string dataset;
  std::string out;
  std::uint64_t seed = 0;
  ForestHyperparams hyperparams;
  double holdout_frac = 0.0;
  std::string config;
};

int cmd_train(const TrainArgs& args) {
  const EngineConfig cfg = load_config_or_default(args.config);
  const auto all_trials = load_dataset(args.dataset);
  if (all_trials.empty()) throw ValidationError("dataset '" + args.dataset + "' has no trials");

  auto [train_set, holdout] = split_stratified(all_trials, args.holdout_frac);
  TrainingSummary summary;
  const ModelSet models = train_models(train_set, cfg, args.hyperparams, args.seed, &summary);
  models.save_dir(args.out);

  nlohmann::ordered_json sj;
  sj["trial_count"] = summary.trial_count;
  sj["seed"] = args.seed;
  nlohmann::ordered_json per_model = nlohmann::ordered_json::array();
  for (const auto& m : summary.models) {
    per_model.push_back({{"modality", to_string(m.modality)},
                         {"dimension", to_string(m.dimension)},
                         {"windows", m.n_windows},
                         {"train_accuracy", m.train_accuracy}});
    std::printf("%s/%s: %zu windows, train accuracy %.3f\n", to_string(m.modality),
                to_string(m.dimension), m.n_windows, m.train_accuracy);
  }
  sj["models"] = std::move(per_model);
  sj["warnings"] = summary.warnings;
  for (const auto& w : summary.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

  if (args.holdout_frac > 0.0) {
    nlohmann::ordered_json split;
    auto ids = [](const std::vector<TrialRecord>& ts) {
      std::vector<std::string> v;
      for (const auto& t : ts) v.push_back(t.trial_id);
      return v;
    };
    split["train"] = ids(train_set);
    split["holdout"] = ids(holdout);
    std::ofstream out(fs::path(args.out) / "split.json");
    if (!out) throw IoError("cannot write split.json");
    out << split.dump(2) << "\n";
    sj["holdout_count"] = holdout.size();
  }
  std::ofstream out(fs::path(args.out) / "training_summary.json");
  if (!out) throw IoError("cannot write training_summary.json");
  out << sj.dump(2) << "\n";
  std::printf("wrote %zu models to %s\n", models.count(), args.out.c_str());
  return 0;
}

// ─── replay ──────────────────────────────────────────────────────────────────

struct ReplayArgs {
  std::string trial;
  std::string models;
  std::string config;
  std::string events_out;
  std::string speed = "max";
  bool with_latency = false;
};

std::string resolve_models_dir(const std::string& flag, const EngineConfig& cfg) {
  if (!flag.empty()) return flag;
  if (!cfg.models_dir.empty()) return cfg.models_dir;
  throw ConfigError("--models is required (flag, global flag, or models_dir in the config)");
}

int cmd_replay(const ReplayArgs& args) {
  const EngineConfig cfg = load_config_or_default(args.config);
  const TrialRecord trial = load_trial(args.trial);
  const ModelSet models = ModelSet::load_dir(resolve_models_dir(args.models, cfg));

  double speed = 0.0;  // unpaced
  if (args.speed != "max") {
    try {
      speed = std::stod(args.speed);
    } catch (...) {
      throw ConfigError("--speed must be a positive number or 'max'");
    }
    if (!(speed > 0.0)) throw ConfigError("--speed must be positive");
  }

  RealtimeEngine engine(cfg, models);
  const auto events = engine.replay(trial, speed);

  if (!args.events_out.empty()) {
    std::ofstream out(args.events_out);
    if (!out) throw IoError("cannot open '" + args.events_out + "' for writing");
    for (const EmotionEvent& e : events) out << event_to_json_line(e, args.with_latency) << "\n";
  }

  std::map<Quadrant, std::size_t> histogram;
  double latency_sum = 0.0;
  for (const EmotionEvent& e : events) {
    ++histogram[e.state.quadrant];
    latency_sum += e.latency_ms;
  }
  std::printf("%zu events\n", events.size());
  for (const auto& [quadrant, count] : histogram)
    std::printf("  %s: %zu\n", to_string(quadrant), count);
  if (!events.empty())
    std::printf("mean latency %.2f ms\n", latency_sum / static_cast<double>(events.size()));
  return 0;
}

// ─── evaluate-alignment ──────────────────────────────────────────────────────

struct EvaluateArgs {
  std::string dataset;
  std::string models;
  std::string config;
  std::string split = "all";
  std::string report_out;
  bool per_window = false;
  bool batch = false;
};

int cmd_evaluate(const EvaluateArgs& args) {
  const EngineConfig cfg = load_config_or_default(args.config);
  std::vector<TrialRecord> trials = load_dataset(args.dataset);
  const std::string models_dir = resolve_models_dir(args.models, cfg);
  const ModelSet models = ModelSet::load_dir(models_dir);

  if (args.split != "all") {
    const fs::path split_path = fs::path(models_dir) / "split.json";
    std::ifstream in(split_path);
    if (!in)
      throw IoError("--split " + args.split + " needs " + split_path.string() +
                    " (train with --holdout-frac)");
    nlohmann::json sj = nlohmann::json::parse(in);
    if (!sj.contains(args.split)) throw ConfigError("--split must be all, train, or holdout");
    const auto wanted = sj.at(args.split).get<std::vector<std::string>>();
    std::vector<TrialRecord> filtered;
    for (auto& t : trials)
      if (std::find(wanted.begin(), wanted.end(), t.trial_id) != wanted.end())
        filtered.push_back(std::move(t));
    trials = std::move(filtered);
  }

  const AlignmentReport report =
      evaluate_alignment(trials, models, cfg, args.per_window, args.batch);
  std::fputs(report.to_text().c_str(), stdout);
  if (!args.report_out.empty()) {
    std::ofstream out(args.report_out);
    if (!out) throw IoError("cannot open '" + args.report_out + "' for writing");
    out << report.to_json();
  }
  return 0;
}

// ─── serve ───────────────────────────────────────────────────────────────────

struct ServeArgs {
  std::string listen = "127.0.0.1:7767";
  std::string mode = "empathetic";
  std::string responses;
  std::string config;
  std::string models;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> shuffle_topics;
};

std::atomic<SessionServer*> g_server{nullptr};

int cmd_serve(const ServeArgs& args) {
  const auto colon = args.listen.rfind(':');
  if (colon == std::string::npos)
    throw ConfigError("--listen must be host:port, got '" + args.listen + "'");
  SessionServer::Options options;
  options.host = args.listen.substr(0, colon);
  options.port = static_cast<std::uint16_t>(std::stoi(args.listen.substr(colon + 1)));
  options.default_mode = session_mode_from_string(args.mode);
  options.seed = args.seed;
  options.topic_shuffle_seed = args.shuffle_topics;

  // Validate deploy inputs up front so a broken path fails here, not later.
  if (!args.config.empty()) load_config(args.config);
  if (!args.models.empty()) {
    const ModelSet models = ModelSet::load_dir(args.models);
    std::printf("loaded %zu models from %s\n", models.count(), args.models.c_str());
  }
  ResponseDb db = args.responses.empty() ? ResponseDb::builtin() : ResponseDb::load(args.responses);

  SessionServer server(std::move(options), std::move(db));
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (SessionServer* s = g_server.exchange(nullptr)) s->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (SessionServer* s = g_server.exchange(nullptr)) s->stop();
  });
  std::printf("listening on %s (default mode: %s)\n", args.listen.c_str(), args.mode.c_str());
  server.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real-time multimodal emotion recognition engine and orchestration server"};
  app.require_subcommand(1);

  // Global flags; a subcommand's own value wins when both are given.
  std::string g_config, g_models, g_out;
  std::uint64_t g_seed = 0;
  auto* g_config_opt = app.add_option("--config", g_config, "Engine config file (global)");
  auto* g_seed_opt = app.add_option("--seed", g_seed, "Seed (global)");
  auto* g_models_opt = app.add_option("--models", g_models, "Model directory (global)");
  auto* g_out_opt = app.add_option("--out", g_out, "Output path (global)");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Synthesize a labeled trial dataset");
  auto* gen_out = generate->add_option("--out", gen.out, "Output dataset directory");
  auto* gen_seed = generate->add_option("--seed", gen.seed, "Generator seed");
  generate->add_option("--trials-per-quadrant", gen.trials_per_quadrant, "Trials per quadrant");
  generate->add_option("--duration", gen.duration_s, "Trial duration in seconds (>= 20)");
  generate->add_option("--preset", gen.preset, "Effect-size preset: strong|none");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train per-modality arousal/valence models");
  train_cmd->add_option("--dataset", train.dataset, "Trial dataset directory")->required();
  auto* train_out = train_cmd->add_option("--out", train.out, "Output model directory");
  auto* train_seed = train_cmd->add_option("--seed", train.seed, "Training seed");
  auto* train_config = train_cmd->add_option("--config", train.config, "Engine config file");
  train_cmd->add_option("--trees", train.hyperparams.n_trees, "Trees per forest");
  train_cmd->add_option("--max-depth", train.hyperparams.max_depth, "Maximum tree depth");
  train_cmd->add_option("--min-leaf", train.hyperparams.min_leaf, "Minimum samples per leaf");
  train_cmd->add_option("--features-per-split", train.hyperparams.features_per_split,
                        "Features tried per split (0 = ceil(sqrt(d)))");
  train_cmd->add_option("--holdout-frac", train.holdout_frac,
                        "Per-quadrant fraction of trials to hold out (writes split.json)");

  ReplayArgs replay;
  auto* replay_cmd = app.add_subcommand("replay", "Replay one trial through the engine");
  replay_cmd->add_option("--trial", replay.trial, "Trial directory")->required();
  auto* replay_models = replay_cmd->add_option("--models", replay.models, "Model directory");
  auto* replay_config = replay_cmd->add_option("--config", replay.config, "Engine config file");
  replay_cmd->add_option("--events-out", replay.events_out, "Write the event log (JSON lines)");
  replay_cmd->add_option("--speed", replay.speed, "Replay pacing: positive factor or 'max'");
  replay_cmd->add_flag("--with-latency", replay.with_latency,
                       "Include wall-clock latency_ms in the event log");

  EvaluateArgs eval;
  auto* eval_cmd =
      app.add_subcommand("evaluate-alignment", "Replay a dataset and report label agreement");
  eval_cmd->add_option("--dataset", eval.dataset, "Trial dataset directory")->required();
  auto* eval_models = eval_cmd->add_option("--models", eval.models, "Model directory");
  auto* eval_config = eval_cmd->add_option("--config", eval.config, "Engine config file");
  eval_cmd->add_option("--split", eval.split, "Evaluate all|train|holdout trials");
  auto* eval_out = eval_cmd->add_option("--out", eval.report_out, "Write the JSON report here");
  eval_cmd->add_flag("--per-window", eval.per_window,
                     "Count every window event instead of per-trial majorities");
  eval_cmd->add_flag("--batch", eval.batch,
                     "Use the direct-slicing batch route instead of the streaming engine");

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the orchestration session server");
  serve_cmd->add_option("--listen", serve.listen, "Listen address host:port");
  serve_cmd->add_option("--mode", serve.mode, "Default session mode: neutral|empathetic");
  serve_cmd->add_option("--responses", serve.responses, "Response database JSON file");
  auto* serve_config = serve_cmd->add_option("--config", serve.config, "Engine config file (validated)");
  auto* serve_models = serve_cmd->add_option("--models", serve.models, "Model directory (validated)");
  auto* serve_seed = serve_cmd->add_option("--seed", serve.seed, "Response rotation seed");
  std::uint64_t shuffle_seed = 0;
  auto* shuffle_opt = serve_cmd->add_option("--shuffle-topics", shuffle_seed,
                                            "Shuffle the 8-topic order with this seed");

  try {
    app.parse(argc, argv);
    if (*shuffle_opt) serve.shuffle_topics = shuffle_seed;

    // Fold global flags into whichever subcommand ran.
    const auto fill = [](CLI::Option* sub, auto& dst, CLI::Option* global, const auto& src) {
      if (sub->count() == 0 && global->count() > 0) dst = src;
    };
    fill(gen_out, gen.out, g_out_opt, g_out);
    fill(gen_seed, gen.seed, g_seed_opt, g_seed);
    fill(train_out, train.out, g_out_opt, g_out);
    fill(train_seed, train.seed, g_seed_opt, g_seed);
    fill(train_config, train.config, g_config_opt, g_config);
    fill(replay_models, replay.models, g_models_opt, g_models);
    fill(replay_config, replay.config, g_config_opt, g_config);
    fill(eval_models, eval.models, g_models_opt, g_models);
    fill(eval_config, eval.config, g_config_opt, g_config);
    fill(eval_out, eval.report_out, g_out_opt, g_out);
    fill(serve_config, serve.config, g_config_opt, g_config);
    fill(serve_models, serve.models, g_models_opt, g_models);
    fill(serve_seed, serve.seed, g_seed_opt, g_seed);

    const auto require_path = [](const std::string& value, const char* what) {
      if (value.empty())
        throw ConfigError(std::string(what) + " is required (flag or global)");
    };
    if (*generate) {
      require_path(gen.out, "--out");
      return cmd_generate(gen);
    }
    if (*train_cmd) {
      require_path(train.out, "--out");
      return cmd_train(train);
    }
    if (*replay_cmd) return cmd_replay(replay);
    if (*eval_cmd) return cmd_evaluate(eval);
    if (*serve_cmd) return cmd_serve(serve);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const ProtocolError& e) {
    std::fprintf(stderr, "protocol error: %s\n", e.what());
    return 3;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return 2;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
}
