#pragma once

/// Dialog session state machine and the response database.
///
/// Phase flow (one session = eight topics, two per quadrant):
///
///   Idle -> Prompting -> Listening -> Responding -> Prompting ...
///                                        `-> Done (after topic 8)
///
/// Prompting -> Listening on SpeechStart, Listening -> Responding on
/// SpeechEnd. Emotion events may arrive in any active phase; only those
/// received while Listening accumulate into the speech window that decides
/// the response. A message arriving in an illegal phase produces an Error
/// output and changes nothing.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "empath/errors.hpp"
#include "empath/fusion.hpp"
#include "empath/protocol.hpp"
#include "empath/rng.hpp"
#include "empath/types.hpp"

namespace empath {

/// Pre-written responses: empathetic entries keyed by (topic category,
/// detected quadrant), neutral entries and prompts keyed by topic category.
/// Every key must be present and non-empty.
class ResponseDb {
 public:
  const std::vector<std::string>& empathetic(Quadrant topic, Quadrant detected) const {
    return empathetic_.at({topic, detected});
  }
  const std::vector<std::string>& neutral(Quadrant topic) const { return neutral_.at(topic); }
  const std::vector<std::string>& prompt(Quadrant topic) const { return prompts_.at(topic); }

  void validate() const {
    for (Quadrant topic : kQuadrants) {
      for (Quadrant detected : kQuadrants) {
        const auto it = empathetic_.find({topic, detected});
        if (it == empathetic_.end() || it->second.empty())
          throw ValidationError(std::string("response db: empty empathetic entry (") +
                                to_string(topic) + ", " + to_string(detected) + ")");
      }
      const auto n = neutral_.find(topic);
      if (n == neutral_.end() || n->second.empty())
        throw ValidationError(std::string("response db: empty neutral entry ") + to_string(topic));
      const auto p = prompts_.find(topic);
      if (p == prompts_.end() || p->second.empty())
        throw ValidationError(std::string("response db: empty prompt entry ") + to_string(topic));
    }
  }

  /// File schema:
  /// {
  ///   "prompts":    { "<topic>": [ "...", ... ], ... },
  ///   "neutral":    { "<topic>": [ "...", ... ], ... },
  ///   "empathetic": { "<topic>": { "<detected>": [ "...", ... ], ... }, ... }
  /// }
  static ResponseDb from_json(const std::string& text) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("response db: invalid JSON: ") + e.what());
    }
    ResponseDb db;
    try {
      for (const auto& [key, lists] : j.at("empathetic").items()) {
        const Quadrant topic = quadrant_from_string(key);
        for (const auto& [detected_key, list] : lists.items())
          db.empathetic_[{topic, quadrant_from_string(detected_key)}] =
              list.get<std::vector<std::string>>();
      }
      for (const auto& [key, list] : j.at("neutral").items())
        db.neutral_[quadrant_from_string(key)] = list.get<std::vector<std::string>>();
      for (const auto& [key, list] : j.at("prompts").items())
        db.prompts_[quadrant_from_string(key)] = list.get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("response db: missing or mistyped field: ") + e.what());
    }
    db.validate();
    return db;
  }

  static ResponseDb load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open response db '" + path.string() + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text);
  }

  /// Small built-in sample covering every key.
  static const ResponseDb& builtin() {
    static const ResponseDb db = make_builtin();
    return db;
  }

 private:
  static ResponseDb make_builtin();

  std::map<std::pair<Quadrant, Quadrant>, std::vector<std::string>> empathetic_;
  std::map<Quadrant, std::vector<std::string>> neutral_;
  std::map<Quadrant, std::vector<std::string>> prompts_;
};

inline ResponseDb ResponseDb::make_builtin() {
  ResponseDb db;
  const auto add = [&](Quadrant topic, Quadrant detected, std::vector<std::string> lines) {
    db.empathetic_[{topic, detected}] = std::move(lines);
  };

  db.prompts_[Quadrant::HAHV] = {
      "Here is something thrilling to talk about. What is the most exciting moment you remember?",
      "Let's talk about celebrations. Tell me about a time you felt on top of the world."};
  db.prompts_[Quadrant::HALV] = {
      "This topic can be unsettling. Can you tell me about a situation that really alarmed you?",
      "Let's talk about stressful moments. What happened, and how did you react?"};
  db.prompts_[Quadrant::LAHV] = {
      "Let's talk about something pleasant and calm. What does a perfect quiet day look like for you?",
      "Tell me about a place where you feel completely at peace."};
  db.prompts_[Quadrant::LALV] = {
      "This one is a heavier subject. Can you tell me about a time you felt down?",
      "Let's talk about loss. Is there something you miss from the past?"};

  db.neutral_[Quadrant::HAHV] = {"I see. Thank you for sharing that.",
                                 "Understood. Let's continue."};
  db.neutral_[Quadrant::HALV] = {"Noted. Thank you for telling me.",
                                 "I see. We can move on when you are ready."};
  db.neutral_[Quadrant::LAHV] = {"Thank you. I have recorded your answer.",
                                 "All right. Let's proceed."};
  db.neutral_[Quadrant::LALV] = {"Thank you for your answer.", "Understood. Moving on."};

  // Topic: exciting/positive
  add(Quadrant::HAHV, Quadrant::HAHV,
      {"That energy is contagious — I can tell this really thrilled you!",
       "What a rush that must have been. I'm excited just hearing about it!"});
  add(Quadrant::HAHV, Quadrant::HALV,
      {"It sounds intense — maybe even a little overwhelming rather than fun.",
       "I sense some tension in this memory. Big moments can be stressful too."});
  add(Quadrant::HAHV, Quadrant::LAHV,
      {"You seem content remembering it — a warm kind of happiness.",
       "That sounds quietly satisfying, like a memory you enjoy revisiting."});
  add(Quadrant::HAHV, Quadrant::LALV,
      {"You seem a bit subdued about it. Not every highlight feels bright later.",
       "I hear some wistfulness there. It's okay if the excitement has faded."});

  // Topic: alarming/stressful
  add(Quadrant::HALV, Quadrant::HAHV,
      {"You tell it with surprising energy — it seems you came out of it stronger.",
       "There's real spark in how you describe it, like you beat the scare."});
  add(Quadrant::HALV, Quadrant::HALV,
      {"That sounds genuinely frightening. It makes sense that it still stirs you up.",
       "I can feel the alarm in that. Anyone would have been shaken."});
  add(Quadrant::HALV, Quadrant::LAHV,
      {"You sound calm about it now — it seems you've made peace with what happened.",
       "You describe it with real composure. That distance sounds healthy."});
  add(Quadrant::HALV, Quadrant::LALV,
      {"That memory seems to weigh on you. I'm sorry it was so hard.",
       "I hear the heaviness in that. Thank you for trusting me with it."});

  // Topic: calm/pleasant
  add(Quadrant::LAHV, Quadrant::HAHV,
      {"Even a quiet subject lights you up — that's lovely to see!",
       "You bring such liveliness to it. Clearly this place matters to you!"});
  add(Quadrant::LAHV, Quadrant::HALV,
      {"You seem a little restless even with a calm topic. Is something on your mind?",
       "I notice some unease. Even peaceful subjects can stir things up."});
  add(Quadrant::LAHV, Quadrant::LAHV,
      {"That sounds wonderfully serene. I feel calmer just hearing it.",
       "What a gentle picture. It clearly brings you quiet joy."});
  add(Quadrant::LAHV, Quadrant::LALV,
      {"There's a soft sadness in how you describe it, like you miss that calm.",
       "It sounds like you long for that peace. I hope you find it again soon."});

  // Topic: somber/loss
  add(Quadrant::LALV, Quadrant::HAHV,
      {"You speak of it with real warmth — the good memories seem to outshine the loss.",
       "It's moving how much life there is in how you remember it."});
  add(Quadrant::LALV, Quadrant::HALV,
      {"I can tell this still stings sharply. That distress is completely understandable.",
       "That sounds painful to revisit. Thank you for being open about it."});
  add(Quadrant::LALV, Quadrant::LAHV,
      {"You sound at peace with it, holding the good parts gently.",
       "There's a quiet fondness in your words. That seems like a kind way to remember."});
  add(Quadrant::LALV, Quadrant::LALV,
      {"I'm sorry — that sadness comes through clearly. I'm here with you.",
       "That is a heavy thing to carry. It's all right to feel low about it."});

  db.validate();
  return db;
}

// ─── Session state machine ───────────────────────────────────────────────────

enum class Phase { Idle, Prompting, Listening, Responding, Done };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::Idle: return "Idle";
    case Phase::Prompting: return "Prompting";
    case Phase::Listening: return "Listening";
    case Phase::Responding: return "Responding";
    case Phase::Done: return "Done";
  }
  throw ValidationError("invalid Phase");
}

struct SessionConfig {
  SessionMode mode = SessionMode::Empathetic;
  std::uint64_t seed = 0;  // response rotation start
  std::optional<std::uint64_t> topic_shuffle_seed;
};

class Session {
 public:
  static constexpr int kTopicCount = 8;  // two per quadrant

  Session(std::string id, const SessionConfig& cfg, const ResponseDb* db)
      : id_(std::move(id)), cfg_(cfg), db_(db) {
    db_->validate();
    for (int i = 0; i < kTopicCount; ++i)
      topics_[static_cast<std::size_t>(i)] = kQuadrants[static_cast<std::size_t>(i) % 4];
    if (cfg_.topic_shuffle_seed) {
      Rng rng(*cfg_.topic_shuffle_seed);
      for (std::size_t i = topics_.size(); i > 1; --i)
        std::swap(topics_[i - 1], topics_[static_cast<std::size_t>(rng.below(i))]);
    }
  }

  const std::string& id() const { return id_; }
  SessionMode mode() const { return cfg_.mode; }
  Phase phase() const { return phase_; }
  int topic_index() const { return topic_index_; }
  Quadrant topic_category() const { return topics_[static_cast<std::size_t>(topic_index_)]; }
  const std::vector<EmotionState>& speech_emotions() const { return speech_emotions_; }

  /// Idle -> Prompting; emits the first StartTopic and Prompt.
  std::vector<ProtocolMessage> start(double t) {
    if (phase_ != Phase::Idle) return protocol_error(t, "session already started");
    return advance_topic(t);
  }

  /// Moves to the next of the eight topics, or ends the session. Legal from
  /// Idle (first topic) and Responding (subsequent ones).
  std::vector<ProtocolMessage> advance_topic(double t) {
    if (phase_ != Phase::Idle && phase_ != Phase::Responding)
      return protocol_error(t, std::string("cannot advance topic in phase ") + to_string(phase_));
    if (phase_ == Phase::Responding && topic_index_ + 1 >= kTopicCount) {
      phase_ = Phase::Done;
      return {EndSessionMsg{id_, t}};
    }
    if (phase_ == Phase::Responding) ++topic_index_;
    phase_ = Phase::Prompting;
    const Quadrant topic = topic_category();
    const auto& prompts = db_->prompt(topic);
    const std::string& text = prompts[static_cast<std::size_t>(prompt_uses_[topic]++) %
                                      prompts.size()];
    return {StartTopicMsg{id_, topic_index_, topic, t}, PromptMsg{id_, text, t}};
  }

  /// Handles one client message, returning the server's replies. Illegal
  /// messages produce a single Error reply and leave the state untouched.
  std::vector<ProtocolMessage> on_message(const ProtocolMessage& msg) {
    const double t = time_of(msg);
    if (session_of(msg) != id_)
      return protocol_error(t, "message for unknown session '" + session_of(msg) + "'");
    if (t < last_t_ - 1e-9)
      return protocol_error(t, "stream time went backwards (" + std::to_string(t) + " < " +
                                   std::to_string(last_t_) + ")");
    if (phase_ == Phase::Done) return protocol_error(t, "session is finished");

    std::vector<ProtocolMessage> out;
    if (std::holds_alternative<HelloMsg>(msg)) {
      return protocol_error(t, "session already started");
    } else if (const auto* ev = std::get_if<EmotionEventMsg>(&msg)) {
      out = on_emotion_event(*ev);
    } else if (std::holds_alternative<SpeechStartMsg>(msg)) {
      if (phase_ != Phase::Prompting)
        return protocol_error(t, std::string("SpeechStart illegal in phase ") + to_string(phase_));
      phase_ = Phase::Listening;
      speech_emotions_.clear();
    } else if (std::holds_alternative<SpeechEndMsg>(msg)) {
      if (phase_ != Phase::Listening)
        return protocol_error(t, std::string("SpeechEnd illegal in phase ") + to_string(phase_));
      out = on_speech_end(t);
    } else {
      return protocol_error(t, "unexpected server-side message from client");
    }
    last_t_ = std::max(last_t_, t);
    return out;
  }

 private:
  std::vector<ProtocolMessage> on_emotion_event(const EmotionEventMsg& ev) {
    last_state_ = ev.state;
    if (phase_ == Phase::Listening) speech_emotions_.push_back(ev.state);
    if (cfg_.mode == SessionMode::Empathetic)
      return {ExpressionCommandMsg{id_, ev.state.expression, ev.t}};
    return {};  // neutral mode shows no expression
  }

  std::vector<ProtocolMessage> on_speech_end(double t) {
    phase_ = Phase::Responding;
    const Quadrant topic = topic_category();
    ResponseUtteranceMsg response{id_, "", std::nullopt, t};
    if (cfg_.mode == SessionMode::Empathetic) {
      Quadrant detected = Quadrant::LAHV;  // calm-positive default
      if (!speech_emotions_.empty())
        detected = majority_emotion(speech_emotions_);
      else if (last_state_)
        detected = last_state_->quadrant;
      response.quadrant_used = detected;
      response.text = pick(db_->empathetic(topic, detected),
                           static_cast<std::uint64_t>(topic) * 4 +
                               static_cast<std::uint64_t>(detected));
    } else {
      response.text = pick(db_->neutral(topic), 16 + static_cast<std::uint64_t>(topic));
    }
    speech_emotions_.clear();
    std::vector<ProtocolMessage> out{response};
    for (auto& m : advance_topic(t)) out.push_back(std::move(m));
    return out;
  }

  /// Round-robin within a response list, with a seeded starting offset so
  /// different sessions vary but replays with one seed do not.
  const std::string& pick(const std::vector<std::string>& list, std::uint64_t key) {
    const std::uint64_t start = Rng::derive(cfg_.seed, key) % list.size();
    return list[(start + static_cast<std::uint64_t>(response_uses_[key]++)) % list.size()];
  }

  std::vector<ProtocolMessage> protocol_error(double t, const std::string& message) {
    return {ErrorMsg{id_, "protocol", message, t}};
  }

  std::string id_;
  SessionConfig cfg_;
  const ResponseDb* db_;
  std::array<Quadrant, kTopicCount> topics_{};
  Phase phase_ = Phase::Idle;
  int topic_index_ = 0;
  std::vector<EmotionState> speech_emotions_;
  std::optional<EmotionState> last_state_;
  std::map<Quadrant, int> prompt_uses_;
  std::map<std::uint64_t, int> response_uses_;
  double last_t_ = 0.0;
};

}  // namespace empath
