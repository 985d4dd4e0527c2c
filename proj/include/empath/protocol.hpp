#pragma once

/// Orchestrator wire protocol: UTF-8 JSON objects, one per line, over a
/// byte-stream socket. Every message carries a "type" tag, the session id,
/// and a stream time "t" in seconds that must never decrease within a
/// session.
///
/// Client -> server: Hello, SpeechStart, SpeechEnd, EmotionEvent.
/// Server -> client: StartTopic, Prompt, ExpressionCommand,
///                   ResponseUtterance, EndSession, Error.

#include <optional>
#include <string>
#include <variant>

#include "json.hpp"

#include "empath/errors.hpp"
#include "empath/fusion.hpp"
#include "empath/types.hpp"

namespace empath {

struct HelloMsg {
  std::string session;
  std::optional<SessionMode> mode;  // server default applies when absent
  double t = 0.0;
};

struct StartTopicMsg {
  std::string session;
  int index = 0;  // 0..7
  Quadrant category = Quadrant::HAHV;
  double t = 0.0;
};

struct PromptMsg {
  std::string session;
  std::string text;
  double t = 0.0;
};

struct SpeechStartMsg {
  std::string session;
  double t = 0.0;
};

struct SpeechEndMsg {
  std::string session;
  double t = 0.0;
};

struct EmotionEventMsg {
  std::string session;
  EmotionState state;
  double t = 0.0;
};

struct ExpressionCommandMsg {
  std::string session;
  Expression expression = Expression::Sadness;
  double t = 0.0;
};

struct ResponseUtteranceMsg {
  std::string session;
  std::string text;
  std::optional<Quadrant> quadrant_used;  // absent in neutral mode
  double t = 0.0;
};

struct EndSessionMsg {
  std::string session;
  double t = 0.0;
};

struct ErrorMsg {
  std::string session;
  std::string code;  // "protocol" | "parse"
  std::string message;
  double t = 0.0;
};

using ProtocolMessage =
    std::variant<HelloMsg, StartTopicMsg, PromptMsg, SpeechStartMsg, SpeechEndMsg, EmotionEventMsg,
                 ExpressionCommandMsg, ResponseUtteranceMsg, EndSessionMsg, ErrorMsg>;

inline const std::string& session_of(const ProtocolMessage& msg) {
  return std::visit([](const auto& m) -> const std::string& { return m.session; }, msg);
}

inline double time_of(const ProtocolMessage& msg) {
  return std::visit([](const auto& m) { return m.t; }, msg);
}

// ─── Serialization ───────────────────────────────────────────────────────────

namespace detail {

inline nlohmann::ordered_json state_to_json(const EmotionState& s) {
  return {{"arousal", to_int(s.arousal)},
          {"valence", to_int(s.valence)},
          {"quadrant", to_string(s.quadrant)},
          {"expression", to_string(s.expression)},
          {"p_arousal", s.p_arousal},
          {"p_valence", s.p_valence}};
}

inline EmotionState state_from_json(const nlohmann::json& j) {
  EmotionState s;
  s.arousal = level_from_int(j.at("arousal").get<int>());
  s.valence = level_from_int(j.at("valence").get<int>());
  s.quadrant = quadrant_from_string(j.at("quadrant").get<std::string>());
  s.expression = expression_from_string(j.at("expression").get<std::string>());
  s.p_arousal = j.value("p_arousal", 0.0);
  s.p_valence = j.value("p_valence", 0.0);
  return s;
}

}  // namespace detail

/// One message as a single JSON line (no trailing newline).
inline std::string serialize_message(const ProtocolMessage& msg) {
  nlohmann::ordered_json j;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, HelloMsg>) {
          j["type"] = "Hello";
          if (m.mode) j["mode"] = to_string(*m.mode);
        } else if constexpr (std::is_same_v<T, StartTopicMsg>) {
          j["type"] = "StartTopic";
          j["index"] = m.index;
          j["category"] = to_string(m.category);
        } else if constexpr (std::is_same_v<T, PromptMsg>) {
          j["type"] = "Prompt";
          j["text"] = m.text;
        } else if constexpr (std::is_same_v<T, SpeechStartMsg>) {
          j["type"] = "SpeechStart";
        } else if constexpr (std::is_same_v<T, SpeechEndMsg>) {
          j["type"] = "SpeechEnd";
        } else if constexpr (std::is_same_v<T, EmotionEventMsg>) {
          j["type"] = "EmotionEvent";
          j["state"] = detail::state_to_json(m.state);
        } else if constexpr (std::is_same_v<T, ExpressionCommandMsg>) {
          j["type"] = "ExpressionCommand";
          j["expression"] = to_string(m.expression);
        } else if constexpr (std::is_same_v<T, ResponseUtteranceMsg>) {
          j["type"] = "ResponseUtterance";
          j["text"] = m.text;
          if (m.quadrant_used) j["quadrant_used"] = to_string(*m.quadrant_used);
        } else if constexpr (std::is_same_v<T, EndSessionMsg>) {
          j["type"] = "EndSession";
        } else if constexpr (std::is_same_v<T, ErrorMsg>) {
          j["type"] = "Error";
          j["code"] = m.code;
          j["message"] = m.message;
        }
        j["session"] = m.session;
        j["t"] = m.t;
      },
      msg);
  return j.dump();
}

/// Parses one line. Unknown types and missing fields raise ParseError.
inline ProtocolMessage parse_message(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("message: invalid JSON: ") + e.what());
  }
  try {
    const std::string type = j.at("type").get<std::string>();
    const std::string session = j.at("session").get<std::string>();
    const double t = j.at("t").get<double>();
    if (type == "Hello") {
      HelloMsg m{session, std::nullopt, t};
      if (j.contains("mode")) m.mode = session_mode_from_string(j.at("mode").get<std::string>());
      return m;
    }
    if (type == "StartTopic")
      return StartTopicMsg{session, j.at("index").get<int>(),
                           quadrant_from_string(j.at("category").get<std::string>()), t};
    if (type == "Prompt") return PromptMsg{session, j.at("text").get<std::string>(), t};
    if (type == "SpeechStart") return SpeechStartMsg{session, t};
    if (type == "SpeechEnd") return SpeechEndMsg{session, t};
    if (type == "EmotionEvent") {
      EmotionEventMsg m{session, detail::state_from_json(j.at("state")), t};
      m.state.timestamp = t;
      return m;
    }
    if (type == "ExpressionCommand")
      return ExpressionCommandMsg{session,
                                  expression_from_string(j.at("expression").get<std::string>()), t};
    if (type == "ResponseUtterance") {
      ResponseUtteranceMsg m{session, j.at("text").get<std::string>(), std::nullopt, t};
      if (j.contains("quadrant_used"))
        m.quadrant_used = quadrant_from_string(j.at("quadrant_used").get<std::string>());
      return m;
    }
    if (type == "EndSession") return EndSessionMsg{session, t};
    if (type == "Error")
      return ErrorMsg{session, j.at("code").get<std::string>(),
                      j.at("message").get<std::string>(), t};
    throw ParseError("message: unknown type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("message: missing or mistyped field: ") + e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    // domain values out of range (e.g. a binary level of 2) are wire faults
    throw ParseError(std::string("message: ") + e.what());
  }
}

}  // namespace empath
