#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mind/dispatcher.hpp"

namespace mind {

// ---- wire encoding ----------------------------------------------------------

inline nlohmann::json rect_json(const ScreenRect& r) {
  return {{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}};
}

inline nlohmann::json event_to_json(const OutputEvent& e) {
  nlohmann::json j{{"t", e.timestamp}};
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, KeyPress>) {
          j["kind"] = "key";
          j["key"] = v.key;
        } else if constexpr (std::is_same_v<T, KeySequence>) {
          j["kind"] = "seq";
          j["name"] = v.name;
          j["keys"] = v.keys;
        } else if constexpr (std::is_same_v<T, ClickEvent>) {
          j["kind"] = "click";
          j["x"] = v.x;
          j["y"] = v.y;
          j["click"] = v.kind == ClickKind::Double ? "double" : "single";
        } else if constexpr (std::is_same_v<T, ModeSwitched>) {
          j["kind"] = "mode";
          j["mode"] = to_string(v.mode);
        } else {
          j["kind"] = "cancel";
        }
      },
      e.kind);
  j["line"] = format_event(e);
  return j;
}

// Everything a client needs to draw the virtual devices.
inline nlohmann::json keyboard_view(const Engine& e) {
  const auto& kb = e.layout();
  const auto& c = e.cursor();
  const auto& level = checked_level(kb, c);
  const auto words = predict(e.word_prefix(), *e.profile().dictionary, kPredictionSlots);
  nlohmann::json labels = nlohmann::json::array();
  nlohmann::json disabled = nlohmann::json::array();
  for (std::size_t i = 0; i < level.children.size(); ++i) {
    const auto& child = level.children[i];
    const auto* slot = child.payload ? std::get_if<PredictionSlot>(&*child.payload) : nullptr;
    if (slot == nullptr) {
      labels.push_back(child.label);
    } else if (slot->rank < words.size()) {
      labels.push_back(words[slot->rank]);
    } else {
      labels.push_back("");
      disabled.push_back(i);
    }
  }
  nlohmann::json crumbs = nlohmann::json::array();
  NodePath prefix;
  for (auto step : c.path) {
    prefix.push_back(step);
    crumbs.push_back(node_at(kb, prefix)->label);
  }
  return {{"labels", labels}, {"highlighted", c.selected}, {"breadcrumb", crumbs}, {"disabled", disabled}};
}

inline nlohmann::json pointer_view(const PointerState& p) {
  nlohmann::json quads = nlohmann::json::array();
  for (int q = 0; q < 4; ++q) quads.push_back(rect_json(subdivide(p.current(), q)));
  return {{"rect", rect_json(p.current())},
          {"quadrants", quads},
          {"highlighted", p.highlighted},
          {"depth", p.depth()},
          {"max_depth", p.max_depth},
          {"phase", p.pending() ? "pending_click" : "navigating"},
          {"deadline", p.deadline ? nlohmann::json(*p.deadline) : nlohmann::json(nullptr)}};
}

inline nlohmann::json error_json(std::string message, nlohmann::json payload) {
  return {{"type", "error"}, {"message", std::move(message)}, {"payload", std::move(payload)}};
}

// ---- session ----------------------------------------------------------------

// Messages produced by one step: `broadcast` goes to every client, `reply`
// only to the sender. Both are serialized JSON objects, one per frame.
struct Outbox {
  std::vector<std::string> broadcast;
  std::vector<std::string> reply;
};

// The dispatcher behind the socket. Transport-free: the server feeds it text
// frames and fans out whatever it returns. Not thread-safe; the caller
// serializes access (the gateway runs it on a single event loop).
//
// Actions are stamped with the session clock, forced non-decreasing.
// A snapshot follows every dispatched input (action or click-window tick)
// and every config change, after the output events it produced.
class Session {
 public:
  using Clock = std::function<Millis()>;
  using ProfileLoader = std::function<std::shared_ptr<const Profile>(const std::string&)>;

  Session(std::shared_ptr<const Profile> profile, MockDesktop desktop, Clock clock,
          ProfileLoader loader = default_loader())
      : ws_{Engine(std::move(profile), desktop.screen, desktop.focused_app, Mode::Keyboard),
            std::move(desktop)},
        clock_(std::move(clock)),
        loader_(std::move(loader)) {}

  static ProfileLoader default_loader() {
    return [](const std::string& path) {
      return std::make_shared<const Profile>(load_profile(std::filesystem::path(path)));
    };
  }

  std::uint64_t seq() const { return seq_; }
  Millis now() const { return now_; }
  const Engine& engine() const { return ws_.engine; }
  const MockDesktop& desktop() const { return ws_.desktop; }
  const std::vector<OutputEvent>& log() const { return log_; }
  std::optional<Millis> next_deadline() const {
    return ws_.engine.mode() == Mode::Pointer ? ws_.engine.pending_deadline() : std::nullopt;
  }

  // Current state without bumping the counter; what a new client sees first.
  nlohmann::json snapshot() const {
    const auto& e = ws_.engine;
    return {{"type", "snapshot"},
            {"seq", seq_},
            {"time", now_},
            {"mode", to_string(e.mode())},
            {"app", e.app()},
            {"keyboard", keyboard_view(e)},
            {"pointer", pointer_view(e.pointer())},
            {"current_word_prefix", e.word_prefix()},
            {"text", ws_.desktop.text(ws_.desktop.focused_app)}};
  }

  Outbox handle_client_message(std::string_view text) {
    Outbox box;
    nlohmann::json msg;
    try {
      msg = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
      box.reply.push_back(error_json("malformed JSON", std::string(text)).dump());
      return box;
    }
    const auto type = msg.is_object() && msg.contains("type") && msg["type"].is_string()
                          ? msg["type"].get<std::string>()
                          : std::string();
    try {
      if (type == "action") {
        const auto name = msg.value("action", nlohmann::json()).is_string()
                              ? msg["action"].get<std::string>()
                              : std::string();
        const auto action = parse_action(name);
        if (!action) throw InputError("unknown action '" + name + "'");
        act(*action, box);
      } else if (type == "config") {
        configure(msg, box);
      } else {
        throw InputError(type.empty() ? "message has no type" : "unknown message type '" + type + "'");
      }
    } catch (const Error& err) {
      box.reply.push_back(error_json(err.what(), msg).dump());
    }
    return box;
  }

  // Delivers the tick for a click window that has closed by `now`.
  Outbox tick(Millis now) {
    Outbox box;
    now_ = std::max(now_, now);
    auto out = ws_.engine.advance_to(now_);
    if (!out.empty()) publish(out, box);
    return box;
  }

 private:
  void act(UserAction a, Outbox& box) {
    now_ = std::max(now_, clock_());
    auto overdue = ws_.engine.advance_to(now_);
    if (!overdue.empty()) publish(overdue, box);
    publish(ws_.engine.dispatch(UserActionEvent{a, now_}), box);
  }

  void configure(const nlohmann::json& msg, Outbox& box) {
    for (const auto& [key, value] : msg.items()) {
      if (key != "type" && key != "max_depth" && key != "profile" && key != "focus") {
        throw InputError("unknown config field '" + key + "'");
      }
    }
    // Validate everything before touching the engine.
    std::optional<int> depth;
    if (msg.contains("max_depth")) {
      if (!msg["max_depth"].is_number_integer() || msg["max_depth"].get<long long>() < 1 ||
          msg["max_depth"].get<long long>() > 30) {
        throw InputError("max_depth must be an integer in [1, 30]");
      }
      depth = msg["max_depth"].get<int>();
    }
    std::shared_ptr<const Profile> profile;
    if (msg.contains("profile")) {
      if (!msg["profile"].is_string()) throw InputError("profile must be a path string");
      profile = loader_(msg["profile"].get<std::string>());
    }
    std::optional<std::string> focus;
    if (msg.contains("focus")) {
      if (!msg["focus"].is_string() || msg["focus"].get<std::string>().empty()) {
        throw InputError("focus must be a non-empty application id");
      }
      focus = msg["focus"].get<std::string>();
      layout_ptr_for(profile ? *profile : ws_.engine.profile(), *focus);
    }
    if (profile) ws_.engine.set_profile(std::move(profile));
    if (depth) ws_.engine.set_max_depth(*depth);
    if (focus) {
      ws_.desktop.focused_app = *focus;
      ws_.engine.on_focus_change(*focus);
    }
    publish({}, box);
  }

  void publish(std::vector<OutputEvent> events, Outbox& box) {
    events = ws_.deliver(std::move(events));
    for (const auto& e : events) {
      auto j = event_to_json(e);
      j["type"] = "output";
      box.broadcast.push_back(j.dump());
      log_.push_back(e);
    }
    ++seq_;
    box.broadcast.push_back(snapshot().dump());
  }

  Workstation ws_;
  Clock clock_;
  ProfileLoader loader_;
  std::uint64_t seq_ = 0;
  Millis now_ = 0;
  std::vector<OutputEvent> log_;
};

}  // namespace mind
