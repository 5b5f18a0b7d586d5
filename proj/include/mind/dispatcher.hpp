#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mind/hierarchy.hpp"
#include "mind/keyboard.hpp"
#include "mind/pointer.hpp"
#include "mind/prediction.hpp"
#include "mind/profile.hpp"

namespace mind {

enum class Mode { Keyboard, Pointer };

inline std::string_view to_string(Mode m) { return m == Mode::Keyboard ? "keyboard" : "pointer"; }

struct KeyPress {
  std::string key;
  friend bool operator==(const KeyPress&, const KeyPress&) = default;
};

struct ModeSwitched {
  Mode mode = Mode::Keyboard;
  friend bool operator==(const ModeSwitched&, const ModeSwitched&) = default;
};

struct Cancelled {
  friend bool operator==(const Cancelled&, const Cancelled&) = default;
};

using OutputKind = std::variant<KeyPress, KeySequence, ClickEvent, ModeSwitched, Cancelled>;

struct OutputEvent {
  OutputKind kind;
  Millis timestamp = 0;
  friend bool operator==(const OutputEvent&, const OutputEvent&) = default;
};

// One line of the event log, without the newline:
//   <t>\tkey\t<KEY>
//   <t>\tseq\t<NAME>\t<K1+K2+...>
//   <t>\tclick\t<x>\t<y>\tsingle|double
//   <t>\tmode\tkeyboard|pointer
//   <t>\tcancel
inline std::string format_event(const OutputEvent& e) {
  std::string s = std::to_string(e.timestamp) + '\t';
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, KeyPress>) {
          s += "key\t" + v.key;
        } else if constexpr (std::is_same_v<T, KeySequence>) {
          s += "seq\t" + v.name + '\t';
          for (std::size_t i = 0; i < v.keys.size(); ++i) s += (i ? "+" : "") + v.keys[i];
        } else if constexpr (std::is_same_v<T, ClickEvent>) {
          s += "click\t" + std::to_string(v.x) + '\t' + std::to_string(v.y) + '\t' +
               (v.kind == ClickKind::Double ? "double" : "single");
        } else if constexpr (std::is_same_v<T, ModeSwitched>) {
          s += "mode\t" + std::string(to_string(v.mode));
        } else {
          s += "cancel";
        }
      },
      e.kind);
  return s;
}

inline void write_event_log(std::ostream& os, const std::vector<OutputEvent>& events) {
  for (const auto& e : events) os << format_event(e) << '\n';
}

// ---- mock desktop -----------------------------------------------------------

struct Icon {
  ScreenRect rect;
  std::string app;  // application focused by double-clicking the icon
  friend bool operator==(const Icon&, const Icon&) = default;
};

// Stand-in for the operating system: focus, per-application text buffers and
// logs of what reached it.
struct MockDesktop {
  ScreenRect screen{0, 0, 1920, 1080};
  std::string focused_app = "desktop";
  std::map<std::string, Icon> icons;                // icon id -> icon
  std::map<std::string, std::string> text_buffers;  // app -> text
  std::vector<ClickEvent> click_log;
  std::vector<std::string> shortcut_log;

  const std::string& text(const std::string& app) const {
    static const std::string empty;
    auto it = text_buffers.find(app);
    return it == text_buffers.end() ? empty : it->second;
  }

  // First icon (by id) under the point.
  const std::pair<const std::string, Icon>* icon_at(int x, int y) const {
    for (const auto& entry : icons) {
      if (entry.second.rect.contains(x, y)) return &entry;
    }
    return nullptr;
  }

  void validate() const {
    for (const auto& [id, icon] : icons) {
      if (!screen.contains(icon.rect) || icon.rect.w < 1 || icon.rect.h < 1) {
        throw InputError("icon '" + id + "' is not inside the screen");
      }
    }
  }

  friend bool operator==(const MockDesktop&, const MockDesktop&) = default;
};

inline void apply_to_desktop_in_place(const OutputEvent& e, MockDesktop& d) {
  if (const auto* k = std::get_if<KeyPress>(&e.kind)) {
    auto& buf = d.text_buffers[d.focused_app];
    if (k->key == "BACKSPACE") {
      if (!buf.empty()) buf.pop_back();
    } else if (auto c = text_of(k->key)) {
      buf.push_back(*c);
    }
  } else if (const auto* s = std::get_if<KeySequence>(&e.kind)) {
    d.shortcut_log.push_back(s->name);
  } else if (const auto* c = std::get_if<ClickEvent>(&e.kind)) {
    d.click_log.push_back(*c);
    if (c->kind == ClickKind::Double) {
      if (const auto* icon = d.icon_at(c->x, c->y)) d.focused_app = icon->second.app;
    }
  }
}

inline MockDesktop apply_to_desktop(const OutputEvent& e, MockDesktop d) {
  apply_to_desktop_in_place(e, d);
  return d;
}

// ---- engine -----------------------------------------------------------------

using EngineInput = std::variant<UserActionEvent, ClockTick>;

// Routes actions to whichever device is active and turns what the device
// produces into OutputEvents. Copyable value: layouts and the profile are
// shared immutable data.
class Engine {
 public:
  Engine(std::shared_ptr<const Profile> profile, ScreenRect screen, std::string app,
         Mode mode = Mode::Keyboard)
      : profile_(std::move(profile)),
        app_(std::move(app)),
        mode_(mode),
        pointer_(PointerState::fresh(screen, profile_->pointer_max_depth)) {
    layout_ = layout_ptr_for(*profile_, app_);
  }

  Mode mode() const { return mode_; }
  const NavCursor& cursor() const { return cursor_; }
  const PointerState& pointer() const { return pointer_; }
  const std::string& word_prefix() const { return prefix_; }
  const std::string& app() const { return app_; }
  const KeyboardLayout& layout() const { return *layout_; }
  const Profile& profile() const { return *profile_; }
  const std::shared_ptr<const Profile>& profile_ptr() const { return profile_; }

  std::optional<Millis> pending_deadline() const { return pointer_.deadline; }

  std::vector<OutputEvent> dispatch(const EngineInput& input) {
    std::vector<OutputEvent> out;
    if (const auto* tick = std::get_if<ClockTick>(&input)) {
      if (mode_ == Mode::Pointer) step_pointer_device(*tick, tick->now, out);
      return out;
    }
    const auto& ev = std::get<UserActionEvent>(input);
    if (mode_ == Mode::Keyboard) {
      step_keyboard(ev, out);
    } else {
      step_pointer_device(ev.action, ev.timestamp, out);
    }
    return out;
  }

  // Delivers the clock tick for a click window that closed at or before `now`.
  std::vector<OutputEvent> advance_to(Millis now) {
    if (mode_ == Mode::Pointer && pointer_.deadline && *pointer_.deadline <= now) {
      return dispatch(ClockTick{*pointer_.deadline});
    }
    return {};
  }

  // advance_to(e.timestamp), then dispatch(e).
  std::vector<OutputEvent> feed(const UserActionEvent& e) {
    auto out = advance_to(e.timestamp);
    auto more = dispatch(e);
    out.insert(out.end(), more.begin(), more.end());
    return out;
  }

  void on_focus_change(const std::string& app) {
    app_ = app;
    layout_ = layout_ptr_for(*profile_, app_);
    cursor_ = NavCursor{};
  }

  // Applies between dispatches; resets the pointer to the full screen.
  void set_max_depth(int depth) {
    const auto screen = pointer_.screen();
    pointer_ = PointerState::fresh(screen, depth);
  }

  // Swaps in a new profile, keeping the screen and the focused application.
  void set_profile(std::shared_ptr<const Profile> profile) {
    profile_ = std::move(profile);
    layout_ = layout_ptr_for(*profile_, app_);
    cursor_ = NavCursor{};
    prefix_.clear();
    set_max_depth(profile_->pointer_max_depth);
  }

 private:
  void note_key(const std::string& key) {
    if (key == "BACKSPACE") {
      if (!prefix_.empty()) prefix_.pop_back();
    } else if (key.size() == 1 && std::isalnum(static_cast<unsigned char>(key[0]))) {
      prefix_.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(key[0]))));
    } else {
      prefix_.clear();
    }
  }

  void step_keyboard(const UserActionEvent& ev, std::vector<OutputEvent>& out) {
    auto [next, effect] = apply_action(*layout_, cursor_, ev.action);
    cursor_ = std::move(next);
    if (effect.kind == NavEffect<KeyPayload>::Kind::Cancelled) {
      out.push_back({Cancelled{}, ev.timestamp});
      return;
    }
    if (!effect.is_emit()) return;
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Keystroke>) {
            note_key(p.key);
            out.push_back({KeyPress{p.key}, ev.timestamp});
          } else if constexpr (std::is_same_v<T, KeySequence>) {
            prefix_.clear();
            out.push_back({p, ev.timestamp});
          } else if constexpr (std::is_same_v<T, SwitchToPointer>) {
            mode_ = Mode::Pointer;
            pointer_ = PointerState::fresh(pointer_.screen(), pointer_.max_depth);
            out.push_back({ModeSwitched{Mode::Pointer}, ev.timestamp});
          } else {
            // Unbound slots emit nothing.
            if (auto seq = resolve_prediction(p.rank, prefix_, *profile_->dictionary)) {
              for (const auto& k : seq->keys) {
                note_key(k);
                out.push_back({KeyPress{k}, ev.timestamp});
              }
            }
          }
        },
        *effect.payload);
  }

  void step_pointer_device(const PointerInput& in, Millis now, std::vector<OutputEvent>& out) {
    auto step = step_pointer(pointer_, in, now);
    pointer_ = std::move(step.state);
    if (!step.output) return;
    if (const auto* click = std::get_if<ClickEvent>(&*step.output)) {
      prefix_.clear();
      out.push_back({*click, now});
    } else {
      mode_ = Mode::Keyboard;
      cursor_ = NavCursor{};
      out.push_back({ModeSwitched{Mode::Keyboard}, now});
    }
  }

  std::shared_ptr<const Profile> profile_;
  std::shared_ptr<const KeyboardLayout> layout_;
  std::string app_;
  Mode mode_ = Mode::Keyboard;
  NavCursor cursor_;
  PointerState pointer_;
  std::string prefix_;
};

inline std::pair<Engine, std::vector<OutputEvent>> dispatch(const EngineInput& input, Engine engine) {
  auto out = engine.dispatch(input);
  return {std::move(engine), std::move(out)};
}

inline Engine on_focus_change(Engine engine, const std::string& app) {
  engine.on_focus_change(app);
  return engine;
}

// An engine wired to a mock desktop: outputs land on the desktop and focus
// changes flow back into the engine's layout choice.
struct Workstation {
  Engine engine;
  MockDesktop desktop;

  std::vector<OutputEvent> deliver(std::vector<OutputEvent> events) {
    for (const auto& e : events) {
      apply_to_desktop_in_place(e, desktop);
      if (desktop.focused_app != engine.app()) engine.on_focus_change(desktop.focused_app);
    }
    return events;
  }

  std::vector<OutputEvent> feed(const UserActionEvent& e) { return deliver(engine.feed(e)); }
  std::vector<OutputEvent> advance_to(Millis now) { return deliver(engine.advance_to(now)); }
  std::vector<OutputEvent> dispatch(const EngineInput& in) { return deliver(engine.dispatch(in)); }
};

}  // namespace mind
