#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "mind/dispatcher.hpp"
#include "mind/error.hpp"
#include "mind/profile.hpp"

namespace mind {

// ---- task scripts -----------------------------------------------------------

struct ClickPoint {
  int x = 0;
  int y = 0;
  bool double_click = false;
  friend bool operator==(const ClickPoint&, const ClickPoint&) = default;
};

// Double-click the icon; done once the click lands inside its rect.
struct FocusApp {
  std::string icon;
  friend bool operator==(const FocusApp&, const FocusApp&) = default;
};

// Done when the buffer of the app focused at activation reads base + text.
struct TypeText {
  std::string text;
  friend bool operator==(const TypeText&, const TypeText&) = default;
};

struct InvokeShortcut {
  std::string name;
  friend bool operator==(const InvokeShortcut&, const InvokeShortcut&) = default;
};

using Goal = std::variant<ClickPoint, FocusApp, TypeText, InvokeShortcut>;

inline std::string escape_text(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
    } else if (c == '\t') {
      out += "\\t";
    } else if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else {
      out += c;
    }
  }
  return out;
}

inline std::string describe(const Goal& g) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ClickPoint>) {
          return "click(" + std::to_string(v.x) + "," + std::to_string(v.y) + "," +
                 (v.double_click ? "double" : "single") + ")";
        } else if constexpr (std::is_same_v<T, FocusApp>) {
          return "focus(" + v.icon + ")";
        } else if constexpr (std::is_same_v<T, TypeText>) {
          return "type(\"" + escape_text(v.text) + "\")";
        } else {
          return "shortcut(" + v.name + ")";
        }
      },
      g);
}

struct TaskScript {
  std::string name;
  std::string description;
  ScreenRect screen{0, 0, 1920, 1080};
  std::string initial_app = "desktop";
  Mode initial_mode = Mode::Keyboard;
  std::map<std::string, Icon> icons;
  std::vector<Goal> goals;

  void validate() const {
    if (screen.w < 1 || screen.h < 1) throw InputError("task '" + name + "': empty screen");
    for (const auto& [id, icon] : icons) {
      if (!screen.contains(icon.rect) || icon.rect.w < 1 || icon.rect.h < 1) {
        throw InputError("task '" + name + "': icon '" + id + "' is not inside the screen");
      }
    }
    for (std::size_t i = 0; i < goals.size(); ++i) {
      const auto where = "task '" + name + "' goal " + std::to_string(i) + " " + describe(goals[i]);
      if (const auto* c = std::get_if<ClickPoint>(&goals[i])) {
        if (!screen.contains(c->x, c->y)) throw InputError(where + ": point outside screen");
      } else if (const auto* f = std::get_if<FocusApp>(&goals[i])) {
        if (!icons.contains(f->icon)) throw InputError(where + ": unknown icon");
      } else if (const auto* s = std::get_if<InvokeShortcut>(&goals[i])) {
        if (s->name.empty()) throw InputError(where + ": empty shortcut name");
      }
    }
  }

  friend bool operator==(const TaskScript&, const TaskScript&) = default;
};

namespace detail {

inline nlohmann::json rect_to_json(const ScreenRect& r) {
  return {{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}};
}

inline ScreenRect rect_from_json(const nlohmann::json& j) {
  return {j.at("x").get<int>(), j.at("y").get<int>(), j.at("w").get<int>(), j.at("h").get<int>()};
}

inline nlohmann::json goal_to_json(const Goal& g) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ClickPoint>) {
          return {{"type", "click"}, {"x", v.x}, {"y", v.y}, {"double", v.double_click}};
        } else if constexpr (std::is_same_v<T, FocusApp>) {
          return {{"type", "focus"}, {"icon", v.icon}};
        } else if constexpr (std::is_same_v<T, TypeText>) {
          return {{"type", "type"}, {"text", v.text}};
        } else {
          return {{"type", "shortcut"}, {"name", v.name}};
        }
      },
      g);
}

inline Goal goal_from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "click") {
    return ClickPoint{j.at("x").get<int>(), j.at("y").get<int>(), j.value("double", false)};
  }
  if (type == "focus") return FocusApp{j.at("icon").get<std::string>()};
  if (type == "type") return TypeText{j.at("text").get<std::string>()};
  if (type == "shortcut") return InvokeShortcut{j.at("name").get<std::string>()};
  throw ParseError("unknown goal type '" + type + "'");
}

}  // namespace detail

inline nlohmann::json task_to_json(const TaskScript& t) {
  nlohmann::json icons = nlohmann::json::object();
  for (const auto& [id, icon] : t.icons) {
    icons[id] = {{"rect", detail::rect_to_json(icon.rect)}, {"app", icon.app}};
  }
  nlohmann::json goals = nlohmann::json::array();
  for (const auto& g : t.goals) goals.push_back(detail::goal_to_json(g));
  return {{"name", t.name},
          {"description", t.description},
          {"screen", detail::rect_to_json(t.screen)},
          {"initial_app", t.initial_app},
          {"initial_mode", std::string(to_string(t.initial_mode))},
          {"icons", icons},
          {"goals", goals}};
}

inline TaskScript task_from_json(const nlohmann::json& j) {
  TaskScript t;
  try {
    t.name = j.at("name").get<std::string>();
    t.description = j.value("description", "");
    if (j.contains("screen")) t.screen = detail::rect_from_json(j.at("screen"));
    t.initial_app = j.value("initial_app", "desktop");
    const auto mode = j.value("initial_mode", "keyboard");
    if (mode == "keyboard") {
      t.initial_mode = Mode::Keyboard;
    } else if (mode == "pointer") {
      t.initial_mode = Mode::Pointer;
    } else {
      throw ParseError("unknown initial_mode '" + mode + "'");
    }
    const auto icons = j.value("icons", nlohmann::json::object());
    for (const auto& [id, icon] : icons.items()) {
      t.icons[id] = Icon{detail::rect_from_json(icon.at("rect")), icon.at("app").get<std::string>()};
    }
    for (const auto& g : j.at("goals")) t.goals.push_back(detail::goal_from_json(g));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("task script: ") + e.what());
  }
  t.validate();
  return t;
}

inline TaskScript load_task(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    return task_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline MockDesktop desktop_for(const TaskScript& t) {
  MockDesktop d;
  d.screen = t.screen;
  d.focused_app = t.initial_app;
  d.icons = t.icons;
  return d;
}

// ---- goal tracking ----------------------------------------------------------

// Position in a script plus what the active goal was anchored to when it
// became active.
struct GoalTracker {
  std::size_t index = 0;
  std::string app;   // app that must be focused for the active text/shortcut goal
  std::string base;  // text of `app` when the active goal became active

  bool done(const TaskScript& s) const { return index >= s.goals.size(); }
  const Goal* current(const TaskScript& s) const { return done(s) ? nullptr : &s.goals[index]; }

  // Anchors the active goal to the desktop; empty text goals complete at once.
  void activate(const TaskScript& s, const MockDesktop& d) {
    while (!done(s)) {
      app = d.focused_app;
      base = d.text(app);
      const auto* t = std::get_if<TypeText>(&s.goals[index]);
      if (t == nullptr || !t->text.empty()) return;
      ++index;
    }
    app.clear();
    base.clear();
  }

  // Advances past the active goal if `e` (already applied to `d`) completes it.
  bool observe(const TaskScript& s, const OutputEvent& e, const MockDesktop& d, int max_depth) {
    const auto* g = current(s);
    if (g == nullptr) return false;
    bool hit = false;
    if (const auto* t = std::get_if<TypeText>(g)) {
      hit = std::holds_alternative<KeyPress>(e.kind) && d.focused_app == app &&
            d.text(app).size() == base.size() + t->text.size() &&
            d.text(app).compare(0, base.size(), base) == 0 &&
            d.text(app).compare(base.size(), std::string::npos, t->text) == 0;
    } else if (const auto* k = std::get_if<InvokeShortcut>(g)) {
      const auto* seq = std::get_if<KeySequence>(&e.kind);
      hit = seq != nullptr && seq->name == k->name && d.focused_app == app;
    } else if (const auto* c = std::get_if<ClickPoint>(g)) {
      const auto* click = std::get_if<ClickEvent>(&e.kind);
      hit = click != nullptr && (click->kind == ClickKind::Double) == c->double_click &&
            quadrant_path(d.screen, click->x, click->y, max_depth) ==
                quadrant_path(d.screen, c->x, c->y, max_depth);
    } else {
      const auto* click = std::get_if<ClickEvent>(&e.kind);
      hit = click != nullptr && click->kind == ClickKind::Double &&
            d.icons.at(std::get<FocusApp>(*g).icon).rect.contains(click->x, click->y);
    }
    if (!hit) return false;
    ++index;
    activate(s, d);
    return true;
  }

  friend bool operator==(const GoalTracker&, const GoalTracker&) = default;
};

// ---- world ------------------------------------------------------------------

// Everything that evolves while a script runs.
struct World {
  Engine engine;
  MockDesktop desktop;
  GoalTracker tracker;
  Millis now = 0;
};

inline World initial_world(const TaskScript& s, std::shared_ptr<const Profile> profile) {
  s.validate();
  World w{Engine(std::move(profile), s.screen, s.initial_app, s.initial_mode), desktop_for(s), {}, 0};
  w.tracker.activate(s, w.desktop);
  return w;
}

// Identity of a world for search purposes: everything except the clock and
// the output logs.
inline std::string state_key(const World& w) {
  std::string k;
  k.reserve(128);
  auto put = [&](std::string_view s) {
    k += s;
    k += '\x1f';
  };
  auto num = [&](long long v) { put(std::to_string(v)); };
  num(static_cast<long long>(w.tracker.index));
  put(w.tracker.app);
  put(w.tracker.base);
  const auto& e = w.engine;
  num(e.mode() == Mode::Keyboard ? 0 : 1);
  for (auto i : e.cursor().path) num(static_cast<long long>(i));
  k += '|';
  num(static_cast<long long>(e.cursor().selected));
  put(e.app());
  put(e.word_prefix());
  for (int q : e.pointer().path) k += static_cast<char>('0' + q);
  k += '|';
  num(e.pointer().highlighted);
  num(e.pointer().pending() ? 1 : 0);
  num(e.pointer().max_depth);
  put(w.desktop.focused_app);
  for (const auto& [app, text] : w.desktop.text_buffers) {
    if (text.empty()) continue;
    put(app);
    put(text);
  }
  return k;
}

// Application a text or shortcut goal needs focused, if the active goal is one.
inline std::optional<std::string> required_app(const World& w, const TaskScript& s) {
  const auto* g = w.tracker.current(s);
  if (g == nullptr) return std::nullopt;
  if (std::holds_alternative<TypeText>(*g) || std::holds_alternative<InvokeShortcut>(*g)) {
    return w.tracker.app;
  }
  return std::nullopt;
}

namespace detail {

inline bool is_prefix_of(std::string_view p, std::string_view s) {
  return p.size() <= s.size() && s.compare(0, p.size(), p) == 0;
}

// Whether an output that did not complete the active goal is still one an
// optimal plan may produce: mode changes and cancels, typing that keeps the
// target buffer on track, deleting, and a double click that restores the
// focus a text or shortcut goal needs. Everything else (wrong keys, macros,
// clicks) is a side effect the planner refuses to cause.
inline bool benign(const OutputEvent& e, const GoalTracker& before, const std::string& focus_before,
                   const MockDesktop& after, const TaskScript& s) {
  if (std::holds_alternative<ModeSwitched>(e.kind) || std::holds_alternative<Cancelled>(e.kind)) {
    return true;
  }
  const auto* g = before.current(s);
  if (g == nullptr) return false;
  if (const auto* k = std::get_if<KeyPress>(&e.kind)) {
    const auto* t = std::get_if<TypeText>(g);
    if (t == nullptr || focus_before != before.app) return false;
    if (k->key == "BACKSPACE") return true;
    if (!text_of(k->key)) return false;
    const auto& buf = after.text(before.app);
    return buf.size() <= before.base.size() + t->text.size() &&
           (buf.size() <= before.base.size() ? is_prefix_of(buf, before.base)
                                              : is_prefix_of(before.base, buf) &&
                                                    is_prefix_of(std::string_view(buf).substr(before.base.size()),
                                                                 t->text));
  }
  if (const auto* c = std::get_if<ClickEvent>(&e.kind)) {
    const bool needs_app = std::holds_alternative<TypeText>(*g) || std::holds_alternative<InvokeShortcut>(*g);
    if (!needs_app || focus_before == before.app || c->kind != ClickKind::Double) return false;
    const auto* icon = after.icon_at(c->x, c->y);
    return icon != nullptr && icon->second.app == before.app;
  }
  return false;
}

}  // namespace detail

// Feeds one engine input through the world: dispatch, deliver each output to
// the desktop (propagating focus), track goals. When `admissible` is given it
// is cleared if any output is a side effect a plan must not cause.
inline std::vector<OutputEvent> apply_input(World& w, const TaskScript& s, const EngineInput& in,
                                            bool* admissible = nullptr) {
  if (const auto* a = std::get_if<UserActionEvent>(&in)) {
    w.now = std::max(w.now, a->timestamp);
  } else {
    w.now = std::max(w.now, std::get<ClockTick>(in).now);
  }
  auto events = w.engine.dispatch(in);
  const int max_depth = w.engine.pointer().max_depth;
  for (const auto& e : events) {
    const auto tracker_before = w.tracker;
    const auto focus_before = w.desktop.focused_app;
    apply_to_desktop_in_place(e, w.desktop);
    if (w.desktop.focused_app != w.engine.app()) w.engine.on_focus_change(w.desktop.focused_app);
    const bool progressed = w.tracker.observe(s, e, w.desktop, max_depth);
    if (admissible != nullptr && !progressed &&
        !detail::benign(e, tracker_before, focus_before, w.desktop, s)) {
      *admissible = false;
    }
  }
  return events;
}

// Resolves a click window that closed at or before `now`.
inline std::vector<OutputEvent> advance_world_to(World& w, const TaskScript& s, Millis now) {
  std::vector<OutputEvent> out;
  if (w.engine.mode() == Mode::Pointer && w.engine.pointer().deadline &&
      *w.engine.pointer().deadline <= now) {
    out = apply_input(w, s, ClockTick{*w.engine.pointer().deadline});
  }
  w.now = std::max(w.now, now);
  return out;
}

// ---- plans ------------------------------------------------------------------

// Let the pending click window run out (costs no user action).
struct WaitStep {
  friend bool operator==(const WaitStep&, const WaitStep&) = default;
};

using PlanStep = std::variant<UserAction, WaitStep>;

inline std::string_view to_string(const PlanStep& p) {
  if (const auto* a = std::get_if<UserAction>(&p)) return to_string(*a);
  return "wait";
}

struct Plan {
  std::vector<PlanStep> steps;

  std::size_t action_count() const {
    return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [](const PlanStep& p) {
      return std::holds_alternative<UserAction>(p);
    }));
  }
  std::vector<UserAction> actions() const {
    std::vector<UserAction> out;
    for (const auto& p : steps) {
      if (const auto* a = std::get_if<UserAction>(&p)) out.push_back(*a);
    }
    return out;
  }
  friend bool operator==(const Plan&, const Plan&) = default;
};

struct PlannerOptions {
  // In pointer mode, only zoom into quadrants that overlap the active goal's
  // click target. Exact: any other zoom-in can only be undone.
  bool dominance_prune = true;
  std::size_t max_states = 2'000'000;
};

// Click targets the active goal can use.
inline std::vector<ScreenRect> target_region(const World& w, const TaskScript& s) {
  const auto* g = w.tracker.current(s);
  if (g == nullptr) return {};
  if (const auto* c = std::get_if<ClickPoint>(g)) return {ScreenRect{c->x, c->y, 1, 1}};
  if (const auto* f = std::get_if<FocusApp>(g)) return {w.desktop.icons.at(f->icon).rect};
  std::vector<ScreenRect> out;
  if (w.desktop.focused_app != w.tracker.app) {
    for (const auto& [id, icon] : w.desktop.icons) {
      if (icon.app == w.tracker.app) out.push_back(icon.rect);
    }
  }
  return out;
}

// Admissible one-step successors. Actions are spaced 1 ms apart, so a click
// window never runs out unless the plan waits for it.
inline std::vector<std::pair<PlanStep, World>> successors(const World& w, const TaskScript& s,
                                                          const PlannerOptions& opts) {
  std::vector<std::pair<PlanStep, World>> out;
  const auto& ptr = w.engine.pointer();
  const bool pointer = w.engine.mode() == Mode::Pointer;
  for (auto a : kAllActions) {
    if (opts.dominance_prune && pointer && a == UserAction::ZoomIn && !ptr.pending() &&
        ptr.depth() < ptr.max_depth) {
      const auto next = subdivide(ptr.current(), ptr.highlighted);
      const auto region = target_region(w, s);
      if (std::none_of(region.begin(), region.end(),
                       [&](const ScreenRect& r) { return r.intersects(next); })) {
        continue;
      }
    }
    World n = w;
    bool ok = true;
    apply_input(n, s, UserActionEvent{a, w.now + 1}, &ok);
    if (!ok) continue;
    n.desktop.click_log.clear();
    n.desktop.shortcut_log.clear();
    out.emplace_back(a, std::move(n));
  }
  if (pointer && ptr.pending()) {
    World n = w;
    bool ok = true;
    apply_input(n, s, ClockTick{*ptr.deadline}, &ok);
    if (ok) {
      n.desktop.click_log.clear();
      n.desktop.shortcut_log.clear();
      out.emplace_back(WaitStep{}, std::move(n));
    }
  }
  return out;
}

// Exact shortest plans over the engine x desktop x goal state space.
//
// The reachable state graph is built on demand and kept: the first query
// enumerates everything reachable from its start state, and each node gets its
// exact distance to completion by a reverse shortest-path pass (wait edges
// cost 0, actions 1). Later queries from states already in the graph are
// lookups; a state off the graph only adds its own new closure. Plans follow
// the distance field greedily, trying Scroll, ZoomIn, ZoomOut, Wait in that
// order, so they are deterministic.
class Planner {
 public:
  explicit Planner(TaskScript script, PlannerOptions opts = {})
      : script_(std::move(script)), opts_(opts) {
    script_.validate();
  }

  const TaskScript& script() const { return script_; }
  std::size_t state_count() const { return nodes_.size(); }

  // Minimal number of user actions that completes the script from `w`.
  std::size_t distance(const World& w) {
    const auto id = ensure(w);
    if (nodes_[id].togo == kInf) throw unreachable(id);
    return nodes_[id].togo;
  }

  Plan plan(const World& w) {
    auto id = ensure(w);
    if (nodes_[id].togo == kInf) throw unreachable(id);
    Plan p;
    while (!nodes_[id].done) {
      const auto& e = best_edge(id);
      p.steps.push_back(e.step);
      id = e.to;
    }
    return p;
  }

  // First step of plan(w), or nullopt if `w` already completes the script.
  std::optional<PlanStep> next_step(const World& w) {
    const auto id = ensure(w);
    if (nodes_[id].togo == kInf) throw unreachable(id);
    if (nodes_[id].done) return std::nullopt;
    return best_edge(id).step;
  }

 private:
  static constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();

  struct Edge {
    PlanStep step;
    std::uint32_t to;
    std::uint8_t cost;
  };

  struct Node {
    std::vector<Edge> edges;
    std::uint32_t togo = kInf;
    std::uint32_t goal_index = 0;
    bool done = false;
  };

  const Edge& best_edge(std::uint32_t id) const {
    const auto& n = nodes_[id];
    for (const auto& e : n.edges) {
      const auto t = nodes_[e.to].togo;
      if (t != kInf && t + e.cost == n.togo) return e;
    }
    throw PlanningError("planner: inconsistent distance field");
  }

  PlanningError unreachable(std::uint32_t from) const {
    // Name the furthest goal any reachable state gets to.
    std::vector<bool> seen(nodes_.size());
    std::vector<std::uint32_t> stack{from};
    seen[from] = true;
    std::uint32_t furthest = nodes_[from].goal_index;
    while (!stack.empty()) {
      const auto id = stack.back();
      stack.pop_back();
      furthest = std::max(furthest, nodes_[id].goal_index);
      for (const auto& e : nodes_[id].edges) {
        if (!seen[e.to]) {
          seen[e.to] = true;
          stack.push_back(e.to);
        }
      }
    }
    return PlanningError("task '" + script_.name + "': goal " + std::to_string(furthest) + " " +
                         describe(script_.goals.at(furthest)) + " is unreachable");
  }

  std::uint32_t add_node(const World& w, std::string key, std::vector<std::optional<World>>& pending) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    if (nodes_.size() >= opts_.max_states) {
      throw PlanningError("task '" + script_.name + "': state space exceeds " +
                          std::to_string(opts_.max_states) + " states");
    }
    Node n;
    n.done = w.tracker.done(script_);
    n.goal_index = static_cast<std::uint32_t>(w.tracker.index);
    nodes_.push_back(std::move(n));
    index_.emplace(std::move(key), id);
    pending.emplace_back(w);
    return id;
  }

  std::uint32_t ensure(const World& start) {
    auto key = state_key(start);
    if (auto it = index_.find(key); it != index_.end()) return it->second;

    const auto first = static_cast<std::uint32_t>(nodes_.size());
    std::vector<std::optional<World>> worlds;  // worlds[i] belongs to node first + i
    try {
      add_node(start, std::move(key), worlds);
      for (std::size_t i = 0; i < worlds.size(); ++i) {
        const auto id = static_cast<std::uint32_t>(first + i);
        if (nodes_[id].done) {
          worlds[i].reset();
          continue;
        }
        auto succ = successors(*worlds[i], script_, opts_);
        worlds[i].reset();
        std::vector<Edge> edges;
        for (auto& [step, next] : succ) {
          auto k = state_key(next);
          std::uint32_t to;
          if (auto it = index_.find(k); it != index_.end()) {
            to = it->second;
          } else {
            to = add_node(next, std::move(k), worlds);
          }
          if (to == id) continue;
          const std::uint8_t cost = std::holds_alternative<WaitStep>(step) ? 0 : 1;
          edges.push_back({step, to, cost});
        }
        nodes_[id].edges = std::move(edges);
      }
    } catch (...) {
      // Leave the graph as it was before this query.
      for (auto it = index_.begin(); it != index_.end();) {
        it = it->second >= first ? index_.erase(it) : std::next(it);
      }
      nodes_.resize(first);
      throw;
    }
    settle(first);
    return first;
  }

  // Distances for nodes [first, end): old nodes never reach new ones, so only
  // the new block needs solving, seeded by its edges into the old graph.
  void settle(std::uint32_t first) {
    const auto n = nodes_.size() - first;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint8_t>>> rev(n);
    using Item = std::pair<std::uint32_t, std::uint32_t>;  // (togo, id)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (std::uint32_t id = first; id < nodes_.size(); ++id) {
      auto& node = nodes_[id];
      if (node.done) node.togo = 0;
      for (const auto& e : node.edges) {
        if (e.to >= first) {
          rev[e.to - first].emplace_back(id, e.cost);
        } else if (nodes_[e.to].togo != kInf) {
          node.togo = std::min(node.togo, nodes_[e.to].togo + e.cost);
        }
      }
      if (node.togo != kInf) pq.emplace(node.togo, id);
    }
    while (!pq.empty()) {
      const auto [d, id] = pq.top();
      pq.pop();
      if (d != nodes_[id].togo) continue;
      for (const auto& [from, cost] : rev[id - first]) {
        if (d + cost < nodes_[from].togo) {
          nodes_[from].togo = d + cost;
          pq.emplace(nodes_[from].togo, from);
        }
      }
    }
  }

  TaskScript script_;
  PlannerOptions opts_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

inline Plan plan_optimal(const TaskScript& script, std::shared_ptr<const Profile> profile,
                         PlannerOptions opts = {}) {
  Planner planner(script, opts);
  return planner.plan(initial_world(script, std::move(profile)));
}

// Plain forward breadth-first search, no dominance pruning, no reuse. Used to
// cross-check the planner on small instances; nullopt when the goal is
// unreachable or more than `max_states` states get visited.
inline std::optional<std::size_t> naive_minimal_actions(const TaskScript& script, const World& start,
                                                        std::size_t max_states = 100'000) {
  PlannerOptions opts;
  opts.dominance_prune = false;
  std::unordered_map<std::string, std::size_t> dist;
  std::deque<std::pair<World, std::size_t>> queue;
  dist.emplace(state_key(start), 0);
  queue.emplace_back(start, 0);
  while (!queue.empty()) {
    auto [w, d] = std::move(queue.front());
    queue.pop_front();
    if (dist.at(state_key(w)) < d) continue;
    if (w.tracker.done(script)) return d;
    for (auto& [step, next] : successors(w, script, opts)) {
      const std::size_t nd = d + (std::holds_alternative<WaitStep>(step) ? 0 : 1);
      auto k = state_key(next);
      auto it = dist.find(k);
      if (it != dist.end() && it->second <= nd) continue;
      if (it == dist.end() && dist.size() >= max_states) return std::nullopt;
      dist[std::move(k)] = nd;
      if (nd == d) {
        queue.emplace_front(std::move(next), nd);
      } else {
        queue.emplace_back(std::move(next), nd);
      }
    }
  }
  return std::nullopt;
}

// Replays a plan in planner time (actions 1 ms apart, waits to the deadline).
inline std::vector<OutputEvent> replay(World& w, const TaskScript& s, const Plan& p) {
  std::vector<OutputEvent> log;
  for (const auto& step : p.steps) {
    std::vector<OutputEvent> out;
    if (const auto* a = std::get_if<UserAction>(&step)) {
      out = apply_input(w, s, UserActionEvent{*a, w.now + 1});
    } else if (w.engine.pointer().deadline) {
      out = apply_input(w, s, ClockTick{*w.engine.pointer().deadline});
    }
    log.insert(log.end(), out.begin(), out.end());
  }
  return log;
}

}  // namespace mind
