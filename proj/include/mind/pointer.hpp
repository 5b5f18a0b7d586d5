#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mind/action.hpp"
#include "mind/error.hpp"

namespace mind {

// Half-open pixel rectangle [x, x+w) x [y, y+h).
struct ScreenRect {
  int x = 0;
  int y = 0;
  int w = 1;
  int h = 1;

  bool contains(int px, int py) const { return px >= x && px < x + w && py >= y && py < y + h; }
  bool contains(const ScreenRect& r) const {
    return r.x >= x && r.y >= y && r.x + r.w <= x + w && r.y + r.h <= y + h;
  }
  bool intersects(const ScreenRect& r) const {
    return r.x < x + w && x < r.x + r.w && r.y < y + h && y < r.y + r.h;
  }
  long long area() const { return static_cast<long long>(w) * h; }

  friend bool operator==(const ScreenRect&, const ScreenRect&) = default;
};

// Quadrant order: 0 top-left, 1 top-right, 2 bottom-left, 3 bottom-right.
enum Quadrant : int { TL = 0, TR = 1, BL = 2, BR = 3 };

inline constexpr Millis kClickWindowMs = 4000;

// Left/top halves get the ceiling, right/bottom the floor, so the four
// quadrants tile the rect exactly. A dimension of 1 cannot be split; both
// halves then keep the full 1-pixel span in that dimension.
inline ScreenRect subdivide(const ScreenRect& r, int quadrant) {
  if (r.w < 1 || r.h < 1) throw InputError("subdivide: empty rect");
  if (quadrant < 0 || quadrant > 3) throw InputError("subdivide: quadrant out of range");
  const int lw = (r.w + 1) / 2, rw = r.w / 2;
  const int th = (r.h + 1) / 2, bh = r.h / 2;
  const bool right = quadrant & 1;
  const bool bottom = quadrant & 2;
  ScreenRect q;
  if (right && rw > 0) {
    q.x = r.x + lw;
    q.w = rw;
  } else {
    q.x = r.x;
    q.w = right ? r.w : lw;
  }
  if (bottom && bh > 0) {
    q.y = r.y + th;
    q.h = bh;
  } else {
    q.y = r.y;
    q.h = bottom ? r.h : th;
  }
  return q;
}

// Which quadrant of r holds the point (r must contain it).
inline int quadrant_of(const ScreenRect& r, int px, int py) {
  for (int q = 0; q < 4; ++q) {
    if (subdivide(r, q).contains(px, py)) return q;
  }
  throw InputError("point outside rect");
}

inline std::vector<int> quadrant_path(const ScreenRect& screen, int px, int py, int depth) {
  if (!screen.contains(px, py)) {
    throw InputError("point (" + std::to_string(px) + "," + std::to_string(py) +
                     ") outside screen");
  }
  if (depth < 1) throw InputError("depth must be positive");
  std::vector<int> path;
  ScreenRect r = screen;
  for (int d = 0; d < depth; ++d) {
    const int q = quadrant_of(r, px, py);
    path.push_back(q);
    r = subdivide(r, q);
  }
  return path;
}

inline ScreenRect rect_for_path(const ScreenRect& screen, const std::vector<int>& path) {
  ScreenRect r = screen;
  for (int q : path) r = subdivide(r, q);
  return r;
}

// Smallest d >= 1 with ceil(max(w, h) / 2^d) <= precision.
inline int required_depth(const ScreenRect& screen, int precision) {
  if (precision < 1) throw InputError("precision must be at least 1 pixel");
  const long long side = std::max(screen.w, screen.h);
  int d = 1;
  while (((side + (1LL << d) - 1) >> d) > precision) ++d;
  return d;
}

enum class ClickKind { Single, Double };

struct ClickEvent {
  int x = 0;
  int y = 0;
  ClickKind kind = ClickKind::Single;
  friend bool operator==(const ClickEvent&, const ClickEvent&) = default;
};

inline ClickEvent click_at(const ScreenRect& r, ClickKind kind) {
  return {r.x + r.w / 2, r.y + r.h / 2, kind};
}

struct SwitchToKeyboard {
  friend bool operator==(const SwitchToKeyboard&, const SwitchToKeyboard&) = default;
};

struct ClockTick {
  Millis now = 0;
};

struct PointerState {
  std::vector<ScreenRect> rect_stack;  // full screen first; depth = size - 1
  std::vector<int> path;               // quadrant chosen at each level
  int highlighted = TL;
  std::optional<Millis> deadline;      // set while a click is pending
  int max_depth = 1;

  static PointerState fresh(const ScreenRect& screen, int max_depth) {
    if (max_depth < 1) throw InputError("max_depth must be positive");
    PointerState s;
    s.rect_stack = {screen};
    s.max_depth = max_depth;
    return s;
  }

  int depth() const { return static_cast<int>(path.size()); }
  const ScreenRect& current() const { return rect_stack.back(); }
  const ScreenRect& screen() const { return rect_stack.front(); }
  bool pending() const { return deadline.has_value(); }

  friend bool operator==(const PointerState&, const PointerState&) = default;
};

using PointerInput = std::variant<UserAction, ClockTick>;
using PointerOutput = std::variant<ClickEvent, SwitchToKeyboard>;

struct PointerStep {
  PointerState state;
  std::optional<PointerOutput> output;
};

// The pointing device. Time only enters through `now`; nothing here reads a clock.
//
// Navigating: Scroll cycles the highlighted quadrant; ZoomIn descends into it
// (or, at max depth, starts the click window [now, now + 4000)); ZoomOut pops
// a level, or at the full screen hands control back to the keyboard.
//
// Pending click: ZoomIn inside the window is a double click; a tick at or
// after the deadline is a single click. Any input arriving at or after the
// deadline resolves the overdue single click and is consumed. ZoomOut inside
// the window cancels back to max-depth navigation. Scroll is ignored. After a
// click the device starts over at the full screen.
inline PointerStep step_pointer(const PointerState& state, const PointerInput& input, Millis now) {
  PointerStep out{state, std::nullopt};
  auto& s = out.state;
  auto reset = [&] {
    const ScreenRect screen = s.screen();
    s = PointerState::fresh(screen, s.max_depth);
  };

  if (s.pending()) {
    const Millis deadline = *s.deadline;
    if (now >= deadline) {
      out.output = click_at(s.current(), ClickKind::Single);
      reset();
      return out;
    }
    if (const auto* a = std::get_if<UserAction>(&input)) {
      if (*a == UserAction::ZoomIn) {
        out.output = click_at(s.current(), ClickKind::Double);
        reset();
      } else if (*a == UserAction::ZoomOut) {
        s.deadline.reset();
      }
    }
    return out;
  }

  const auto* a = std::get_if<UserAction>(&input);
  if (a == nullptr) return out;  // ticks only matter while a click is pending
  switch (*a) {
    case UserAction::Scroll:
      s.highlighted = (s.highlighted + 1) % 4;
      break;
    case UserAction::ZoomIn:
      if (s.depth() < s.max_depth) {
        s.rect_stack.push_back(subdivide(s.current(), s.highlighted));
        s.path.push_back(s.highlighted);
        s.highlighted = TL;
      } else {
        s.deadline = now + kClickWindowMs;
      }
      break;
    case UserAction::ZoomOut:
      if (s.depth() > 0) {
        s.highlighted = s.path.back();
        s.path.pop_back();
        s.rect_stack.pop_back();
      } else {
        out.output = SwitchToKeyboard{};
        reset();
      }
      break;
  }
  return out;
}

// Scroll/zoom sequence that brings a fresh pointer onto the cell containing
// the point: per level, `q` scrolls then a zoom-in. The click itself (one
// more zoom-in, plus a second for a double click) is not included.
inline std::vector<UserAction> pointer_navigation(const ScreenRect& screen, int px, int py,
                                                  int depth) {
  std::vector<UserAction> seq;
  for (int q : quadrant_path(screen, px, py, depth)) {
    seq.insert(seq.end(), static_cast<std::size_t>(q), UserAction::Scroll);
    seq.push_back(UserAction::ZoomIn);
  }
  return seq;
}

}  // namespace mind
