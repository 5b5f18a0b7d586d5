#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace mind {

using Millis = std::int64_t;

// The whole input vocabulary. Everything the user can do is one of these three.
enum class UserAction : std::uint8_t { Scroll = 0, ZoomIn = 1, ZoomOut = 2 };

inline constexpr std::array<UserAction, 3> kAllActions = {UserAction::Scroll, UserAction::ZoomIn,
                                                          UserAction::ZoomOut};

struct UserActionEvent {
  UserAction action = UserAction::Scroll;
  Millis timestamp = 0;

  friend bool operator==(const UserActionEvent&, const UserActionEvent&) = default;
};

// Wire names, as used by trace tools and the gateway protocol.
constexpr std::string_view to_string(UserAction a) {
  switch (a) {
    case UserAction::Scroll:
      return "scroll";
    case UserAction::ZoomIn:
      return "zoom_in";
    case UserAction::ZoomOut:
      return "zoom_out";
  }
  return "?";
}

constexpr std::optional<UserAction> parse_action(std::string_view s) {
  for (auto a : kAllActions) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

constexpr std::size_t index_of(UserAction a) { return static_cast<std::size_t>(a); }

}  // namespace mind
