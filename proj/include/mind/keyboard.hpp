#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "mind/error.hpp"
#include "mind/hierarchy.hpp"

namespace mind {

// A single key: a printable character ("a", ".", "5") or a named key
// ("SPACE", "ENTER", "BACKSPACE", "TAB", ...).
struct Keystroke {
  std::string key;
  friend bool operator==(const Keystroke&, const Keystroke&) = default;
};

// A named shortcut / macro: `keys` are pressed as one chord sequence.
struct KeySequence {
  std::string name;
  std::vector<std::string> keys;
  friend bool operator==(const KeySequence&, const KeySequence&) = default;
};

struct SwitchToPointer {
  friend bool operator==(const SwitchToPointer&, const SwitchToPointer&) = default;
};

inline constexpr std::size_t kPredictionSlots = 6;

struct PredictionSlot {
  std::size_t rank = 0;  // < kPredictionSlots
  friend bool operator==(const PredictionSlot&, const PredictionSlot&) = default;
};

using KeyPayload = std::variant<Keystroke, KeySequence, SwitchToPointer, PredictionSlot>;
using KeyboardLayout = LayoutTree<KeyPayload>;
using KeyNode = LayoutNode<KeyPayload>;

// Depth exactly 3: groups (<=5), subgroups (<=5), keys (<=6).
inline FanoutConstraints keyboard_constraints() { return {3, {5, 5, 6}}; }

// Character a keystroke contributes to a text buffer, if any.
inline std::optional<char> text_of(std::string_view key) {
  if (key.size() == 1) return key[0];
  if (key == "SPACE") return ' ';
  if (key == "ENTER") return '\n';
  if (key == "TAB") return '\t';
  return std::nullopt;
}

// Inverse of text_of for the characters a TypeText goal may contain.
inline std::string key_for_char(char c) {
  switch (c) {
    case ' ':
      return "SPACE";
    case '\n':
      return "ENTER";
    case '\t':
      return "TAB";
    default:
      return std::string(1, c);
  }
}

namespace detail {

inline KeyNode key(std::string k) {
  std::string label = k;
  return KeyNode::leaf(std::move(label), Keystroke{std::move(k)});
}

inline KeyNode keys_group(std::string label, std::initializer_list<const char*> ks) {
  std::vector<KeyNode> kids;
  for (const char* k : ks) kids.push_back(key(k));
  return KeyNode::group(std::move(label), std::move(kids));
}

inline KeyNode macro(std::string name, std::vector<std::string> keys) {
  std::string label = name;
  return KeyNode::leaf(std::move(label), KeySequence{std::move(name), std::move(keys)});
}

}  // namespace detail

// Root groups in order: letters, numbers, symbols, shortcuts, desktop.
//
//   letters    a-f | g-l | m-r | s-x | y z SPACE BACKSPACE ENTER .
//   numbers    0-4 | 5-9
//   symbols    , ; : ? ! ' | ( ) [ ] " / | + - * = % # | @ & $ _ ~ \ .
//   shortcuts  predict (6 slots) | edit macros | navigation keys | window macros
//   desktop    pointer (switches to the pointing device)
inline KeyboardLayout default_layout() {
  using detail::keys_group;
  using detail::macro;

  auto letters = KeyNode::group(
      "letters", {keys_group("a-f", {"a", "b", "c", "d", "e", "f"}),
                  keys_group("g-l", {"g", "h", "i", "j", "k", "l"}),
                  keys_group("m-r", {"m", "n", "o", "p", "q", "r"}),
                  keys_group("s-x", {"s", "t", "u", "v", "w", "x"}),
                  keys_group("y-.", {"y", "z", "SPACE", "BACKSPACE", "ENTER", "."})});

  auto numbers = KeyNode::group(
      "numbers", {keys_group("0-4", {"0", "1", "2", "3", "4"}),
                  keys_group("5-9", {"5", "6", "7", "8", "9"})});

  auto symbols = KeyNode::group(
      "symbols", {keys_group("punctuation", {",", ";", ":", "?", "!", "'"}),
                  keys_group("brackets", {"(", ")", "[", "]", "\"", "/"}),
                  keys_group("math", {"+", "-", "*", "=", "%", "#"}),
                  keys_group("other", {"@", "&", "$", "_", "~", "\\"})});

  std::vector<KeyNode> slots;
  for (std::size_t r = 0; r < kPredictionSlots; ++r) {
    slots.push_back(KeyNode::leaf("word " + std::to_string(r + 1), PredictionSlot{r}));
  }
  auto shortcuts = KeyNode::group(
      "shortcuts",
      {KeyNode::group("predict", std::move(slots)),
       KeyNode::group("edit", {macro("COPY", {"CTRL", "C"}), macro("PASTE", {"CTRL", "V"}),
                               macro("CUT", {"CTRL", "X"}), macro("UNDO", {"CTRL", "Z"}),
                               macro("SELECT_ALL", {"CTRL", "A"}), macro("SAVE", {"CTRL", "S"})}),
       keys_group("navigate", {"TAB", "ESC", "LEFT", "RIGHT", "UP", "DOWN"}),
       KeyNode::group("window", {macro("SEND", {"CTRL", "ENTER"}), macro("NEW", {"CTRL", "N"}),
                                 macro("FIND", {"CTRL", "F"}), macro("CLOSE", {"ALT", "F4"}),
                                 macro("SWITCH", {"ALT", "TAB"})})});

  auto desktop = KeyNode::group(
      "desktop", {KeyNode::group("desktop", {KeyNode::leaf("pointer", SwitchToPointer{})})});

  return KeyNode::group("keyboard", {std::move(letters), std::move(numbers), std::move(symbols),
                                     std::move(shortcuts), std::move(desktop)});
}

// Media player layout: transport/volume macros first, then letters and the
// pointer switch.
inline KeyboardLayout media_player_layout() {
  using detail::macro;
  auto media = KeyNode::group(
      "media",
      {KeyNode::group("transport", {macro("PLAY", {"CTRL", "P"}), macro("PAUSE", {"CTRL", "P"}),
                                    macro("STOP", {"CTRL", "S"}),
                                    macro("REWIND", {"CTRL", "SHIFT", "B"}),
                                    macro("FORWARD", {"CTRL", "SHIFT", "F"})}),
       KeyNode::group("volume", {macro("VOLUME_UP", {"F9"}), macro("VOLUME_DOWN", {"F8"}),
                                 macro("MUTE", {"F7"})})});
  auto base = default_layout();
  auto letters = base.children[0];
  auto desktop = base.children[4];
  return KeyNode::group("media player", {std::move(media), std::move(letters), std::move(desktop)});
}

// ---- layout documents ------------------------------------------------------

inline constexpr int kLayoutVersion = 1;

inline nlohmann::json payload_to_json(const KeyPayload& p) {
  using nlohmann::json;
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Keystroke>) {
          return {{"type", "key"}, {"key", v.key}};
        } else if constexpr (std::is_same_v<T, KeySequence>) {
          return {{"type", "seq"}, {"name", v.name}, {"keys", v.keys}};
        } else if constexpr (std::is_same_v<T, SwitchToPointer>) {
          return {{"type", "pointer"}};
        } else {
          return {{"type", "predict"}, {"rank", v.rank}};
        }
      },
      p);
}

inline KeyPayload payload_from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "key") return Keystroke{j.at("key").get<std::string>()};
  if (type == "seq") {
    KeySequence s{j.at("name").get<std::string>(), j.at("keys").get<std::vector<std::string>>()};
    if (s.keys.empty()) throw ParseError("key sequence '" + s.name + "' has no keys");
    return s;
  }
  if (type == "pointer") return SwitchToPointer{};
  if (type == "predict") {
    const auto rank = j.at("rank").get<std::size_t>();
    if (rank >= kPredictionSlots) throw ParseError("prediction rank out of range");
    return PredictionSlot{rank};
  }
  throw ParseError("unknown payload type '" + type + "'");
}

inline nlohmann::json node_to_json(const KeyNode& n) {
  nlohmann::json j;
  j["label"] = n.label;
  if (n.is_leaf()) {
    j["payload"] = payload_to_json(*n.payload);
  } else {
    auto& kids = j["children"] = nlohmann::json::array();
    for (const auto& c : n.children) kids.push_back(node_to_json(c));
  }
  return j;
}

inline KeyNode node_from_json(const nlohmann::json& j) {
  KeyNode n;
  n.label = j.at("label").get<std::string>();
  const bool has_payload = j.contains("payload");
  const bool has_children = j.contains("children");
  if (has_payload == has_children) {
    throw ParseError("node '" + n.label + "' needs exactly one of 'children' or 'payload'");
  }
  if (has_payload) {
    n.payload = payload_from_json(j.at("payload"));
  } else {
    for (const auto& c : j.at("children")) n.children.push_back(node_from_json(c));
  }
  return n;
}

inline nlohmann::json layout_to_json(const KeyboardLayout& tree) {
  auto j = node_to_json(tree);
  j["layout_version"] = kLayoutVersion;
  return j;
}

inline std::string serialize_layout(const KeyboardLayout& tree) {
  return layout_to_json(tree).dump(2) + "\n";
}

inline std::vector<std::string> describe(const std::vector<Violation>& v) {
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(x.describe());
  return out;
}

// Parses and validates against keyboard_constraints(). Violations come back
// verbatim inside a ValidationError.
inline KeyboardLayout layout_from_json(const nlohmann::json& doc) {
  KeyboardLayout tree;
  try {
    if (doc.at("layout_version").get<int>() != kLayoutVersion) {
      throw ParseError("unsupported layout_version " + doc.at("layout_version").dump());
    }
    tree = node_from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("layout document: ") + e.what());
  }
  auto violations = validate_layout(tree, keyboard_constraints());
  if (!violations.empty()) throw ValidationError("invalid layout", describe(violations));
  return tree;
}

inline KeyboardLayout load_layout(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("layout document: ") + e.what());
  }
  return layout_from_json(doc);
}

}  // namespace mind
