#pragma once

#include <compare>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mind/action.hpp"
#include "mind/error.hpp"

namespace mind {

using NodePath = std::vector<std::size_t>;

inline std::string to_string(const NodePath& p) {
  std::string s = "/";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += '/';
    s += std::to_string(p[i]);
  }
  return s;
}

// A node is a leaf iff it carries a payload. Internal nodes must have at least
// one child; validate_layout reports anything else.
template <class Payload>
struct LayoutNode {
  std::string label;
  std::vector<LayoutNode> children;
  std::optional<Payload> payload;

  static LayoutNode leaf(std::string label, Payload p) {
    return LayoutNode{std::move(label), {}, std::move(p)};
  }
  static LayoutNode group(std::string label, std::vector<LayoutNode> kids) {
    return LayoutNode{std::move(label), std::move(kids), std::nullopt};
  }

  bool is_leaf() const { return payload.has_value(); }

  friend bool operator==(const LayoutNode& a, const LayoutNode& b) {
    return a.label == b.label && a.payload == b.payload && a.children == b.children;
  }
};

template <class Payload>
using LayoutTree = LayoutNode<Payload>;

template <class Payload>
const LayoutNode<Payload>* node_at(const LayoutNode<Payload>& root, const NodePath& path) {
  const LayoutNode<Payload>* n = &root;
  for (auto i : path) {
    if (n->is_leaf() || i >= n->children.size()) return nullptr;
    n = &n->children[i];
  }
  return n;
}

template <class Payload>
std::vector<NodePath> leaf_paths(const LayoutNode<Payload>& root) {
  std::vector<NodePath> out;
  NodePath path;
  auto walk = [&](auto& self, const LayoutNode<Payload>& n) -> void {
    if (n.is_leaf()) {
      out.push_back(path);
      return;
    }
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      path.push_back(i);
      self(self, n.children[i]);
      path.pop_back();
    }
  };
  walk(walk, root);
  return out;
}

// Position in the tree: `path` names the internal node whose children are on
// screen, `selected` is the highlighted child.
struct NavCursor {
  NodePath path;
  std::size_t selected = 0;

  friend bool operator==(const NavCursor&, const NavCursor&) = default;
  friend auto operator<=>(const NavCursor&, const NavCursor&) = default;
};

template <class Payload>
struct NavEffect {
  enum class Kind { None, Emit, Cancelled };
  Kind kind = Kind::None;
  std::optional<Payload> payload;  // set for Emit
  NodePath leaf;                   // address of the emitted leaf

  bool is_emit() const { return kind == Kind::Emit; }
};

template <class Payload>
const LayoutNode<Payload>& checked_level(const LayoutNode<Payload>& tree, const NavCursor& c) {
  const auto* level = node_at(tree, c.path);
  if (level == nullptr || level->is_leaf() || level->children.empty()) {
    throw StateError("cursor path " + to_string(c.path) + " is not an internal node");
  }
  if (c.selected >= level->children.size()) {
    throw StateError("cursor selection " + std::to_string(c.selected) + " out of range at " +
                     to_string(c.path));
  }
  return *level;
}

// The three-action transition function.
//
//   Scroll   selected := (selected + 1) mod fan-out
//   ZoomIn   internal child: descend, highlight its first child
//            leaf child: Emit its payload, cursor back to root / first group
//   ZoomOut  below root: ascend, re-highlight the node we came from
//            at root: Cancelled, selection back to the first group
template <class Payload>
std::pair<NavCursor, NavEffect<Payload>> apply_action(const LayoutTree<Payload>& tree,
                                                      const NavCursor& cursor,
                                                      UserAction action) {
  using Effect = NavEffect<Payload>;
  const auto& level = checked_level(tree, cursor);
  NavCursor next = cursor;
  Effect effect;
  switch (action) {
    case UserAction::Scroll:
      next.selected = (cursor.selected + 1) % level.children.size();
      break;
    case UserAction::ZoomIn: {
      const auto& child = level.children[cursor.selected];
      if (child.is_leaf()) {
        effect.kind = Effect::Kind::Emit;
        effect.payload = child.payload;
        effect.leaf = cursor.path;
        effect.leaf.push_back(cursor.selected);
        next = NavCursor{};
      } else {
        if (child.children.empty()) {
          throw StateError("node " + child.label + " has no children");
        }
        next.path.push_back(cursor.selected);
        next.selected = 0;
      }
      break;
    }
    case UserAction::ZoomOut:
      if (cursor.path.empty()) {
        effect.kind = Effect::Kind::Cancelled;
        next.selected = 0;
      } else {
        next.selected = cursor.path.back();
        next.path.pop_back();
      }
      break;
  }
  return {std::move(next), std::move(effect)};
}

// Shortest action sequence from the root cursor that ends by emitting the
// leaf at `leaf`. Plain breadth-first search over the cursor graph that
// apply_action defines; the emitting zoom-in is the last element.
template <class Payload>
std::vector<UserAction> witness_sequence(const LayoutTree<Payload>& tree, const NodePath& leaf) {
  const auto* target = node_at(tree, leaf);
  if (target == nullptr || !target->is_leaf() || leaf.empty()) {
    throw InputError("path " + to_string(leaf) + " does not address a leaf");
  }
  struct Back {
    NavCursor parent;
    UserAction action;
  };
  const NavCursor start{};
  std::map<NavCursor, std::optional<Back>> seen;
  seen.emplace(start, std::nullopt);
  std::deque<NavCursor> queue{start};
  auto unwind = [&](NavCursor at, UserAction last) {
    std::vector<UserAction> seq{last};
    for (auto b = seen.at(at); b; b = seen.at(b->parent)) {
      seq.push_back(b->action);
      at = b->parent;
    }
    return std::vector<UserAction>(seq.rbegin(), seq.rend());
  };
  while (!queue.empty()) {
    NavCursor cur = std::move(queue.front());
    queue.pop_front();
    for (auto a : kAllActions) {
      auto [next, effect] = apply_action(tree, cur, a);
      if (effect.is_emit() && effect.leaf == leaf) return unwind(cur, a);
      if (seen.contains(next)) continue;
      seen.emplace(next, Back{cur, a});
      queue.push_back(std::move(next));
    }
  }
  throw InputError("leaf " + to_string(leaf) + " unreachable");
}

template <class Payload>
std::size_t minimal_actions(const LayoutTree<Payload>& tree, const NodePath& leaf) {
  return witness_sequence(tree, leaf).size();
}

// max_fanout[d] bounds the number of children of a node at depth d (root is
// depth 0); depths beyond the vector are unbounded. leaf_depth, when set,
// requires every leaf to sit at exactly that depth.
struct FanoutConstraints {
  std::optional<std::size_t> leaf_depth;
  std::vector<std::size_t> max_fanout;
};

struct Violation {
  NodePath path;
  std::string label;
  std::string message;

  std::string describe() const { return to_string(path) + " (" + label + "): " + message; }
};

template <class Payload>
std::vector<Violation> validate_layout(const LayoutTree<Payload>& tree,
                                       const FanoutConstraints& constraints) {
  std::vector<Violation> out;
  NodePath path;
  auto walk = [&](auto& self, const LayoutNode<Payload>& n) -> void {
    const std::size_t depth = path.size();
    if (n.is_leaf()) {
      if (!n.children.empty()) out.push_back({path, n.label, "leaf also has children"});
      if (depth == 0) out.push_back({path, n.label, "root must not be a leaf"});
      if (constraints.leaf_depth && depth != *constraints.leaf_depth) {
        out.push_back({path, n.label,
                       "leaf at depth " + std::to_string(depth) + ", expected " +
                           std::to_string(*constraints.leaf_depth)});
      }
      return;
    }
    if (n.children.empty()) {
      out.push_back({path, n.label, "internal node has no children"});
      return;
    }
    if (depth < constraints.max_fanout.size() && n.children.size() > constraints.max_fanout[depth]) {
      out.push_back({path, n.label,
                     std::to_string(n.children.size()) + " children exceeds limit of " +
                         std::to_string(constraints.max_fanout[depth])});
    }
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      path.push_back(i);
      self(self, n.children[i]);
      path.pop_back();
    }
  };
  walk(walk, tree);
  return out;
}

}  // namespace mind
