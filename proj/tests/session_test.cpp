#include <gtest/gtest.h>

#include "mind/session.hpp"

namespace mind {
namespace {

using nlohmann::json;

std::shared_ptr<const Profile> profile() {
  static const auto p = std::make_shared<const Profile>(
      builtin_profile(Dictionary{{"hello", 10}, {"help", 7}, {"hermit", 2}}));
  return p;
}

MockDesktop desktop() {
  MockDesktop d;
  d.icons["player"] = Icon{{40, 160, 64, 64}, "mediaplayer"};
  return d;
}

// Clock that advances one second per read.
struct StepClock {
  std::shared_ptr<Millis> t = std::make_shared<Millis>(0);
  Millis operator()() const { return *t += 1000; }
};

std::string action(std::string_view a) { return json{{"type", "action"}, {"action", a}}.dump(); }

std::vector<json> parse_all(const std::vector<std::string>& frames) {
  std::vector<json> out;
  for (const auto& f : frames) out.push_back(json::parse(f));
  return out;
}

TEST(Snapshot, InitialState) {
  Session s(profile(), desktop(), StepClock{});
  auto j = s.snapshot();
  EXPECT_EQ(j["type"], "snapshot");
  EXPECT_EQ(j["seq"], 0);
  EXPECT_EQ(j["mode"], "keyboard");
  EXPECT_EQ(j["keyboard"]["highlighted"], 0);
  EXPECT_TRUE(j["keyboard"]["breadcrumb"].empty());
  EXPECT_EQ(j["keyboard"]["labels"].size(), checked_level(s.engine().layout(), {}).children.size());
  EXPECT_EQ(j["pointer"]["depth"], 0);
  EXPECT_EQ(j["pointer"]["max_depth"], 7);
  EXPECT_EQ(j["pointer"]["phase"], "navigating");
  EXPECT_TRUE(j["pointer"]["deadline"].is_null());
  EXPECT_EQ(j["pointer"]["rect"], (json{{"x", 0}, {"y", 0}, {"w", 1920}, {"h", 1080}}));
  EXPECT_EQ(j["pointer"]["quadrants"][3], (json{{"x", 960}, {"y", 540}, {"w", 960}, {"h", 540}}));
  EXPECT_EQ(j["current_word_prefix"], "");
}

TEST(Session, ScrollAdvancesHighlight) {
  Session s(profile(), desktop(), StepClock{});
  auto box = s.handle_client_message(action("scroll"));
  EXPECT_TRUE(box.reply.empty());
  ASSERT_EQ(box.broadcast.size(), 1u);
  auto j = json::parse(box.broadcast[0]);
  EXPECT_EQ(j["type"], "snapshot");
  EXPECT_EQ(j["seq"], 1);
  EXPECT_EQ(j["keyboard"]["highlighted"], 1);
  EXPECT_EQ(j["time"], 1000);
}

TEST(Session, OutputsPrecedeSnapshot) {
  Session s(profile(), desktop(), StepClock{});
  // Walk to 'h' and emit it.
  const auto& kb = s.engine().layout();
  NodePath leaf;
  for (const auto& p : leaf_paths(kb)) {
    if (*node_at(kb, p)->payload == KeyPayload{Keystroke{"h"}}) leaf = p;
  }
  Outbox last;
  for (auto a : witness_sequence(kb, leaf)) last = s.handle_client_message(action(to_string(a)));
  auto msgs = parse_all(last.broadcast);
  ASSERT_EQ(msgs.size(), 2u);
  EXPECT_EQ(msgs[0]["type"], "output");
  EXPECT_EQ(msgs[0]["kind"], "key");
  EXPECT_EQ(msgs[0]["key"], "h");
  EXPECT_EQ(msgs[1]["type"], "snapshot");
  EXPECT_EQ(msgs[1]["current_word_prefix"], "h");
  EXPECT_EQ(msgs[1]["text"], "h");
  ASSERT_EQ(s.log().size(), 1u);
}

TEST(Session, SeqStrictlyIncreases) {
  Session s(profile(), desktop(), StepClock{});
  std::uint64_t last = 0;
  for (int i = 0; i < 30; ++i) {
    const char* names[] = {"scroll", "zoom_in", "zoom_out"};
    for (const auto& m : parse_all(s.handle_client_message(action(names[(i * 7) % 3])).broadcast)) {
      if (m["type"] == "snapshot") {
        EXPECT_GT(m["seq"].get<std::uint64_t>(), last);
        last = m["seq"];
      }
    }
  }
  EXPECT_EQ(last, s.seq());
}

TEST(Session, PredictionLabelsAndDisabledSlots) {
  Session s(profile(), desktop(), StepClock{});
  const auto& kb = s.engine().layout();
  NodePath slot_leaf;
  for (const auto& p : leaf_paths(kb)) {
    if (*node_at(kb, p)->payload == KeyPayload{PredictionSlot{0}}) slot_leaf = p;
  }
  // Descend to the level holding the prediction slots.
  NodePath level(slot_leaf.begin(), slot_leaf.end() - 1);
  auto actions = witness_sequence(kb, slot_leaf);
  actions.pop_back();  // stop before emitting
  json snap;
  for (auto a : actions) snap = json::parse(s.handle_client_message(action(to_string(a))).broadcast.back());
  const auto& view = snap["keyboard"];
  ASSERT_EQ(view["breadcrumb"].size(), level.size());
  const auto& children = node_at(kb, level)->children;
  std::size_t slots = 0;
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (std::holds_alternative<PredictionSlot>(*children[i].payload)) {
      ++slots;
      // Empty prefix: every word is a candidate; three words fill three slots.
      const auto rank = std::get<PredictionSlot>(*children[i].payload).rank;
      if (rank < 3) {
        EXPECT_NE(view["labels"][i], "");
      } else {
        EXPECT_EQ(view["labels"][i], "");
        EXPECT_NE(std::find(view["disabled"].begin(), view["disabled"].end(), json(i)),
                  view["disabled"].end());
      }
    }
  }
  EXPECT_GT(slots, 0u);
  EXPECT_EQ(view["labels"][0], "hello");
}

TEST(Session, PendingClickAndTick) {
  Session s(profile(), desktop(), StepClock{});
  ASSERT_TRUE(s.handle_client_message(json{{"type", "config"}, {"max_depth", 1}}.dump()).reply.empty());
  const auto& kb = s.engine().layout();
  NodePath leaf;
  for (const auto& p : leaf_paths(kb)) {
    if (*node_at(kb, p)->payload == KeyPayload{SwitchToPointer{}}) leaf = p;
  }
  for (auto a : witness_sequence(kb, leaf)) s.handle_client_message(action(to_string(a)));
  ASSERT_EQ(s.engine().mode(), Mode::Pointer);
  s.handle_client_message(action("zoom_in"));  // depth 1 = max
  auto box = s.handle_client_message(action("zoom_in"));  // start click window
  auto snap = json::parse(box.broadcast.back());
  EXPECT_EQ(snap["pointer"]["phase"], "pending_click");
  const Millis deadline = snap["pointer"]["deadline"];
  EXPECT_EQ(deadline, s.now() + kClickWindowMs);
  EXPECT_EQ(s.next_deadline(), deadline);

  EXPECT_TRUE(s.tick(deadline - 1).broadcast.empty());
  auto fired = parse_all(s.tick(deadline).broadcast);
  ASSERT_EQ(fired.size(), 2u);
  EXPECT_EQ(fired[0]["kind"], "click");
  EXPECT_EQ(fired[0]["click"], "single");
  EXPECT_EQ(fired[0]["t"], deadline);
  EXPECT_EQ(fired[1]["pointer"]["phase"], "navigating");
  EXPECT_FALSE(s.next_deadline());
}

TEST(Session, ErrorsEchoPayloadAndKeepState) {
  Session s(profile(), desktop(), StepClock{});
  const auto before = s.snapshot();
  auto check = [&](const std::string& text, const json& payload) {
    auto box = s.handle_client_message(text);
    EXPECT_TRUE(box.broadcast.empty()) << text;
    ASSERT_EQ(box.reply.size(), 1u) << text;
    auto err = json::parse(box.reply[0]);
    EXPECT_EQ(err["type"], "error");
    EXPECT_FALSE(err["message"].get<std::string>().empty());
    EXPECT_EQ(err["payload"], payload) << text;
  };
  check(R"({"type":"nonsense"})", json{{"type", "nonsense"}});
  check(R"({"type":"action","action":"jump"})", json{{"type", "action"}, {"action", "jump"}});
  check(R"({"type":"action"})", json{{"type", "action"}});
  check(R"([1,2])", json::array({1, 2}));
  check("not json", "not json");
  check(R"({"type":"config","max_depth":0})", json{{"type", "config"}, {"max_depth", 0}});
  check(R"({"type":"config","colour":"red"})", json{{"type", "config"}, {"colour", "red"}});
  check(R"({"type":"config","profile":"/nonexistent/profile.json"})",
        json{{"type", "config"}, {"profile", "/nonexistent/profile.json"}});
  EXPECT_EQ(s.snapshot(), before);
  // Still alive.
  EXPECT_EQ(json::parse(s.handle_client_message(action("scroll")).broadcast[0])["seq"], 1);
}

TEST(Session, ConfigSwitchesFocusAndProfile) {
  int loads = 0;
  Session s(profile(), desktop(), StepClock{}, [&](const std::string& path) {
    ++loads;
    EXPECT_EQ(path, "other");
    auto p = builtin_profile();
    p.pointer_max_depth = 3;
    return std::make_shared<const Profile>(std::move(p));
  });
  s.handle_client_message(action("scroll"));
  auto box = s.handle_client_message(json{{"type", "config"}, {"focus", "mediaplayer"}}.dump());
  auto snap = json::parse(box.broadcast.back());
  EXPECT_EQ(snap["app"], "mediaplayer");
  EXPECT_EQ(snap["keyboard"]["highlighted"], 0);
  EXPECT_EQ(&s.engine().layout(), &layout_for(*profile(), "mediaplayer"));

  snap = json::parse(s.handle_client_message(json{{"type", "config"}, {"profile", "other"}}.dump()).broadcast.back());
  EXPECT_EQ(loads, 1);
  EXPECT_EQ(snap["pointer"]["max_depth"], 3);
  EXPECT_EQ(snap["app"], "mediaplayer");
  EXPECT_EQ(snap["seq"], 3);
}

TEST(Session, ClockNeverRunsBackwards) {
  auto t = std::make_shared<Millis>(5000);
  Session s(profile(), desktop(), [t] { return *t; });
  s.handle_client_message(action("scroll"));
  *t = 100;
  s.handle_client_message(action("scroll"));
  EXPECT_EQ(s.now(), 5000);
}

TEST(Session, DoubleClickOnIconChangesLayout) {
  Session s(profile(), desktop(), StepClock{});
  const auto& kb = s.engine().layout();
  NodePath leaf;
  for (const auto& p : leaf_paths(kb)) {
    if (*node_at(kb, p)->payload == KeyPayload{SwitchToPointer{}}) leaf = p;
  }
  for (auto a : witness_sequence(kb, leaf)) s.handle_client_message(action(to_string(a)));
  for (auto a : pointer_navigation(s.engine().pointer().screen(), 70, 190, 7)) {
    s.handle_client_message(action(to_string(a)));
  }
  s.handle_client_message(action("zoom_in"));
  auto msgs = parse_all(s.handle_client_message(action("zoom_in")).broadcast);
  ASSERT_EQ(msgs.size(), 2u);
  EXPECT_EQ(msgs[0]["click"], "double");
  EXPECT_EQ(msgs[1]["app"], "mediaplayer");
  EXPECT_EQ(s.desktop().focused_app, "mediaplayer");
}

}  // namespace
}  // namespace mind
