#include <fstream>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "mind/gateway_server.hpp"

namespace mind {
namespace {

using nlohmann::json;

const ScreenRect kHd{0, 0, 1920, 1080};

std::shared_ptr<const Profile> profile() {
  static const auto p = std::make_shared<const Profile>(
      builtin_profile(Dictionary{{"hello", 10}, {"help", 7}, {"hermit", 2}}));
  return p;
}

// Server on an ephemeral localhost port, run on its own thread.
struct Running {
  net::io_context ioc;
  Session session;
  GatewayServer server;
  std::thread thread;

  explicit Running(Session::Clock clock = steady_session_clock())
      : session(profile(), MockDesktop{}, std::move(clock)),
        server(ioc, tcp::endpoint(net::ip::make_address("127.0.0.1"), 0), session) {
    server.start();
    thread = std::thread([this] { ioc.run(); });
  }
  ~Running() {
    server.stop();
    thread.join();
  }
};

struct Client {
  net::io_context ioc;
  websocket::stream<tcp::socket> ws{ioc};

  explicit Client(unsigned short port) {
    ws.next_layer().connect(tcp::endpoint(net::ip::make_address("127.0.0.1"), port));
    ws.handshake("127.0.0.1", "/");
    ws.text(true);
  }
  void send(const std::string& text) { ws.write(net::buffer(text)); }
  void act(UserAction a) { send(json{{"type", "action"}, {"action", to_string(a)}}.dump()); }
  json recv() {
    beast::flat_buffer b;
    ws.read(b);
    return json::parse(beast::buffers_to_string(b.data()));
  }
  // Reads until the next snapshot, returning it.
  json next_snapshot(std::vector<json>* skipped = nullptr) {
    for (;;) {
      auto j = recv();
      if (j["type"] == "snapshot") return j;
      if (skipped) skipped->push_back(j);
    }
  }
};

std::vector<UserAction> path_to(const KeyboardLayout& kb, const KeyPayload& payload) {
  for (const auto& leaf : leaf_paths(kb)) {
    if (*node_at(kb, leaf)->payload == payload) return witness_sequence(kb, leaf);
  }
  throw std::logic_error("payload not in layout");
}

TEST(Gateway, FirstMessageIsSnapshot) {
  Running r;
  Client a(r.server.port());
  auto first = a.recv();
  EXPECT_EQ(first["type"], "snapshot");
  EXPECT_EQ(first["seq"], 0);
  a.act(UserAction::Scroll);
  a.act(UserAction::Scroll);
  a.next_snapshot();
  EXPECT_EQ(a.next_snapshot()["seq"], 2);
  // A late joiner starts at the current counter.
  Client b(r.server.port());
  auto late = b.recv();
  EXPECT_EQ(late["type"], "snapshot");
  EXPECT_EQ(late["seq"], 2);
  EXPECT_EQ(late["keyboard"]["highlighted"], 2);
}

TEST(Gateway, ScrollAdvancesHighlight) {
  Running r;
  Client c(r.server.port());
  const int before = c.recv()["keyboard"]["highlighted"];
  c.act(UserAction::Scroll);
  EXPECT_EQ(c.next_snapshot()["keyboard"]["highlighted"], before + 1);
}

TEST(Gateway, ClientsSeeIdenticalStreams) {
  Running r;
  Client a(r.server.port()), b(r.server.port());
  EXPECT_EQ(a.recv(), b.recv());
  const auto actions = path_to(default_layout(), Keystroke{"h"});
  for (auto act : actions) a.act(act);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    std::vector<json> sa, sb;
    auto ja = a.next_snapshot(&sa);
    auto jb = b.next_snapshot(&sb);
    EXPECT_EQ(ja, jb);
    EXPECT_EQ(sa, sb);
  }
}

TEST(Gateway, MalformedInputKeepsSessionAlive) {
  Running r;
  Client a(r.server.port()), b(r.server.port());
  a.recv();
  b.recv();
  a.send(R"({"type":"nonsense"})");
  auto err = a.recv();
  EXPECT_EQ(err["type"], "error");
  EXPECT_EQ(err["payload"], (json{{"type", "nonsense"}}));
  a.send("{{{");
  EXPECT_EQ(a.recv()["type"], "error");
  a.act(UserAction::Scroll);
  auto snap = a.next_snapshot();
  EXPECT_EQ(snap["seq"], 1);
  // The other client never saw the errors.
  EXPECT_EQ(b.recv(), snap);
}

TEST(Gateway, PendingClickTimesOutOnServer) {
  Running r;
  Client c(r.server.port());
  c.recv();
  c.send(R"({"type":"config","max_depth":1})");
  c.next_snapshot();
  for (auto a : path_to(default_layout(), SwitchToPointer{})) c.act(a);
  c.act(UserAction::ZoomIn);
  c.act(UserAction::ZoomIn);
  json snap;
  do {
    snap = c.next_snapshot();
  } while (snap["pointer"]["phase"] != "pending_click");
  // No further input: the server's timer resolves a single click.
  std::vector<json> outputs;
  auto after = c.next_snapshot(&outputs);
  ASSERT_EQ(outputs.size(), 1u);
  EXPECT_EQ(outputs[0]["kind"], "click");
  EXPECT_EQ(outputs[0]["click"], "single");
  EXPECT_EQ(outputs[0]["t"], snap["pointer"]["deadline"]);
  EXPECT_EQ(after["pointer"]["phase"], "navigating");
}

TEST(Gateway, BindFailureIsReported) {
  Running r;
  net::io_context ioc;
  Session s(profile(), MockDesktop{}, steady_session_clock());
  EXPECT_THROW(GatewayServer(ioc, tcp::endpoint(net::ip::make_address("127.0.0.1"), r.server.port()), s),
               IoError);
}

TEST(Gateway, ParseListen) {
  EXPECT_EQ(parse_listen("127.0.0.1:7070").port(), 7070);
  EXPECT_THROW(parse_listen("127.0.0.1"), ConfigError);
  EXPECT_THROW(parse_listen("127.0.0.1:99999"), ConfigError);
  EXPECT_THROW(parse_listen("nohost:1"), ConfigError);
  EXPECT_THROW(parse_listen("127.0.0.1:12x"), ConfigError);
}

// The scripted session of the dispatcher golden log, driven over the wire.
// Actions are 1 s apart; the 5 s pause lets the first click window lapse.
TEST(Gateway, HeadlessEquivalence) {
  std::vector<UserAction> actions;
  std::vector<Millis> stamps;
  Millis t = 0;
  auto add = [&](const std::vector<UserAction>& as) {
    for (auto a : as) {
      actions.push_back(a);
      stamps.push_back(t += 1000);
    }
  };
  const auto kb = default_layout();
  add(path_to(kb, Keystroke{"h"}));
  add(path_to(kb, Keystroke{"i"}));
  add(path_to(kb, KeySequence{"SEND", {"CTRL", "ENTER"}}));
  add(path_to(kb, SwitchToPointer{}));
  add(pointer_navigation(kHd, 1000, 600, 7));
  add({UserAction::ZoomIn});
  t += 5000;
  add(pointer_navigation(kHd, 10, 10, 7));
  add({UserAction::ZoomIn, UserAction::ZoomIn, UserAction::ZoomOut, UserAction::ZoomOut});

  auto next = std::make_shared<std::size_t>(0);
  Running r([stamps, next] { return stamps.at((*next)++); });
  Client c(r.server.port());
  c.recv();
  for (auto a : actions) c.act(a);
  c.send(R"({"type":"end"})");  // the error reply marks the end of the stream
  std::string log;
  for (json m = c.recv(); m["type"] != "error"; m = c.recv()) {
    if (m["type"] == "output") log += m["line"].get<std::string>() + "\n";
  }

  std::ifstream in(std::string(MIND_SOURCE_DIR) + "/tests/golden/dispatcher_session.events");
  ASSERT_TRUE(in);
  std::stringstream expected;
  expected << in.rdbuf();
  EXPECT_EQ(log, expected.str());
}

}  // namespace
}  // namespace mind
