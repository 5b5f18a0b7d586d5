#include <csignal>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mind/gateway_server.hpp"
#include "mind/planner.hpp"

int main(int argc, char** argv) {
  using namespace mind;
  CLI::App app{"WebSocket session gateway for the three-action engine"};
  std::string profile_path = "profiles/default/profile.json", listen = "127.0.0.1:7070", task_path;
  app.add_option("--profile", profile_path, "Profile file")->capture_default_str();
  app.add_option("--listen", listen, "host:port to bind")->capture_default_str();
  app.add_option("--desktop", task_path, "Task script whose screen and icons make up the mock desktop");
  CLI11_PARSE(app, argc, argv);

  try {
    auto profile = std::make_shared<const Profile>(load_profile(profile_path));
    MockDesktop desktop = task_path.empty() ? MockDesktop{} : desktop_for(load_task(task_path));
    Session session(profile, std::move(desktop), steady_session_clock());
    net::io_context ioc;
    GatewayServer server(ioc, parse_listen(listen), session);
    server.start();
    net::signal_set signals(ioc, SIGINT, SIGTERM);
    signals.async_wait([&](const boost::system::error_code&, int) { server.stop(); });
    std::cerr << "listening on " << listen.substr(0, listen.rfind(':')) << ':' << server.port() << '\n';
    ioc.run();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
