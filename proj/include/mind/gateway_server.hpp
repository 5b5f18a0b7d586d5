#pragma once

#include <chrono>
#include <deque>
#include <memory>
#include <set>
#include <string>
#include <utility>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "mind/session.hpp"

namespace mind {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = boost::beast::websocket;
using tcp = net::ip::tcp;

// Milliseconds since construction on the steady clock.
inline Session::Clock steady_session_clock() {
  const auto start = std::chrono::steady_clock::now();
  return [start] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
        .count();
  };
}

// "host:port" -> endpoint. Port 0 asks the OS for a free one.
inline tcp::endpoint parse_listen(const std::string& spec) {
  const auto colon = spec.rfind(':');
  if (colon == std::string::npos || colon == 0) throw ConfigError("listen address must be host:port: " + spec);
  boost::system::error_code ec;
  const auto addr = net::ip::make_address(spec.substr(0, colon), ec);
  if (ec) throw ConfigError("bad listen host: " + spec.substr(0, colon));
  int port = -1;
  try {
    std::size_t used = 0;
    port = std::stoi(spec.substr(colon + 1), &used);
    if (used != spec.size() - colon - 1) port = -1;
  } catch (const std::exception&) {
  }
  if (port < 0 || port > 65535) throw ConfigError("bad listen port: " + spec.substr(colon + 1));
  return {addr, static_cast<unsigned short>(port)};
}

class GatewayServer;

namespace detail {

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, GatewayServer& server) : ws_(std::move(socket)), server_(server) {}

  void start();
  void send(std::shared_ptr<const std::string> frame) {
    queue_.push_back(std::move(frame));
    if (queue_.size() == 1 && open_) write_next();
  }
  void close() {
    if (!open_) return;
    open_ = false;
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void read_next();
  void write_next() {
    ws_.text(true);
    ws_.async_write(net::buffer(*queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->drop();
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write_next();
    });
  }
  void drop();

  websocket::stream<beast::tcp_stream> ws_;
  GatewayServer& server_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  bool open_ = false;
};

}  // namespace detail

// WebSocket front for a Session. Everything runs on one io_context thread,
// so the session is only ever touched from there. A timer delivers the
// click-window tick when a pending click times out with no further input.
class GatewayServer {
 public:
  GatewayServer(net::io_context& ioc, const tcp::endpoint& endpoint, Session& session)
      : ioc_(ioc), acceptor_(ioc), timer_(ioc), session_(session) {
    beast::error_code ec;
    acceptor_.open(endpoint.protocol(), ec);
    if (!ec) acceptor_.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor_.bind(endpoint, ec);
    if (!ec) acceptor_.listen(net::socket_base::max_listen_connections, ec);
    if (ec) throw IoError("cannot listen on " + endpoint.address().to_string() + ":" +
                          std::to_string(endpoint.port()) + ": " + ec.message());
  }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }
  std::size_t client_count() const { return clients_.size(); }

  void start() { accept(); }

  // Safe from any thread.
  void stop() {
    net::post(ioc_, [this] {
      beast::error_code ec;
      acceptor_.close(ec);
      timer_.cancel();
      for (const auto& c : std::set(clients_)) c->close();
      clients_.clear();
    });
  }

  // Called by connections on the io thread.
  void joined(const std::shared_ptr<detail::Connection>& c) {
    clients_.insert(c);
    c->send(std::make_shared<const std::string>(session_.snapshot().dump()));
  }
  void left(const std::shared_ptr<detail::Connection>& c) { clients_.erase(c); }

  void received(const std::shared_ptr<detail::Connection>& from, const std::string& text) {
    auto box = session_.handle_client_message(text);
    for (auto& r : box.reply) from->send(std::make_shared<const std::string>(std::move(r)));
    fan_out(box);
    arm_timer();
  }

 private:
  void accept() {
    acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec == net::error::operation_aborted || !acceptor_.is_open()) return;
      if (!ec) std::make_shared<detail::Connection>(std::move(socket), *this)->start();
      accept();
    });
  }

  void fan_out(Outbox& box) {
    for (auto& b : box.broadcast) {
      auto frame = std::make_shared<const std::string>(std::move(b));
      for (const auto& c : clients_) c->send(frame);
    }
  }

  // Session time is measured from its own clock; the timer only needs the
  // distance from the latest stamp to the deadline.
  void arm_timer() {
    const auto deadline = session_.next_deadline();
    if (!deadline) {
      timer_.cancel();
      return;
    }
    timer_.expires_after(std::chrono::milliseconds(std::max<Millis>(0, *deadline - session_.now())));
    timer_.async_wait([this, d = *deadline](beast::error_code ec) {
      if (ec) return;
      if (session_.next_deadline() != d) return;
      auto box = session_.tick(d);
      fan_out(box);
      arm_timer();
    });
  }

  net::io_context& ioc_;
  tcp::acceptor acceptor_;
  net::steady_timer timer_;
  Session& session_;
  std::set<std::shared_ptr<detail::Connection>> clients_;
};

namespace detail {

inline void Connection::start() {
  ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
  ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
    if (ec) return;
    self->open_ = true;
    self->server_.joined(self);
    self->read_next();
  });
}

inline void Connection::read_next() {
  ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
    if (ec) return self->drop();
    const auto text = beast::buffers_to_string(self->buffer_.data());
    self->buffer_.consume(self->buffer_.size());
    self->server_.received(self, text);
    self->read_next();
  });
}

inline void Connection::drop() {
  if (!open_) return;
  open_ = false;
  server_.left(shared_from_this());
}

}  // namespace detail

}  // namespace mind
