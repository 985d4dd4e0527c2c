#pragma once

/// TCP transport for the session state machine: one connection per session,
/// newline-delimited JSON messages both ways. The first client message must
/// be Hello; the server replies with the opening StartTopic/Prompt pair and
/// then answers every subsequent message with the session's outputs. Each
/// connection is served by its own thread, so one session's messages are
/// processed strictly in order.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "empath/errors.hpp"
#include "empath/protocol.hpp"
#include "empath/rng.hpp"
#include "empath/session.hpp"

namespace empath {

class SessionServer {
 public:
  struct Options {
    std::string host = "127.0.0.1";
    std::uint16_t port = 7767;  // 0 = pick an ephemeral port
    SessionMode default_mode = SessionMode::Empathetic;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> topic_shuffle_seed;
  };

  SessionServer(Options options, ResponseDb db)
      : options_(std::move(options)), db_(std::move(db)) {
    db_.validate();
  }

  ~SessionServer() { stop(); }

  /// Binds, listens, and starts accepting in a background thread.
  void start() {
    bind_and_listen();
    accept_thread_ = std::thread([this] { accept_loop(); });
  }

  /// Binds, listens, and serves on the calling thread until stop().
  void run() {
    bind_and_listen();
    accept_loop();
  }

  void stop() {
    if (!running_.exchange(false)) return;
    if (listen_fd_ >= 0) {
      ::shutdown(listen_fd_, SHUT_RDWR);
      ::close(listen_fd_);
      listen_fd_ = -1;
    }
    {
      std::lock_guard<std::mutex> lock(mutex_);
      for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    std::vector<std::thread> workers;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      workers.swap(workers_);
    }
    for (std::thread& t : workers)
      if (t.joinable()) t.join();
  }

  std::uint16_t port() const { return port_; }

 private:
  void bind_and_listen() {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw IoError("socket() failed");
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(options_.port);
    if (::inet_pton(AF_INET, options_.host.c_str(), &addr.sin_addr) != 1)
      throw ConfigError("invalid listen address '" + options_.host + "'");
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
      throw IoError("cannot bind " + options_.host + ":" + std::to_string(options_.port));
    if (::listen(listen_fd_, 16) != 0) throw IoError("listen() failed");

    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    running_ = true;
  }

  void accept_loop() {
    while (running_) {
      const int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) {
        if (!running_) break;
        continue;
      }
      std::lock_guard<std::mutex> lock(mutex_);
      client_fds_.push_back(fd);
      workers_.emplace_back([this, fd] { serve_connection(fd); });
    }
  }

  static bool send_all(int fd, const std::string& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
      const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) return false;
      sent += static_cast<std::size_t>(n);
    }
    return true;
  }

  void serve_connection(int fd) {
    std::optional<Session> session;
    std::string buffer;
    char chunk[4096];
    bool open = true;

    const auto reply = [&](const std::vector<ProtocolMessage>& messages) {
      for (const ProtocolMessage& m : messages) {
        if (!send_all(fd, serialize_message(m) + "\n")) {
          open = false;
          return;
        }
        if (std::holds_alternative<EndSessionMsg>(m)) open = false;  // session complete
      }
    };

    while (open && running_) {
      const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t pos = 0;
      while (open) {
        const std::size_t nl = buffer.find('\n', pos);
        if (nl == std::string::npos) break;
        std::string line = buffer.substr(pos, nl - pos);
        pos = nl + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        handle_line(line, session, reply);
      }
      buffer.erase(0, pos);
    }
    ::close(fd);
    std::lock_guard<std::mutex> lock(mutex_);
    std::erase(client_fds_, fd);
  }

  template <typename Reply>
  void handle_line(const std::string& line, std::optional<Session>& session, Reply&& reply) {
    ProtocolMessage msg;
    try {
      msg = parse_message(line);
    } catch (const ParseError& e) {
      const std::string sid = session ? session->id() : std::string("?");
      reply({ErrorMsg{sid, "parse", e.what(), 0.0}});
      return;
    }
    if (!session) {
      const auto* hello = std::get_if<HelloMsg>(&msg);
      if (!hello) {
        reply({ErrorMsg{session_of(msg), "protocol", "first message must be Hello", time_of(msg)}});
        return;
      }
      SessionConfig cfg;
      cfg.mode = hello->mode.value_or(options_.default_mode);
      cfg.seed = Rng::derive(options_.seed, fnv1a(hello->session));
      cfg.topic_shuffle_seed = options_.topic_shuffle_seed;
      session.emplace(hello->session, cfg, &db_);
      reply(session->start(hello->t));
      return;
    }
    reply(session->on_message(msg));
  }

  Options options_;
  ResponseDb db_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::mutex mutex_;
  std::vector<int> client_fds_;
  std::vector<std::thread> workers_;
  std::thread accept_thread_;
};

}  // namespace empath
