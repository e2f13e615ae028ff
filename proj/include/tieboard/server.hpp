#pragma once

// Line-delimited JSON over TCP for a board UI. Each connection gets a fresh session built from
// the same config: the server greets with the init record, then answers every event message
// with that event's trace record. Malformed lines get `{"error":"malformed",...}` and do not
// advance the sequence number.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "tieboard/session.hpp"

namespace tieboard {

namespace detail {

inline sockaddr_in resolve_ipv4(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  const std::string h = host == "localhost" ? "127.0.0.1" : host;
  if (inet_pton(AF_INET, h.c_str(), &addr.sin_addr) != 1) {
    fail(ErrorCode::BindError, "`" + host + "` is not an IPv4 address");
  }
  return addr;
}

inline bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

/// Buffered reader yielding one line at a time, without the newline.
class LineReader {
 public:
  explicit LineReader(int fd) : fd_(fd) {}

  std::optional<std::string> next() {
    for (;;) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      char chunk[4096];
      const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        if (buffer_.empty()) return std::nullopt;
        std::string rest;
        rest.swap(buffer_);
        return rest;
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buffer_;
};

}  // namespace detail

/// Answers one protocol line against a driver. Returns the reply line.
inline std::string handle_message(SessionDriver& driver, const std::string& line) {
  try {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      fail(ErrorCode::MalformedMessage, "not a JSON object");
    }
    return driver.apply(event_from_json(j)).dump();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MalformedMessage) throw;
    return nlohmann::json{{"error", "malformed"}, {"message", e.what()}}.dump();
  }
}

class Server {
 public:
  explicit Server(SessionConfig cfg) : cfg_(std::move(cfg)) {
    SessionDriver probe(cfg_);  // surface config errors before accepting anyone
  }
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;
  ~Server() { stop(); }

  /// Binds and listens; port 0 picks a free port. Returns the bound port.
  std::uint16_t listen(const std::string& host, std::uint16_t port) {
    const sockaddr_in addr = detail::resolve_ipv4(host, port);
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) fail(ErrorCode::BindError, std::string("socket: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(listen_fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 16) != 0) {
      const std::string why = std::strerror(errno);
      ::close(listen_fd_);
      listen_fd_ = -1;
      fail(ErrorCode::BindError, "cannot listen on " + host + ":" + std::to_string(port) + ": " + why);
    }
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
    return port_;
  }

  std::uint16_t port() const noexcept { return port_; }

  /// Accept loop; returns once stop() closes the listening socket.
  void serve() {
    while (!stopping_) {
      const int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) {
        if (errno == EINTR) continue;
        break;
      }
      std::lock_guard lock(mutex_);
      if (stopping_) {
        ::close(fd);
        break;
      }
      clients_.insert(fd);
      workers_.emplace_back([this, fd] { session(fd); });
    }
  }

  void start() {
    acceptor_ = std::thread([this] { serve(); });
  }

  void stop() {
    {
      std::lock_guard lock(mutex_);
      if (stopping_.exchange(true)) return;
      if (listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
      for (int fd : clients_) ::shutdown(fd, SHUT_RDWR);
    }
    if (acceptor_.joinable()) acceptor_.join();
    std::vector<std::thread> workers;
    {
      std::lock_guard lock(mutex_);
      workers.swap(workers_);
    }
    for (auto& t : workers) t.join();
    if (listen_fd_ >= 0) ::close(listen_fd_);
    listen_fd_ = -1;
  }

 private:
  void session(int fd) {
    try {
      SessionDriver driver(cfg_);
      detail::LineReader reader(fd);
      if (detail::send_all(fd, driver.init_record().dump() + "\n")) {
        while (auto line = reader.next()) {
          if (line->find_first_not_of(" \t") == std::string::npos) continue;
          if (!detail::send_all(fd, handle_message(driver, *line) + "\n")) break;
        }
      }
    } catch (const std::exception& e) {
      detail::send_all(fd, nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump() + "\n");
    }
    std::lock_guard lock(mutex_);
    clients_.erase(fd);
    ::close(fd);
  }

  SessionConfig cfg_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex mutex_;
  std::set<int> clients_;
  std::vector<std::thread> workers_;
  std::thread acceptor_;
};

/// Minimal blocking client, used by tests and scripted UIs.
class LineClient {
 public:
  LineClient(const std::string& host, std::uint16_t port) {
    const sockaddr_in addr = detail::resolve_ipv4(host, port);
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0 || ::connect(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
      if (fd_ >= 0) ::close(fd_);
      fail(ErrorCode::BindError, "cannot connect to " + host + ":" + std::to_string(port));
    }
    reader_.emplace(fd_);
  }
  LineClient(const LineClient&) = delete;
  LineClient& operator=(const LineClient&) = delete;
  ~LineClient() {
    if (fd_ >= 0) ::close(fd_);
  }

  void send(const std::string& line) {
    if (!detail::send_all(fd_, line + "\n")) fail(ErrorCode::BindError, "connection closed");
  }
  std::optional<std::string> receive() { return reader_->next(); }

 private:
  int fd_ = -1;
  std::optional<detail::LineReader> reader_;
};

}  // namespace tieboard
