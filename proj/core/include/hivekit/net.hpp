#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace hivekit::net {

using Millis = std::chrono::milliseconds;

/// Owning wrapper over a connected TCP socket.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close(); }

  bool valid() const { return fd_ >= 0; }
  int fd() const { return fd_; }
  void close();
  /// Shuts down both directions so a reader blocked on another thread wakes up.
  void shutdown();

  void send_all(std::span<const std::uint8_t> bytes);
  void send_all(std::string_view text);
  /// Reads at least one byte into `buf`. Returns 0 on orderly close. Throws
  /// TimeoutError when nothing arrives within `timeout`.
  std::size_t recv_some(std::span<std::uint8_t> buf, Millis timeout);
  void recv_exact(std::span<std::uint8_t> buf, Millis timeout);
  /// True when data (or EOF) is readable within `timeout`.
  bool wait_readable(Millis timeout) const;

  void set_nodelay();

 private:
  int fd_ = -1;
};

/// "host:port" -> (host, port). Throws ValidationError on a bad string.
std::pair<std::string, std::uint16_t> split_endpoint(const std::string& endpoint);

/// Throws ConnectionError (refused / unreachable) or TimeoutError.
Socket connect_tcp(const std::string& host, std::uint16_t port, Millis timeout);

class Listener {
 public:
  /// Binds 127.0.0.1:port (0 picks an ephemeral port). Throws ConnectionError.
  explicit Listener(std::uint16_t port, const std::string& host = "127.0.0.1");
  std::uint16_t port() const { return port_; }
  /// Waits up to `timeout` for a connection.
  std::optional<Socket> accept(Millis timeout);
  void close() { sock_.close(); }

 private:
  Socket sock_;
  std::uint16_t port_ = 0;
};

}  // namespace hivekit::net
