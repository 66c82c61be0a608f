#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>

#include "hivekit/net.hpp"

namespace hivekit::ws {

/// Sec-WebSocket-Accept value for a client key (RFC 6455 section 4.2.2).
std::string accept_key(std::string_view client_key);

enum class RecvStatus { Message, Timeout, Closed };

/// Text-message WebSocket endpoint over a connected TCP socket. Server side
/// requires masked client frames; client side masks what it sends. Ping is
/// answered with pong, fragmented messages are reassembled, binary messages
/// are delivered like text.
class WebSocket {
 public:
  /// Reads the HTTP upgrade request and answers 101. Throws ProtocolError
  /// (after sending 400) when the request is not a WebSocket upgrade.
  static WebSocket accept_upgrade(net::Socket sock, net::Millis timeout);
  /// Connects and performs the client handshake for `path`.
  static WebSocket connect(const std::string& host, std::uint16_t port, const std::string& path,
                           net::Millis timeout);

  WebSocket(WebSocket&& o) noexcept;
  WebSocket& operator=(WebSocket&&) = delete;

  /// Safe to call from several threads.
  void send_text(std::string_view text);
  /// Waits up to `timeout` for the start of a message; once a frame starts
  /// the rest of it must arrive within the I/O timeout.
  RecvStatus recv_text(std::string& out, net::Millis timeout);
  /// Sends a close frame (best effort) and shuts the socket down.
  void close(std::uint16_t code = 1000);
  /// Unblocks a reader on another thread without sending anything.
  void shutdown() { sock_.shutdown(); }

 private:
  WebSocket(net::Socket sock, bool client) : sock_(std::move(sock)), client_(client) {}
  void send_frame(std::uint8_t opcode, std::string_view payload);

  net::Socket sock_;
  bool client_ = false;
  bool closed_ = false;
  std::mutex send_mu_;
  std::uint64_t mask_counter_ = 0;
};

}  // namespace hivekit::ws
