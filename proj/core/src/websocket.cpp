#include "hivekit/websocket.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <random>
#include <vector>

#include "hivekit/error.hpp"
#include "hivekit/rng.hpp"

namespace hivekit::ws {

namespace {

constexpr std::size_t kMaxMessage = 1 << 20;
constexpr std::size_t kMaxHeader = 8192;
constexpr net::Millis kIoTimeout{2000};

std::string base64(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

/// Reads an HTTP head up to the blank line.
std::string read_http_head(net::Socket& sock, net::Millis timeout) {
  std::string head;
  std::uint8_t c = 0;
  while (head.size() < kMaxHeader) {
    sock.recv_exact(std::span(&c, 1), timeout);
    head.push_back(static_cast<char>(c));
    if (head.size() >= 4 && head.compare(head.size() - 4, 4, "\r\n\r\n") == 0) return head;
  }
  throw ProtocolError("HTTP header too large");
}

/// Header fields keyed by lower-cased name; the first line is under "".
std::vector<std::pair<std::string, std::string>> parse_head(const std::string& head) {
  std::vector<std::pair<std::string, std::string>> fields;
  std::size_t pos = 0;
  bool first = true;
  while (pos < head.size()) {
    const auto eol = head.find("\r\n", pos);
    if (eol == std::string::npos || eol == pos) break;
    const std::string line = head.substr(pos, eol - pos);
    pos = eol + 2;
    if (first) {
      fields.emplace_back("", line);
      first = false;
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    fields.emplace_back(lower(trim(line.substr(0, colon))), trim(line.substr(colon + 1)));
  }
  return fields;
}

const std::string* field(const std::vector<std::pair<std::string, std::string>>& f, std::string_view name) {
  for (const auto& [k, v] : f) {
    if (k == name) return &v;
  }
  return nullptr;
}

}  // namespace

std::string accept_key(std::string_view client_key) {
  const std::string in = std::string(client_key) + "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";
  std::array<std::uint8_t, 20> digest{};
  unsigned int len = 0;
  if (EVP_Digest(in.data(), in.size(), digest.data(), &len, EVP_sha1(), nullptr) != 1) {
    throw Error("SHA-1 computation failed");
  }
  return base64(digest);
}

WebSocket::WebSocket(WebSocket&& o) noexcept
    : sock_(std::move(o.sock_)), client_(o.client_), closed_(o.closed_), mask_counter_(o.mask_counter_) {}

WebSocket WebSocket::accept_upgrade(net::Socket sock, net::Millis timeout) {
  const auto fields = parse_head(read_http_head(sock, timeout));
  const auto* upgrade = field(fields, "upgrade");
  const auto* key = field(fields, "sec-websocket-key");
  if (fields.empty() || fields[0].second.rfind("GET ", 0) != 0 || !upgrade || lower(*upgrade) != "websocket" ||
      !key) {
    try {
      sock.send_all(std::string_view(
          "HTTP/1.1 400 Bad Request\r\nContent-Type: text/plain\r\nConnection: close\r\n\r\n"
          "expected a WebSocket upgrade\n"));
    } catch (const Error&) {
    }
    throw ProtocolError("not a WebSocket upgrade request");
  }
  const std::string reply = "HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                            "Sec-WebSocket-Accept: " +
                            accept_key(*key) + "\r\n\r\n";
  sock.send_all(std::string_view(reply));
  return WebSocket(std::move(sock), false);
}

WebSocket WebSocket::connect(const std::string& host, std::uint16_t port, const std::string& path,
                             net::Millis timeout) {
  auto sock = net::connect_tcp(host, port, timeout);
  std::array<std::uint8_t, 16> nonce{};
  std::random_device rd;
  for (auto& b : nonce) b = static_cast<std::uint8_t>(rd());
  const std::string key = base64(nonce);
  const std::string req = "GET " + path + " HTTP/1.1\r\nHost: " + host + ":" + std::to_string(port) +
                          "\r\nUpgrade: websocket\r\nConnection: Upgrade\r\nSec-WebSocket-Key: " + key +
                          "\r\nSec-WebSocket-Version: 13\r\n\r\n";
  sock.send_all(std::string_view(req));
  const auto fields = parse_head(read_http_head(sock, timeout));
  if (fields.empty() || fields[0].second.find(" 101") == std::string::npos) {
    throw ProtocolError("server refused the WebSocket upgrade");
  }
  const auto* acc = field(fields, "sec-websocket-accept");
  if (!acc || *acc != accept_key(key)) throw ProtocolError("bad Sec-WebSocket-Accept");
  WebSocket ws(std::move(sock), true);
  ws.mask_counter_ = (static_cast<std::uint64_t>(rd()) << 32) | rd();
  return ws;
}

void WebSocket::send_frame(std::uint8_t opcode, std::string_view payload) {
  std::vector<std::uint8_t> f;
  f.push_back(static_cast<std::uint8_t>(0x80 | opcode));
  const std::uint8_t mask_bit = client_ ? 0x80 : 0x00;
  const auto n = payload.size();
  if (n < 126) {
    f.push_back(static_cast<std::uint8_t>(mask_bit | n));
  } else if (n <= 0xFFFF) {
    f.push_back(mask_bit | 126);
    f.push_back(static_cast<std::uint8_t>(n >> 8));
    f.push_back(static_cast<std::uint8_t>(n));
  } else {
    f.push_back(mask_bit | 127);
    for (int s = 56; s >= 0; s -= 8) f.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(n) >> s));
  }
  std::lock_guard lk(send_mu_);
  std::array<std::uint8_t, 4> mask{};
  if (client_) {
    const auto m = CounterRng::finalize(++mask_counter_);
    for (int i = 0; i < 4; ++i) mask[i] = static_cast<std::uint8_t>(m >> (8 * i));
    f.insert(f.end(), mask.begin(), mask.end());
  }
  const auto start = f.size();
  f.insert(f.end(), payload.begin(), payload.end());
  if (client_) {
    for (std::size_t i = 0; i < n; ++i) f[start + i] ^= mask[i % 4];
  }
  sock_.send_all(f);
}

void WebSocket::send_text(std::string_view text) { send_frame(0x1, text); }

RecvStatus WebSocket::recv_text(std::string& out, net::Millis timeout) {
  if (closed_) return RecvStatus::Closed;
  out.clear();
  bool in_message = false;
  while (true) {
    if (!in_message && !sock_.wait_readable(timeout)) return RecvStatus::Timeout;
    std::array<std::uint8_t, 2> h{};
    try {
      sock_.recv_exact(h, kIoTimeout);
    } catch (const ConnectionError&) {
      closed_ = true;
      return RecvStatus::Closed;
    }
    const bool fin = h[0] & 0x80;
    const std::uint8_t opcode = h[0] & 0x0F;
    const bool masked = h[1] & 0x80;
    std::uint64_t len = h[1] & 0x7F;
    if (len == 126) {
      std::array<std::uint8_t, 2> b{};
      sock_.recv_exact(b, kIoTimeout);
      len = (static_cast<std::uint64_t>(b[0]) << 8) | b[1];
    } else if (len == 127) {
      std::array<std::uint8_t, 8> b{};
      sock_.recv_exact(b, kIoTimeout);
      len = 0;
      for (auto x : b) len = (len << 8) | x;
    }
    if (masked == client_) throw ProtocolError(client_ ? "server frames must not be masked" : "client frames must be masked");
    if (len > kMaxMessage || out.size() + len > kMaxMessage) throw ProtocolError("WebSocket message too large");
    std::array<std::uint8_t, 4> mask{};
    if (masked) sock_.recv_exact(mask, kIoTimeout);
    std::vector<std::uint8_t> payload(len);
    if (len) sock_.recv_exact(payload, kIoTimeout);
    if (masked) {
      for (std::size_t i = 0; i < payload.size(); ++i) payload[i] ^= mask[i % 4];
    }

    switch (opcode) {
      case 0x8:  // close
        if (!closed_) {
          try {
            send_frame(0x8, std::string_view(reinterpret_cast<const char*>(payload.data()),
                                             std::min<std::size_t>(payload.size(), 2)));
          } catch (const Error&) {
          }
        }
        closed_ = true;
        return RecvStatus::Closed;
      case 0x9:  // ping
        send_frame(0xA, std::string_view(reinterpret_cast<const char*>(payload.data()), payload.size()));
        continue;
      case 0xA:  // pong
        continue;
      case 0x0:
        if (!in_message) throw ProtocolError("continuation frame without a message");
        break;
      case 0x1:
      case 0x2:
        if (in_message) throw ProtocolError("new message inside a fragmented message");
        in_message = true;
        break;
      default:
        throw ProtocolError("unknown WebSocket opcode " + std::to_string(opcode));
    }
    out.append(payload.begin(), payload.end());
    if (fin) return RecvStatus::Message;
  }
}

void WebSocket::close(std::uint16_t code) {
  if (!closed_) {
    const char payload[2] = {static_cast<char>(code >> 8), static_cast<char>(code & 0xFF)};
    try {
      send_frame(0x8, std::string_view(payload, 2));
    } catch (const Error&) {
    }
    closed_ = true;
  }
  sock_.shutdown();
}

}  // namespace hivekit::ws
