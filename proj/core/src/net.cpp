#include "hivekit/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "hivekit/error.hpp"

namespace hivekit::net {

namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

int poll_one(int fd, short events, Millis timeout) {
  pollfd p{fd, events, 0};
  while (true) {
    const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc < 0 && errno == EINTR) continue;
    if (rc < 0) throw ConnectionError(errno_text("poll"));
    return rc;
  }
}

}  // namespace

Socket& Socket::operator=(Socket&& o) noexcept {
  if (this != &o) {
    close();
    fd_ = std::exchange(o.fd_, -1);
  }
  return *this;
}

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void Socket::shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Socket::send_all(std::span<const std::uint8_t> bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const auto n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ConnectionError(errno_text("send"));
    }
    sent += static_cast<std::size_t>(n);
  }
}

void Socket::send_all(std::string_view text) {
  send_all(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

bool Socket::wait_readable(Millis timeout) const { return poll_one(fd_, POLLIN, timeout) > 0; }

std::size_t Socket::recv_some(std::span<std::uint8_t> buf, Millis timeout) {
  if (!wait_readable(timeout)) throw TimeoutError("timed out waiting for data");
  while (true) {
    const auto n = ::recv(fd_, buf.data(), buf.size(), 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ConnectionError(errno_text("recv"));
    }
    return static_cast<std::size_t>(n);
  }
}

void Socket::recv_exact(std::span<std::uint8_t> buf, Millis timeout) {
  std::size_t got = 0;
  while (got < buf.size()) {
    const auto n = recv_some(buf.subspan(got), timeout);
    if (n == 0) throw ConnectionError("connection closed by peer");
    got += n;
  }
}

void Socket::set_nodelay() {
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

std::pair<std::string, std::uint16_t> split_endpoint(const std::string& endpoint) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string::npos || colon == 0) throw ValidationError("endpoint must be host:port");
  const auto port_text = endpoint.substr(colon + 1);
  unsigned long port = 0;
  try {
    std::size_t used = 0;
    port = std::stoul(port_text, &used);
    if (used != port_text.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ValidationError("bad port in endpoint '" + endpoint + "'");
  }
  if (port == 0 || port > 65535) throw ValidationError("port out of range in endpoint '" + endpoint + "'");
  return {endpoint.substr(0, colon), static_cast<std::uint16_t>(port)};
}

Socket connect_tcp(const std::string& host, std::uint16_t port, Millis timeout) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const auto port_text = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), port_text.c_str(), &hints, &res); rc != 0) {
    throw ConnectionError("cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  Socket sock(::socket(res->ai_family, res->ai_socktype, res->ai_protocol));
  if (!sock.valid()) {
    ::freeaddrinfo(res);
    throw ConnectionError(errno_text("socket"));
  }
  const int flags = ::fcntl(sock.fd(), F_GETFL, 0);
  ::fcntl(sock.fd(), F_SETFL, flags | O_NONBLOCK);
  const int rc = ::connect(sock.fd(), res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc < 0 && errno != EINPROGRESS) {
    throw ConnectionError("connect to " + host + ":" + port_text + " failed: " + std::strerror(errno));
  }
  if (rc < 0) {
    if (poll_one(sock.fd(), POLLOUT, timeout) == 0) {
      throw TimeoutError("connect to " + host + ":" + port_text + " timed out");
    }
    int err = 0;
    socklen_t len = sizeof(err);
    ::getsockopt(sock.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) {
      throw ConnectionError("connect to " + host + ":" + port_text + " failed: " + std::strerror(err));
    }
  }
  ::fcntl(sock.fd(), F_SETFL, flags);
  sock.set_nodelay();
  return sock;
}

Listener::Listener(std::uint16_t port, const std::string& host) {
  sock_ = Socket(::socket(AF_INET, SOCK_STREAM, 0));
  if (!sock_.valid()) throw ConnectionError(errno_text("socket"));
  int one = 1;
  ::setsockopt(sock_.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) throw ConnectionError("bad bind address " + host);
  if (::bind(sock_.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    throw ConnectionError("bind " + host + ":" + std::to_string(port) + " failed: " + std::strerror(errno));
  }
  if (::listen(sock_.fd(), 8) < 0) throw ConnectionError(errno_text("listen"));
  socklen_t len = sizeof(addr);
  ::getsockname(sock_.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

std::optional<Socket> Listener::accept(Millis timeout) {
  if (!sock_.valid() || poll_one(sock_.fd(), POLLIN, timeout) == 0) return std::nullopt;
  const int fd = ::accept(sock_.fd(), nullptr, nullptr);
  if (fd < 0) return std::nullopt;
  Socket s(fd);
  s.set_nodelay();
  return s;
}

}  // namespace hivekit::net
