#include <gtest/gtest.h>

#include <thread>

#include "hivekit/error.hpp"
#include "hivekit/net.hpp"
#include "hivekit/websocket.hpp"
#include "oracle_values.hpp"

using namespace hivekit;
using namespace std::chrono_literals;

TEST(WebSocket, AcceptKeyMatchesRfcExample) {
  EXPECT_EQ(ws::accept_key("dGhlIHNhbXBsZSBub25jZQ=="), oracle::kWsAcceptForSampleNonce);
}

TEST(WebSocket, EchoesMessagesOfAllSizes) {
  net::Listener listener(0);
  std::thread server([&] {
    auto sock = listener.accept(2000ms);
    ASSERT_TRUE(sock.has_value());
    auto w = ws::WebSocket::accept_upgrade(std::move(*sock), 2000ms);
    std::string msg;
    while (w.recv_text(msg, 2000ms) == ws::RecvStatus::Message) w.send_text(msg);
  });
  auto client = ws::WebSocket::connect("127.0.0.1", listener.port(), "/", 2000ms);
  for (std::size_t n : {0u, 1u, 125u, 126u, 65535u, 65536u, 300000u}) {
    std::string payload(n, 'x');
    for (std::size_t k = 0; k < n; ++k) payload[k] = static_cast<char>('a' + k % 26);
    client.send_text(payload);
    std::string back;
    ASSERT_EQ(client.recv_text(back, 2000ms), ws::RecvStatus::Message);
    EXPECT_EQ(back, payload) << n;
  }
  std::string none;
  EXPECT_EQ(client.recv_text(none, 50ms), ws::RecvStatus::Timeout);
  client.close();
  server.join();
}

TEST(WebSocket, PlainHttpGets400) {
  net::Listener listener(0);
  std::thread server([&] {
    auto sock = listener.accept(2000ms);
    ASSERT_TRUE(sock.has_value());
    EXPECT_THROW(ws::WebSocket::accept_upgrade(std::move(*sock), 2000ms), ProtocolError);
  });
  auto sock = net::connect_tcp("127.0.0.1", listener.port(), 2000ms);
  sock.send_all(std::string_view("GET / HTTP/1.1\r\nHost: x\r\n\r\n"));
  std::uint8_t buf[256];
  const auto n = sock.recv_some(buf, 2000ms);
  const std::string reply(reinterpret_cast<char*>(buf), n);
  EXPECT_EQ(reply.rfind("HTTP/1.1 400", 0), 0u) << reply;
  server.join();
}
