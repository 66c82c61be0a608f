#include "console_sim.hpp"

#include <cmath>
#include <algorithm>

namespace hivekit::testkit {

ConsoleSim::ConsoleSim(std::uint16_t port, const std::string& want)
    : ws_(ws::WebSocket::connect("127.0.0.1", port, "/", std::chrono::milliseconds(2000))) {
  send({{"type", "hello"}, {"want", want}});
}

void ConsoleSim::send(const json& msg) { ws_.send_text(msg.dump()); }

void ConsoleSim::key(const std::string& kind, const std::string& code) {
  send({{"type", "input"}, {"kind", kind}, {"code", code}});
}

void ConsoleSim::axis(const std::string& code, double value) {
  send({{"type", "input"}, {"kind", "axis"}, {"code", code}, {"value", value}});
}

void ConsoleSim::record(const json& m) {
  messages_.push_back(m);
  if (m.value("type", "") != "scene") return;
  Scene s;
  s.time = m["time"];
  for (const auto& p : m["links"]) s.links.push_back({p[0], p[1]});
  s.target = {m["target"][0], m["target"][1]};
  s.success = m["success"];
  s.reward = m["reward"];
  s.step = m["step"];
  s.episode = m["episode"];
  s.received = clock::now();
  scenes_.push_back(s);
  last_scene_ = s;
}

std::optional<ConsoleSim::json> ConsoleSim::read(std::chrono::milliseconds timeout) {
  if (closed_) return std::nullopt;
  std::string text;
  const auto st = ws_.recv_text(text, timeout);
  if (st == ws::RecvStatus::Closed) {
    closed_ = true;
    return std::nullopt;
  }
  if (st == ws::RecvStatus::Timeout) return std::nullopt;
  json m = json::parse(text);
  record(m);
  return m;
}

std::optional<ConsoleSim::json> ConsoleSim::wait_for(const std::string& type, std::chrono::milliseconds timeout,
                                                     const std::string& field, const std::string& value) {
  const auto end = clock::now() + timeout;
  while (clock::now() < end && !closed_) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(end - clock::now());
    auto m = read(std::max(left, std::chrono::milliseconds(1)));
    if (!m || m->value("type", "") != type) continue;
    if (field.empty() || (m->contains(field) && (*m)[field].is_string() && (*m)[field] == value)) return m;
  }
  return std::nullopt;
}

bool ConsoleSim::drive_reach(std::chrono::milliseconds deadline, double gain) {
  const auto end = clock::now() + deadline;
  bool success = false;
  while (clock::now() < end) {
    auto m = read(std::chrono::milliseconds(200));
    if (!m) {
      if (closed_) break;
      continue;
    }
    const std::string type = m->value("type", "");
    if (type == "episode" && m->value("event", "") == "done") break;
    if (type != "scene") continue;
    const auto& s = *last_scene_;
    success = s.success;
    if (s.links.size() != 3) continue;

    const double l1 = std::hypot(s.links[1].x - s.links[0].x, s.links[1].y - s.links[0].y);
    const double l2 = std::hypot(s.links[2].x - s.links[1].x, s.links[2].y - s.links[1].y);
    const double q1 = std::atan2(s.links[1].y, s.links[1].x);
    const double q2 = std::remainder(std::atan2(s.links[2].y - s.links[1].y, s.links[2].x - s.links[1].x) - q1,
                                     2.0 * M_PI);
    const double r2 = s.target.x * s.target.x + s.target.y * s.target.y;
    const double c2 = std::clamp((r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
    const double want2 = std::copysign(std::acos(c2), q2 == 0.0 ? 1.0 : q2);
    const double want1 =
        std::atan2(s.target.y, s.target.x) - std::atan2(l2 * std::sin(want2), l1 + l2 * std::cos(want2));
    axis("axis0", std::clamp(gain * std::remainder(want1 - q1, 2.0 * M_PI), -1.0, 1.0));
    axis("axis1", std::clamp(gain * (want2 - q2), -1.0, 1.0));
  }
  axis("axis0", 0.0);
  axis("axis1", 0.0);
  return success;
}

}  // namespace hivekit::testkit
