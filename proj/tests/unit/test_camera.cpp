#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "hivekit/camera.hpp"
#include "hivekit/sim.hpp"

using namespace hivekit;

namespace {

RobotModelSpec reach_arm() {
  RobotModelSpec m;
  m.link_lengths = {0.5, 0.4};
  m.joint_limits = {{-3, 3}, {-2.8, 2.8}};
  m.torque_limits = {20, 20};
  m.initial_joint_pos = {0, 0};
  return m;
}

// Plain per-pixel test, written without the rasterizer's bounding boxes.
bool inside_disc(double px, double py, const SimObject& o) {
  const double dx = px - o.position.x, dy = py - o.position.y;
  return dx * dx + dy * dy <= o.radius * o.radius;
}

}  // namespace

TEST(Camera, DefaultViewCoversReach) {
  const auto v = default_camera_view(reach_arm());
  EXPECT_DOUBLE_EQ(v.x_max, 1.2 * 0.9);
  EXPECT_DOUBLE_EQ(v.x_min, -1.2 * 0.9);
  EXPECT_DOUBLE_EQ(v.y_max, 1.2 * 0.9);
  EXPECT_DOUBLE_EQ(v.y_min, -1.2 * 0.9);
}

TEST(Camera, CellCentersRowZeroIsTop) {
  const CameraView v{-1, 1, -1, 1};
  const auto c = cell_center(v, 4, 4, 0, 0);
  EXPECT_DOUBLE_EQ(c.x, -0.75);
  EXPECT_DOUBLE_EQ(c.y, 0.75);
  const auto d = cell_center(v, 4, 4, 3, 3);
  EXPECT_DOUBLE_EQ(d.x, 0.75);
  EXPECT_DOUBLE_EQ(d.y, -0.75);
}

TEST(Camera, SingleDiscMatchesPointInCircle) {
  const auto view = default_camera_view(reach_arm());
  const std::uint32_t W = 84, H = 84;
  SimObject o;
  o.position = {0.0, 0.0};
  o.radius = 0.1;
  o.color_index = 0;
  const auto img = rasterize_scene({}, std::span(&o, 1), view, W, H);
  ASSERT_EQ(img.size(), std::size_t{W} * H);
  std::size_t active = 0;
  for (std::uint32_t row = 0; row < H; ++row) {
    for (std::uint32_t col = 0; col < W; ++col) {
      const double px = view.x_min + (col + 0.5) * (view.x_max - view.x_min) / W;
      const double py = view.y_max - (row + 0.5) * (view.y_max - view.y_min) / H;
      const bool expect = inside_disc(px, py, o);
      active += expect;
      ASSERT_EQ(img[row * W + col] > 0.0, expect) << "cell " << col << "," << row;
      if (expect) {
        ASSERT_EQ(img[row * W + col], 1.0);
      }
    }
  }
  // pi r^2 / cell area, roughly.
  const double cell = (view.x_max - view.x_min) / W;
  EXPECT_NEAR(static_cast<double>(active), std::numbers::pi * 0.01 / (cell * cell), 10.0);
}

TEST(Camera, OffCenterDiscsWithShades) {
  const CameraView view{-1, 1, -1, 1};
  const std::uint32_t W = 50, H = 30;
  std::vector<SimObject> objs(3);
  objs[0].position = {0.33, -0.41};
  objs[0].radius = 0.17;
  objs[0].color_index = 3;
  objs[1].position = {-0.8, 0.7};
  objs[1].radius = 0.12;
  objs[1].color_index = 7;
  objs[2].position = {0.98, 0.95};  // partly outside the view
  objs[2].radius = 0.2;
  objs[2].color_index = 1;
  const auto img = rasterize_scene({}, objs, view, W, H);
  for (std::uint32_t row = 0; row < H; ++row) {
    for (std::uint32_t col = 0; col < W; ++col) {
      const double px = -1 + (col + 0.5) * 2.0 / W;
      const double py = 1 - (row + 0.5) * 2.0 / H;
      double expect = 0.0;
      for (const auto& o : objs) {
        if (inside_disc(px, py, o)) expect = 1.0 - o.color_index / 8.0;
      }
      ASSERT_DOUBLE_EQ(img[row * W + col], expect) << col << "," << row;
    }
  }
}

TEST(Camera, LinksAreDrawn) {
  const auto m = reach_arm();
  const std::vector<double> q{0.0, 0.0};
  const auto kin = forward_kinematics(m, q);
  const CameraView view{-1, 1, -1, 1};
  const auto img = rasterize_scene(kin.points, {}, view, 100, 100);
  // Row 49 has centers at y = 0.01, inside the 0.02 half-width of the
  // segment (0,0)-(0.9,0), rounded at both ends.
  for (std::uint32_t col = 0; col < 100; ++col) {
    const double px = -1 + (col + 0.5) * 0.02;
    const double along = std::max({0.0, -px, px - 0.9});
    const bool on = std::hypot(along, 0.01) <= kLinkHalfWidth;
    EXPECT_EQ(img[49 * 100 + col], on ? 1.0 : 0.0) << col;
  }
  EXPECT_EQ(img[10 * 100 + 50], 0.0);
}
