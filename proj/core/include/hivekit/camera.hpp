#pragma once

#include <span>
#include <vector>

#include "hivekit/types.hpp"

namespace hivekit {

/// World rectangle seen by a grid camera. Row 0 is the top (y = y_max).
struct CameraView {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;
};

constexpr double kLinkHalfWidth = 0.02;  // meters

/// Square view centered on the robot base covering 1.2x the total reach.
CameraView default_camera_view(const RobotModelSpec& model);

/// Occupancy raster, row-major, width * height values in [0, 1]. A cell is
/// sampled at its center: 1.0 if within kLinkHalfWidth of a link segment,
/// 1 - color_index / palette_size inside a disc (discs drawn over links),
/// else 0.
std::vector<double> rasterize_scene(std::span<const Vec2> link_points, std::span<const SimObject> objects,
                                    const CameraView& view, std::uint32_t width, std::uint32_t height);

/// Center of cell (col, row) in world coordinates.
Vec2 cell_center(const CameraView& view, std::uint32_t width, std::uint32_t height, std::uint32_t col,
                 std::uint32_t row);

}  // namespace hivekit
