#include "hivekit/camera.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hivekit/sim.hpp"

namespace hivekit {

namespace {

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

struct CellRange {
  std::uint32_t col_lo, col_hi, row_lo, row_hi;  // inclusive-exclusive
  bool empty() const { return col_lo >= col_hi || row_lo >= row_hi; }
};

// Cells whose centers can fall inside the world-space box [lo, hi].
CellRange cells_covering(const CameraView& view, std::uint32_t width, std::uint32_t height, Vec2 lo, Vec2 hi) {
  const double cw = (view.x_max - view.x_min) / width;
  const double ch = (view.y_max - view.y_min) / height;
  auto clamp_idx = [](double v, std::uint32_t n) {
    return static_cast<std::uint32_t>(std::clamp(v, 0.0, static_cast<double>(n)));
  };
  CellRange r;
  r.col_lo = clamp_idx(std::floor((lo.x - view.x_min) / cw - 0.5), width);
  r.col_hi = clamp_idx(std::ceil((hi.x - view.x_min) / cw - 0.5) + 1, width);
  r.row_lo = clamp_idx(std::floor((view.y_max - hi.y) / ch - 0.5), height);
  r.row_hi = clamp_idx(std::ceil((view.y_max - lo.y) / ch - 0.5) + 1, height);
  return r;
}

}  // namespace

CameraView default_camera_view(const RobotModelSpec& model) {
  const double reach = std::accumulate(model.link_lengths.begin(), model.link_lengths.end(), 0.0);
  const double half = 1.2 * reach;
  return {-half, half, -half, half};
}

Vec2 cell_center(const CameraView& view, std::uint32_t width, std::uint32_t height, std::uint32_t col,
                 std::uint32_t row) {
  const double cw = (view.x_max - view.x_min) / width;
  const double ch = (view.y_max - view.y_min) / height;
  return {view.x_min + (col + 0.5) * cw, view.y_max - (row + 0.5) * ch};
}

std::vector<double> rasterize_scene(std::span<const Vec2> link_points, std::span<const SimObject> objects,
                                    const CameraView& view, std::uint32_t width, std::uint32_t height) {
  std::vector<double> image(static_cast<std::size_t>(width) * height, 0.0);

  for (std::size_t k = 1; k < link_points.size(); ++k) {
    const Vec2 a = link_points[k - 1];
    const Vec2 b = link_points[k];
    const Vec2 lo{std::min(a.x, b.x) - kLinkHalfWidth, std::min(a.y, b.y) - kLinkHalfWidth};
    const Vec2 hi{std::max(a.x, b.x) + kLinkHalfWidth, std::max(a.y, b.y) + kLinkHalfWidth};
    const auto r = cells_covering(view, width, height, lo, hi);
    if (r.empty()) continue;
    for (std::uint32_t row = r.row_lo; row < r.row_hi; ++row) {
      for (std::uint32_t col = r.col_lo; col < r.col_hi; ++col) {
        if (segment_distance(cell_center(view, width, height, col, row), a, b) <= kLinkHalfWidth) {
          image[static_cast<std::size_t>(row) * width + col] = 1.0;
        }
      }
    }
  }

  for (const auto& obj : objects) {
    const double shade = 1.0 - static_cast<double>(obj.color_index) / physics::kPaletteSize;
    const Vec2 lo{obj.position.x - obj.radius, obj.position.y - obj.radius};
    const Vec2 hi{obj.position.x + obj.radius, obj.position.y + obj.radius};
    const auto r = cells_covering(view, width, height, lo, hi);
    if (r.empty()) continue;
    for (std::uint32_t row = r.row_lo; row < r.row_hi; ++row) {
      for (std::uint32_t col = r.col_lo; col < r.col_hi; ++col) {
        if (norm(cell_center(view, width, height, col, row) - obj.position) <= obj.radius) {
          image[static_cast<std::size_t>(row) * width + col] = shade;
        }
      }
    }
  }
  return image;
}

}  // namespace hivekit
