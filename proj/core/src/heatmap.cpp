#include "archmark/heatmap.hpp"

#include <algorithm>
#include <cmath>

#include "archmark/error.hpp"

namespace archmark {

double gaussian_target(double x, double y, const Vec2& center, double sigma_px) {
  const double dx = x - center.x();
  const double dy = y - center.y();
  return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma_px * sigma_px));
}

void write_gaussian(std::span<float> map, int width, int height, const Vec2& center, double sigma_px) {
  // Separable: exp(-(dx^2 + dy^2)/2s^2) = gx(x) * gy(y).
  std::vector<double> gx(static_cast<std::size_t>(width));
  const double denom = 2.0 * sigma_px * sigma_px;
  for (int x = 0; x < width; ++x) {
    const double dx = x - center.x();
    gx[static_cast<std::size_t>(x)] = std::exp(-dx * dx / denom);
  }
  for (int y = 0; y < height; ++y) {
    const double dy = y - center.y();
    const double gy = std::exp(-dy * dy / denom);
    float* row = map.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) row[x] = static_cast<float>(gx[static_cast<std::size_t>(x)] * gy);
  }
}

HeatmapStack make_targets(const CameraView& view, const LandmarkSet& landmarks, const RenderedView& rendered,
                          double sigma_px, double visibility_epsilon_mm) {
  if (!(sigma_px > 0.0)) throw Error(ErrorCode::InvalidParams, "sigma_px must be > 0");
  HeatmapStack stack(view.height, view.width);
  for (int k = 0; k < kLandmarkCount; ++k) {
    const auto& lm = landmarks.at(k + 1);
    if (!lm.present || !is_visible(rendered, lm.position, visibility_epsilon_mm)) continue;
    const auto proj = project_point(view, lm.position);
    write_gaussian(stack.channel(k), stack.width, stack.height, proj.pixel, sigma_px);
    stack.target_visible[static_cast<std::size_t>(k)] = true;
  }
  return stack;
}

namespace {

// Offset in [-0.5, 0.5] of the vertex of the parabola through the logs.
double log_parabola_offset(double left, double center, double right) {
  const double a = std::log(center) - std::log(left);
  const double b = std::log(center) - std::log(right);
  if (a + b <= 0.0) return 0.0;
  return (a - b) / (2.0 * (a + b));
}

}  // namespace

PeakDetection extract_peak(std::span<const float> map, int width, int height, double min_confidence) {
  if (width <= 0 || height <= 0 || map.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::ShapeMismatch, "heatmap size does not match its dimensions");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < map.size(); ++i) {
    if (map[i] > map[best]) best = i;
  }
  const double peak = map[best];
  PeakDetection det;
  if (!(peak > 0.0) || peak < min_confidence) return det;  // confidence 0, found false

  const int px = static_cast<int>(best % static_cast<std::size_t>(width));
  const int py = static_cast<int>(best / static_cast<std::size_t>(width));
  auto at = [&](int x, int y) { return static_cast<double>(map[static_cast<std::size_t>(y) * width + x]); };

  // Centroid over the clipped 5x5 window (negative values ignored).
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (int y = std::max(0, py - 2); y <= std::min(height - 1, py + 2); ++y) {
    for (int x = std::max(0, px - 2); x <= std::min(width - 1, px + 2); ++x) {
      const double v = std::max(0.0, at(x, y));
      sw += v;
      sx += v * x;
      sy += v * y;
    }
  }
  double u = sx / sw;
  double v = sy / sw;

  if (px > 0 && px < width - 1 && at(px - 1, py) > 0.0 && at(px + 1, py) > 0.0) {
    u = px + log_parabola_offset(at(px - 1, py), peak, at(px + 1, py));
  }
  if (py > 0 && py < height - 1 && at(px, py - 1) > 0.0 && at(px, py + 1) > 0.0) {
    v = py + log_parabola_offset(at(px, py - 1), peak, at(px, py + 1));
  }

  det.pixel = {u, v};
  det.confidence = peak;
  det.found = true;
  return det;
}

}  // namespace archmark
