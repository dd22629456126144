#pragma once

#include <array>
#include <span>
#include <vector>

#include "archmark/mesh_io.hpp"
#include "archmark/multiview.hpp"

namespace archmark {

/// K per-landmark confidence maps for one view, stored K x H x W row-major.
struct HeatmapStack {
  int channels = kLandmarkCount;
  int height = 0;
  int width = 0;
  std::vector<float> maps;
  int view_id = 0;
  std::array<bool, kLandmarkCount> target_visible{};

  HeatmapStack() = default;
  HeatmapStack(int h, int w, int view = 0)
      : height(h), width(w), maps(static_cast<std::size_t>(kLandmarkCount) * h * w, 0.0f), view_id(view) {}

  std::span<float> channel(int k) {
    return {maps.data() + static_cast<std::size_t>(k) * height * width, static_cast<std::size_t>(height) * width};
  }
  std::span<const float> channel(int k) const {
    return {maps.data() + static_cast<std::size_t>(k) * height * width, static_cast<std::size_t>(height) * width};
  }
};

struct HeatmapConfig {
  double sigma_px = 2.0;
  double min_confidence = 0.25;
  double visibility_epsilon_mm = 1.0;
};

/// Gaussian value of a target centered at `center` for the pixel at (x, y).
double gaussian_target(double x, double y, const Vec2& center, double sigma_px);

/// Gaussian targets at the projected positions of visible landmarks; hidden
/// or absent landmarks get an all-zero map and target_visible = false.
HeatmapStack make_targets(const CameraView& view, const LandmarkSet& landmarks, const RenderedView& rendered,
                          double sigma_px, double visibility_epsilon_mm = HeatmapConfig{}.visibility_epsilon_mm);

/// Overwrites `map` with a unit-peak Gaussian at `center`.
void write_gaussian(std::span<float> map, int width, int height, const Vec2& center, double sigma_px);

struct PeakDetection {
  Vec2 pixel = Vec2::Zero();
  double confidence = 0.0;
  bool found = false;
};

/// Argmax (first in row-major order on ties), then sub-pixel refinement:
/// a three-sample log-parabola fit per axis when the neighbours are positive,
/// otherwise the intensity-weighted centroid of the clipped 5x5 window.
PeakDetection extract_peak(std::span<const float> map, int width, int height, double min_confidence);

}  // namespace archmark
