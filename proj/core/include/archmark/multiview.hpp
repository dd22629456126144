#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "archmark/mesh_io.hpp"

namespace archmark {

using Mat3 = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;

enum class Projection { Orthographic, Perspective };

/// Virtual camera. Camera space is p' = R p + t; +z' points into the scene.
/// Pixel (i, j) has its center at continuous coordinates (i, j).
struct CameraView {
  Mat3 rotation = Mat3::Identity();  // world -> camera, orthonormal
  Vec3 translation = Vec3::Zero();
  Projection projection = Projection::Orthographic;
  double scale = 1.0;  // px/mm (orthographic)
  double focal = 1.0;  // px (perspective)
  int width = 128;
  int height = 128;

  double cx() const { return width / 2.0; }
  double cy() const { return height / 2.0; }
  /// Unit viewing direction (increasing depth) in world coordinates.
  Vec3 view_axis() const { return rotation.transpose().col(2); }
};

/// Throws InvalidParams unless the rotation is orthonormal (1e-9), the image
/// is at least 8x8 and scale/focal are positive.
void validate(const CameraView& view);

struct Projected {
  Vec2 pixel = Vec2::Zero();
  double depth = 0.0;
  bool in_frustum = false;
};

Projected project_point(const CameraView& view, const Vec3& point);

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();  // unit length
};

/// Orthographic: origin on the camera plane (depth 0), direction along the
/// view axis. Perspective: origin at the camera center.
Ray backproject(const CameraView& view, const Vec2& pixel);

/// Row-major H x W image.
template <class T>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, T fill) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  T& operator()(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  const T& operator()(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const Image&) const = default;
};

struct RenderedView {
  CameraView camera;
  Image<double> depth;    // +inf where no surface was hit
  Image<float> shading;   // Lambertian headlight in [0, 1]; 0 where depth is +inf
  Image<std::int32_t> face_id;  // -1 for background
};

struct CameraConfig {
  int image_size = 128;
  double margin = 2.0;       // camera distance = margin * aabb diagonal
  double fill_fraction = 0.9;
  Projection projection = Projection::Orthographic;
  /// Share of views spent on the equatorial ring; the rest go on the
  /// upper-hemisphere Fibonacci cap.
  double ring_fraction = 0.25;
  double cap_min_elevation_deg = 22.0;
};

/// Cameras around the box looking at its center. Throws TooFewViews for
/// n_views < 2 and EmptyMesh for a degenerate box.
std::vector<CameraView> sample_cameras(const Aabb& box, int n_views, const CameraConfig& config = {});

/// Z-buffer rasterization sampled at pixel centers with a top-left fill rule.
/// Equal depths keep the lower face index.
RenderedView rasterize(const CameraView& view, const TriangleMesh& mesh);

/// Depth at a continuous pixel position, bilinear over finite samples.
/// Returns +inf when no covered pixel contributes.
double sample_depth(const RenderedView& rendered, const Vec2& pixel);

bool is_visible(const RenderedView& rendered, const Vec3& point, double epsilon_mm);

}  // namespace archmark
