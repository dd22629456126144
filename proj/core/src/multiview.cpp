#include "archmark/multiview.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "archmark/error.hpp"

namespace archmark {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Mat3 look_rotation(const Vec3& toward_camera) {
  const Vec3 axis = -toward_camera.normalized();  // camera +z, into the scene
  const Vec3 up_ref = std::abs(axis.z()) > 0.99 ? Vec3::UnitY() : Vec3::UnitZ();
  const Vec3 x = axis.cross(up_ref).normalized();
  const Vec3 y = axis.cross(x);
  Mat3 r;
  r.row(0) = x.transpose();
  r.row(1) = y.transpose();
  r.row(2) = axis.transpose();
  return r;
}

// 2D edge function: twice the signed area of (a, b, p).
inline double edge(double ax, double ay, double bx, double by, double px, double py) {
  return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

// For positively oriented triangles in (u, v) with v pointing down, a
// top edge runs in +u and a left edge runs in -v.
inline bool top_left(double ex, double ey) { return ey < 0.0 || (ey == 0.0 && ex > 0.0); }

}  // namespace

void validate(const CameraView& view) {
  if (!((view.rotation * view.rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-9) ||
      view.rotation.determinant() < 0.0) {
    throw Error(ErrorCode::InvalidParams, "camera rotation is not orthonormal");
  }
  if (view.width < 8 || view.height < 8) throw Error(ErrorCode::InvalidParams, "image must be at least 8x8");
  if (view.projection == Projection::Orthographic ? !(view.scale > 0.0) : !(view.focal > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "scale/focal must be positive");
  }
  if (!view.translation.allFinite()) throw Error(ErrorCode::InvalidParams, "non-finite camera translation");
}

Projected project_point(const CameraView& view, const Vec3& point) {
  const Vec3 cam = view.rotation * point + view.translation;
  Projected out;
  out.depth = cam.z();
  if (view.projection == Projection::Orthographic) {
    out.pixel = {view.cx() + view.scale * cam.x(), view.cy() + view.scale * cam.y()};
  } else {
    if (cam.z() <= 0.0) {
      out.pixel = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
      return out;
    }
    out.pixel = {view.cx() + view.focal * cam.x() / cam.z(), view.cy() + view.focal * cam.y() / cam.z()};
  }
  out.in_frustum = out.depth > 0.0 && out.pixel.x() >= 0.0 && out.pixel.x() <= view.width - 1.0 &&
                   out.pixel.y() >= 0.0 && out.pixel.y() <= view.height - 1.0;
  return out;
}

Ray backproject(const CameraView& view, const Vec2& pixel) {
  const Mat3 rt = view.rotation.transpose();
  Ray ray;
  if (view.projection == Projection::Orthographic) {
    const Vec3 cam((pixel.x() - view.cx()) / view.scale, (pixel.y() - view.cy()) / view.scale, 0.0);
    ray.origin = rt * (cam - view.translation);
    ray.direction = view.view_axis();
  } else {
    const Vec3 dir_cam((pixel.x() - view.cx()) / view.focal, (pixel.y() - view.cy()) / view.focal, 1.0);
    ray.origin = -(rt * view.translation);
    ray.direction = (rt * dir_cam).normalized();
  }
  return ray;
}

std::vector<CameraView> sample_cameras(const Aabb& box, int n_views, const CameraConfig& config) {
  if (n_views < 2) throw Error(ErrorCode::TooFewViews, "need at least 2 views, got " + std::to_string(n_views));
  const double diag = box.diagonal();
  if (!(diag > 0.0) || !std::isfinite(diag)) throw Error(ErrorCode::EmptyMesh, "bounding box is degenerate");
  if (config.image_size < 8) throw Error(ErrorCode::InvalidParams, "image_size must be >= 8");

  int n_ring = std::max(1, static_cast<int>(std::lround(n_views * config.ring_fraction)));
  int n_cap = n_views - n_ring;
  if (n_cap < 1) {
    n_cap = 1;
    n_ring = n_views - 1;
  }

  std::vector<Vec3> dirs;
  dirs.reserve(static_cast<std::size_t>(n_views));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double z_min = std::sin(config.cap_min_elevation_deg * std::numbers::pi / 180.0);
  for (int i = 0; i < n_cap; ++i) {
    const double z = 1.0 - (i + 0.5) / n_cap * (1.0 - z_min);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double az = golden * i;
    dirs.emplace_back(r * std::cos(az), r * std::sin(az), z);
  }
  for (int k = 0; k < n_ring; ++k) {
    const double az = 2.0 * std::numbers::pi * (k + 0.5) / n_ring - std::numbers::pi / 2.0;
    dirs.emplace_back(std::cos(az), std::sin(az), 0.0);
  }

  const Vec3 center = box.center();
  const double distance = config.margin * diag;
  std::vector<CameraView> views;
  views.reserve(dirs.size());
  double max_extent = 0.0;  // largest |x'| or |y'| (ortho) or tangent (perspective)
  for (const auto& d : dirs) {
    CameraView v;
    v.rotation = look_rotation(d);
    v.translation = -(v.rotation * center) + Vec3(0.0, 0.0, distance);
    v.projection = config.projection;
    v.width = v.height = config.image_size;
    for (int c = 0; c < 8; ++c) {
      const Vec3 corner(c & 1 ? box.max.x() : box.min.x(), c & 2 ? box.max.y() : box.min.y(),
                        c & 4 ? box.max.z() : box.min.z());
      const Vec3 cam = v.rotation * corner + v.translation;
      const double ex = std::max(std::abs(cam.x()), std::abs(cam.y()));
      max_extent = std::max(max_extent, config.projection == Projection::Orthographic ? ex : ex / cam.z());
    }
    views.push_back(v);
  }
  const double half = config.fill_fraction * config.image_size / 2.0;
  for (auto& v : views) {
    if (config.projection == Projection::Orthographic) {
      v.scale = half / max_extent;
    } else {
      v.focal = half / max_extent;
    }
  }
  return views;
}

RenderedView rasterize(const CameraView& view, const TriangleMesh& mesh) {
  if (mesh.empty()) throw Error(ErrorCode::EmptyMesh, "nothing to rasterize");
  const int w = view.width;
  const int h = view.height;
  RenderedView out{view, Image<double>(w, h, kInf), Image<float>(w, h, 0.0f), Image<std::int32_t>(w, h, -1)};
  const bool ortho = view.projection == Projection::Orthographic;

  struct ScreenVertex {
    double u, v, depth;
  };
  std::vector<ScreenVertex> sv(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto p = project_point(view, mesh.vertices[i]);
    sv[i] = {p.pixel.x(), p.pixel.y(), p.depth};
  }
  const Vec3 axis = view.view_axis();
  const Vec3 eye = -(view.rotation.transpose() * view.translation);

  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    ScreenVertex a = sv[face[0]];
    ScreenVertex b = sv[face[1]];
    ScreenVertex c = sv[face[2]];
    if (a.depth <= 0.0 || b.depth <= 0.0 || c.depth <= 0.0) continue;  // no near-plane clipping
    double area = edge(a.u, a.v, b.u, b.v, c.u, c.v);
    if (area == 0.0 || !std::isfinite(area)) continue;
    if (area < 0.0) {
      std::swap(b, c);
      area = -area;
    }
    const int x0 = std::max(0, static_cast<int>(std::ceil(std::min({a.u, b.u, c.u}))));
    const int x1 = std::min(w - 1, static_cast<int>(std::floor(std::max({a.u, b.u, c.u}))));
    const int y0 = std::max(0, static_cast<int>(std::ceil(std::min({a.v, b.v, c.v}))));
    const int y1 = std::min(h - 1, static_cast<int>(std::floor(std::max({a.v, b.v, c.v}))));
    if (x0 > x1 || y0 > y1) continue;

    const bool tl_bc = top_left(c.u - b.u, c.v - b.v);
    const bool tl_ca = top_left(a.u - c.u, a.v - c.v);
    const bool tl_ab = top_left(b.u - a.u, b.v - a.v);

    const Vec3 normal = mesh.face_normal(f);
    const auto corners = mesh.corners(f);
    float shade;
    if (ortho) {
      shade = static_cast<float>(std::max(0.0, normal.dot(-axis)));
    } else {
      const Vec3 centroid = (corners[0] + corners[1] + corners[2]) / 3.0;
      shade = static_cast<float>(std::max(0.0, normal.dot((eye - centroid).normalized())));
    }

    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double e0 = edge(b.u, b.v, c.u, c.v, x, y);
        const double e1 = edge(c.u, c.v, a.u, a.v, x, y);
        const double e2 = edge(a.u, a.v, b.u, b.v, x, y);
        if (e0 < 0.0 || e1 < 0.0 || e2 < 0.0) continue;
        if ((e0 == 0.0 && !tl_bc) || (e1 == 0.0 && !tl_ca) || (e2 == 0.0 && !tl_ab)) continue;
        const double l0 = e0 / area;
        const double l1 = e1 / area;
        const double l2 = e2 / area;
        const double depth =
            ortho ? l0 * a.depth + l1 * b.depth + l2 * c.depth
                  : 1.0 / (l0 / a.depth + l1 / b.depth + l2 / c.depth);
        double& zb = out.depth(x, y);
        if (depth < zb) {
          zb = depth;
          out.shading(x, y) = shade;
          out.face_id(x, y) = static_cast<std::int32_t>(f);
        }
      }
    }
  }
  return out;
}

double sample_depth(const RenderedView& rendered, const Vec2& pixel) {
  const auto& d = rendered.depth;
  if (!(pixel.x() >= 0.0 && pixel.y() >= 0.0 && pixel.x() <= d.width - 1.0 && pixel.y() <= d.height - 1.0)) {
    return kInf;
  }
  const int x0 = static_cast<int>(std::floor(pixel.x()));
  const int y0 = static_cast<int>(std::floor(pixel.y()));
  const double fx = pixel.x() - x0;
  const double fy = pixel.y() - y0;
  double sum = 0.0;
  double weight = 0.0;
  for (int dy = 0; dy <= 1; ++dy) {
    for (int dx = 0; dx <= 1; ++dx) {
      const int x = x0 + dx;
      const int y = y0 + dy;
      const double wgt = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
      if (wgt <= 0.0 || x >= d.width || y >= d.height) continue;
      const double z = d(x, y);
      if (!std::isfinite(z)) continue;
      sum += wgt * z;
      weight += wgt;
    }
  }
  return weight > 0.0 ? sum / weight : kInf;
}

bool is_visible(const RenderedView& rendered, const Vec3& point, double epsilon_mm) {
  const auto p = project_point(rendered.camera, point);
  if (!p.in_frustum) return false;
  const double z = sample_depth(rendered, p.pixel);
  return std::isfinite(z) && std::abs(p.depth - z) <= epsilon_mm;
}

}  // namespace archmark
