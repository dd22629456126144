#include <cmath>
#include <numbers>

#include "archmark/error.hpp"
#include "archmark/multiview.hpp"
#include "archmark/pipeline.hpp"
#include "archmark/random.hpp"
#include "archmark/synth_arch.hpp"
#include "doctest.h"

using namespace archmark;

namespace {

CameraView example_camera(double scale = 1.0) {
  CameraView v;
  v.translation = Vec3(0, 0, 100);
  v.scale = scale;
  v.width = v.height = 256;
  return v;
}

// Square in the plane z = z0 facing -z (towards a camera with identity rotation).
void add_square(TriangleMesh& m, double half, double z0) {
  const auto b = static_cast<std::uint32_t>(m.vertices.size());
  m.vertices.insert(m.vertices.end(),
                    {Vec3(-half, -half, z0), Vec3(half, -half, z0), Vec3(half, half, z0), Vec3(-half, half, z0)});
  m.faces.push_back({b, b + 2, b + 1});
  m.faces.push_back({b, b + 3, b + 2});
}

}  // namespace

TEST_CASE("projection of the example camera") {
  auto v = example_camera();
  auto p = project_point(v, Vec3::Zero());
  CHECK((p.pixel - Vec2(128, 128)).norm() < 1e-12);
  CHECK(p.depth == doctest::Approx(100.0));
  CHECK(p.in_frustum);

  v.scale = 2.0;
  p = project_point(v, Vec3(3, 0, 0));
  CHECK((p.pixel - Vec2(134, 128)).norm() < 1e-12);

  CHECK_FALSE(project_point(v, Vec3(0, 0, -150)).in_frustum);
}

TEST_CASE("backprojection") {
  const auto v = example_camera();
  const Ray r = backproject(v, Vec2(128, 128));
  CHECK(std::abs(r.direction.norm() - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(r.direction.dot(Vec3::UnitZ())) - 1.0) < 1e-12);
  const Vec3 to_origin = -r.origin;
  CHECK((to_origin - to_origin.dot(r.direction) * r.direction).norm() < 1e-12);

  SUBCASE("orthographic rays are parallel, offset by pixel distance over scale") {
    auto w = example_camera(2.0);
    const Ray a = backproject(w, Vec2(100, 100)), b = backproject(w, Vec2(110, 100));
    CHECK(a.direction.dot(b.direction) == doctest::Approx(1.0).epsilon(1e-15));
    const Vec3 d = b.origin - a.origin;
    CHECK((d - d.dot(a.direction) * a.direction).norm() == doctest::Approx(5.0).epsilon(1e-12));
  }
}

TEST_CASE("project and backproject are inverse on random cameras") {
  const auto cams = sample_cameras(Aabb{Vec3(-20, -10, 0), Vec3(25, 30, 18)}, 12);
  Rng rng(17);
  for (const auto& cam : cams) {
    for (int i = 0; i < 1000; ++i) {
      const Vec2 px(rng.uniform(0, cam.width - 1), rng.uniform(0, cam.height - 1));
      const Ray r = backproject(cam, px);
      const Vec3 point = r.origin + rng.uniform(1.0, 200.0) * r.direction;
      const auto p = project_point(cam, point);
      CHECK((p.pixel - px).norm() < 1e-6);
      // and the point lies on the ray
      const Vec3 q = point - r.origin;
      CHECK((q - q.dot(r.direction) * r.direction).norm() < 1e-9);
    }
  }
}

TEST_CASE("camera sampling") {
  SUBCASE("two views frame the unit box") {
    const Aabb box{Vec3::Zero(), Vec3::Ones()};
    const auto cams = sample_cameras(box, 2);
    REQUIRE(cams.size() == 2);
    for (const auto& c : cams) {
      const auto center = project_point(c, box.center());
      CHECK((center.pixel - Vec2(c.cx(), c.cy())).norm() < 1e-9);
      for (int k = 0; k < 8; ++k) {
        const Vec3 corner((k & 1) ? 1 : 0, (k & 2) ? 1 : 0, (k & 4) ? 1 : 0);
        const auto p = project_point(c, corner);
        CHECK(p.in_frustum);
        CHECK(p.pixel.x() >= 0);
        CHECK(p.pixel.x() <= c.width - 1);
        CHECK(p.pixel.y() >= 0);
        CHECK(p.pixel.y() <= c.height - 1);
      }
    }
  }
  SUBCASE("24 views are spread out") {
    const auto cams = sample_cameras(Aabb{Vec3::Zero(), Vec3::Ones()}, 24);
    double min_angle = 180.0;
    for (std::size_t i = 0; i < cams.size(); ++i) {
      for (std::size_t j = i + 1; j < cams.size(); ++j) {
        const double c = std::clamp(cams[i].view_axis().dot(cams[j].view_axis()), -1.0, 1.0);
        min_angle = std::min(min_angle, std::acos(c) * 180.0 / std::numbers::pi);
      }
    }
    CHECK(min_angle > 10.0);
  }
  SUBCASE("one view is too few") {
    CHECK_THROWS_AS(sample_cameras(Aabb{Vec3::Zero(), Vec3::Ones()}, 1), Error);
  }
}

TEST_CASE("rasterizer") {
  CameraView cam;
  cam.translation = Vec3(0, 0, 50);
  cam.width = cam.height = 64;
  cam.scale = 2.0;

  SUBCASE("frame-filling square") {
    TriangleMesh m;
    add_square(m, 40.0, 0.0);
    const auto r = rasterize(cam, m);
    for (std::size_t i = 0; i < r.depth.data.size(); ++i) {
      REQUIRE(std::isfinite(r.depth.data[i]));
      CHECK(std::abs(r.depth.data[i] - 50.0) < 1e-6);
      CHECK(r.shading.data[i] == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
  SUBCASE("z-buffer keeps the nearer square") {
    TriangleMesh m;
    add_square(m, 40.0, 10.0);
    add_square(m, 40.0, 0.0);
    const auto r = rasterize(cam, m);
    for (double d : r.depth.data) CHECK(std::abs(d - 50.0) < 1e-6);
  }
  SUBCASE("cube silhouette area") {
    CameraView c = cam;
    c.scale = 20.0;
    const auto r = rasterize(c, make_box(Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5)));
    int covered = 0;
    for (double d : r.depth.data) covered += std::isfinite(d);
    CHECK(std::abs(covered - 400.0) <= 0.02 * 400.0);
  }
  SUBCASE("visibility on a cube") {
    CameraView c = cam;
    c.scale = 10.0;
    const auto r = rasterize(c, make_box(Vec3(-1, -1, -1), Vec3(1, 1, 1)));
    CHECK(is_visible(r, Vec3(0.2, 0.3, -1), 0.1));
    CHECK_FALSE(is_visible(r, Vec3(0.2, 0.3, 1), 0.1));
    CHECK_FALSE(is_visible(r, Vec3(100, 0, -1), 0.1));
  }
}

TEST_CASE("rasterized depth equals the ray-plane intersection of the hit face") {
  const auto arch = generate_arch(ArchParams{});
  const auto cams = sample_cameras(bounding_box(arch.mesh), 6);
  for (const auto& cam : cams) {
    const auto r = rasterize(cam, arch.mesh);
    int checked = 0;
    for (int y = 0; y < cam.height; y += 3) {
      for (int x = 0; x < cam.width; x += 3) {
        const int f = r.face_id(x, y);
        CHECK(std::isfinite(r.depth(x, y)) == (f >= 0));
        if (f < 0) continue;
        const auto c = arch.mesh.corners(static_cast<std::size_t>(f));
        const Vec3 n = (c[1] - c[0]).cross(c[2] - c[0]);
        const Ray ray = backproject(cam, Vec2(x, y));
        const double t = n.dot(c[0] - ray.origin) / n.dot(ray.direction);
        const double want = project_point(cam, ray.origin + t * ray.direction).depth;
        CHECK(std::abs(r.depth(x, y) - want) < 1e-6);
        ++checked;
      }
    }
    CHECK(checked > 100);
  }
}

TEST_CASE("rendering is identical across runs and thread counts") {
  const auto arch = generate_arch(ArchParams{});
  ViewConfig vc;
  vc.n_views = 6;
  vc.camera.image_size = 64;
  const auto a = render_views(arch.mesh, vc, 1);
  const auto b = render_views(arch.mesh, vc, 3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].depth == b[i].depth);
    CHECK(a[i].shading == b[i].shading);
    CHECK(a[i].face_id == b[i].face_id);
  }
}
