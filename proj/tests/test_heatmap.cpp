#include <cmath>
#include <numbers>

#include "archmark/heatmap.hpp"
#include "archmark/random.hpp"
#include "doctest.h"

using namespace archmark;

namespace {

std::vector<float> gaussian_map(int w, int h, const Vec2& c, double sigma) {
  std::vector<float> m(static_cast<std::size_t>(w) * h);
  write_gaussian(m, w, h, c, sigma);
  return m;
}

}  // namespace

TEST_CASE("gaussian values") {
  CHECK(gaussian_target(5, 5, Vec2(5, 5), 1.0) == 1.0);
  CHECK(gaussian_target(6, 5, Vec2(5, 5), 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  const auto m = gaussian_map(16, 16, Vec2(5, 5), 1.0);
  CHECK(m[5 * 16 + 5] == 1.0f);
  CHECK(m[5 * 16 + 6] == doctest::Approx(0.60653).epsilon(1e-5));
}

TEST_CASE("target mass is close to 2 pi sigma^2") {
  for (double sigma : {1.0, 2.0, 3.0}) {
    const auto m = gaussian_map(64, 64, Vec2(31.3, 30.8), sigma);
    double mass = 0.0;
    for (float v : m) mass += v;
    const double want = 2.0 * std::numbers::pi * sigma * sigma;
    CHECK(std::abs(mass - want) <= 0.02 * want);
  }
}

TEST_CASE("peak extraction") {
  SUBCASE("single spike") {
    std::vector<float> m(32 * 32, 0.0f);
    m[7 * 32 + 12] = 1.0f;
    const auto p = extract_peak(m, 32, 32, 0.1);
    CHECK(p.found);
    CHECK((p.pixel - Vec2(12, 7)).norm() < 1e-12);
    CHECK(p.confidence == 1.0);
  }
  SUBCASE("sub-pixel gaussian") {
    const auto m = gaussian_map(32, 32, Vec2(10.5, 20.25), 1.5);
    const auto p = extract_peak(m, 32, 32, 0.1);
    CHECK((p.pixel - Vec2(10.5, 20.25)).norm() <= 0.25);
  }
  SUBCASE("empty map abstains") {
    const std::vector<float> m(32 * 32, 0.0f);
    const auto p = extract_peak(m, 32, 32, 0.1);
    CHECK_FALSE(p.found);
    CHECK(p.confidence == 0.0);
  }
}

TEST_CASE("targets then peaks recover random placements") {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const double sigma = rng.uniform(1.0, 3.0);
    const Vec2 c(rng.uniform(3 * sigma, 63 - 3 * sigma), rng.uniform(3 * sigma, 63 - 3 * sigma));
    const auto m = gaussian_map(64, 64, c, sigma);
    const auto p = extract_peak(m, 64, 64, 0.1);
    REQUIRE(p.found);
    CHECK((p.pixel - c).norm() <= 0.25);
  }
}

TEST_CASE("peak extraction is translation equivariant") {
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const Vec2 c(rng.uniform(10, 30), rng.uniform(10, 30));
    const int dx = static_cast<int>(rng.below(15)), dy = static_cast<int>(rng.below(15));
    const auto a = gaussian_map(64, 64, c, 2.0);
    std::vector<float> b(a.size(), 0.0f);
    for (int y = 0; y + dy < 64; ++y) {
      for (int x = 0; x + dx < 64; ++x) b[(y + dy) * 64 + x + dx] = a[y * 64 + x];
    }
    const auto pa = extract_peak(a, 64, 64, 0.1), pb = extract_peak(b, 64, 64, 0.1);
    CHECK((pb.pixel - pa.pixel - Vec2(dx, dy)).norm() < 1e-9);
    CHECK(pa.confidence == pb.confidence);
  }
}

TEST_CASE("occluded landmarks get empty targets") {
  TriangleMesh m = make_box(Vec3(-1, -1, -1), Vec3(1, 1, 1));
  CameraView cam;
  cam.translation = Vec3(0, 0, 50);
  cam.width = cam.height = 32;
  cam.scale = 8.0;
  const auto r = rasterize(cam, m);
  LandmarkSet s;
  s.set(1, Vec3(0.25, 0.5, -1));  // near face
  s.set(2, Vec3(0.25, 0.5, 1));   // far face
  const auto t = make_targets(cam, s, r, 1.0);
  CHECK(t.target_visible[0]);
  CHECK_FALSE(t.target_visible[1]);
  CHECK_FALSE(t.target_visible[2]);
  float mx = 0.0f;
  for (float v : t.channel(1)) mx = std::max(mx, v);
  CHECK(mx == 0.0f);
  for (float v : t.channel(0)) mx = std::max(mx, v);
  CHECK(mx > 0.5f);
}
