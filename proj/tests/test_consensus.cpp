#include <algorithm>
#include <cmath>

#include "archmark/consensus.hpp"
#include "archmark/error.hpp"
#include "archmark/random.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace archmark;

namespace {

Vec3 random_unit(Rng& rng) {
  Vec3 v;
  do {
    v = Vec3(rng.normal(), rng.normal(), rng.normal());
  } while (v.norm() < 1e-6);
  return v.normalized();
}

// Rays passing near `target` with small random offsets and spread directions.
std::vector<Ray> noisy_rays(Rng& rng, const Vec3& target, int n, double offset) {
  std::vector<Ray> rays;
  for (int i = 0; i < n; ++i) {
    Ray r;
    r.direction = random_unit(rng);
    const Vec3 miss = offset * random_unit(rng);
    r.origin = target + miss - rng.uniform(5.0, 40.0) * r.direction;
    rays.push_back(r);
  }
  return rays;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an archmark::Error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("two perpendicular rays meet at their intersection") {
  const std::vector<Ray> rays{{Vec3(0, 2, 3), Vec3(1, 0, 0)}, {Vec3(1, 0, 3), Vec3(0, 1, 0)}};
  const std::vector<double> w{1.0, 1.0};
  CHECK((consensus_point(rays, w) - Vec3(1, 2, 3)).norm() < 1e-12);
}

TEST_CASE("perturbed rays match the brute-force minimizer") {
  Rng rng(21);
  const Vec3 target(4, -1, 2);
  std::vector<Ray> rays;
  for (int i = 0; i < 5; ++i) {
    const Vec3 d = random_unit(rng);
    const Vec3 jitter(rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02));
    rays.push_back({target - 20.0 * d, (d + jitter).normalized()});
  }
  const std::vector<double> w(5, 1.0);
  const Vec3 x = consensus_point(rays, w);
  CHECK((x - oracle::brute_force_consensus(rays, w)).norm() < 1e-6);
}

TEST_CASE("random instances match the brute-force minimizer") {
  Rng rng(1234);
  for (int t = 0; t < 30; ++t) {
    const int n = 3 + static_cast<int>(rng.below(10));
    const Vec3 target(rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20));
    const auto rays = noisy_rays(rng, target, n, 1.5);
    std::vector<double> w;
    for (int i = 0; i < n; ++i) w.push_back(rng.uniform(0.1, 1.0));
    CHECK((consensus_point(rays, w) - oracle::brute_force_consensus(rays, w)).norm() < 1e-6);
  }
}

TEST_CASE("degenerate and invalid inputs") {
  const std::vector<Ray> parallel{{Vec3(0, 0, 0), Vec3(1, 0, 0)}, {Vec3(0, 1, 0), Vec3(1, 0, 0)}};
  const std::vector<double> w{1.0, 1.0};
  CHECK(code_of([&] { consensus_point(parallel, w); }) == ErrorCode::DegenerateGeometry);
  CHECK(code_of([&] { consensus_point(std::span(parallel).first(1), std::span(w).first(1)); }) ==
        ErrorCode::InsufficientRays);
  const std::vector<double> neg{1.0, -1.0};
  CHECK(code_of([&] { consensus_point(parallel, neg); }) == ErrorCode::InvalidParams);
}

TEST_CASE("weight scaling and rigid motion") {
  Rng rng(3);
  const auto rays = noisy_rays(rng, Vec3(1, 2, 3), 7, 2.0);
  std::vector<double> w;
  for (int i = 0; i < 7; ++i) w.push_back(rng.uniform(0.2, 1.0));
  const Vec3 x = consensus_point(rays, w);

  std::vector<double> w2 = w;
  for (auto& v : w2) v *= 37.5;
  CHECK((consensus_point(rays, w2) - x).norm() < 1e-9);

  const Eigen::Matrix3d R = Eigen::AngleAxisd(1.1, Vec3(0.3, -1, 0.4).normalized()).toRotationMatrix();
  const Vec3 t(5, -7, 2);
  std::vector<Ray> moved;
  for (const auto& r : rays) moved.push_back({R * r.origin + t, R * r.direction});
  CHECK((consensus_point(moved, w) - (R * x + t)).norm() < 1e-9);
}

TEST_CASE("exact rays from several directions recover the point") {
  Rng rng(4);
  const Vec3 p(3, -2, 7);
  std::vector<Ray> rays;
  for (int i = 0; i < 3; ++i) {
    const Vec3 d = random_unit(rng);
    rays.push_back({p - 30.0 * d, d});
  }
  CHECK((consensus_point(rays, std::vector<double>(3, 1.0)) - p).norm() < 1e-9);
}

TEST_CASE("robust consensus") {
  Rng rng(8);
  const Vec3 target(2, 3, -1);
  auto rays = noisy_rays(rng, target, 10, 0.3);
  const std::vector<Ray> clean = rays;
  ConsensusConfig cfg;

  SUBCASE("clean rays need no dropping") {
    const std::vector<double> w(10, 1.0);
    const auto e = robust_consensus(rays, w, cfg);
    CHECK(e.status == EstimateStatus::Ok);
    CHECK(e.drop_iterations == 0);
    CHECK(e.n_rays_used == 10);
    CHECK((e.position - consensus_point(rays, w)).norm() < 1e-12);
  }
  SUBCASE("two far rays are dropped") {
    for (int i = 0; i < 2; ++i) {
      Ray r;
      r.direction = random_unit(rng);
      const Vec3 side = r.direction.cross(random_unit(rng)).normalized();
      r.origin = target + 20.0 * side - 15.0 * r.direction;
      rays.push_back(r);
    }
    const std::vector<double> w(12, 1.0);
    const auto e = robust_consensus(rays, w, cfg);
    CHECK(e.status == EstimateStatus::Ok);
    CHECK(e.n_rays_used == 10);
    CHECK((e.position - consensus_point(clean, std::vector<double>(10, 1.0))).norm() < 1e-6);

    SUBCASE("and the result does not depend on ray order") {
      std::vector<std::size_t> idx(12);
      for (std::size_t i = 0; i < 12; ++i) idx[i] = i;
      for (int rep = 0; rep < 5; ++rep) {
        rng.shuffle(idx.begin(), idx.end());
        std::vector<Ray> shuffled;
        for (auto i : idx) shuffled.push_back(rays[i]);
        const auto f = robust_consensus(shuffled, w, cfg);
        CHECK(f.position == e.position);
      }
    }
  }
  SUBCASE("too few rays") {
    const auto e = robust_consensus(std::span(rays).first(2), std::vector<double>(2, 1.0), cfg);
    CHECK(e.status == EstimateStatus::InsufficientRays);
  }
}

TEST_CASE("surface snapping") {
  TriangleMesh square;
  square.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};
  square.faces = {{0, 1, 2}, {0, 2, 3}};

  auto s = snap_to_surface(square, Vec3(0, 0, 5));
  CHECK((s.point - Vec3(0, 0, 0)).norm() < 1e-15);
  CHECK(s.distance == 5.0);

  s = snap_to_surface(square, Vec3(0.25, 0.5, 0));
  CHECK(s.distance == 0.0);
  CHECK((s.point - Vec3(0.25, 0.5, 0)).norm() < 1e-15);

  SUBCASE("agrees with a linear scan on a fine sphere") {
    const auto sphere = make_icosphere(10.0, 5);  // 20480 faces
    Rng rng(2);
    for (int i = 0; i < 40; ++i) {
      const Vec3 p(rng.uniform(-15, 15), rng.uniform(-15, 15), rng.uniform(-15, 15));
      const auto a = snap_to_surface(sphere, p);
      const auto b = oracle::linear_scan_snap(sphere, p);
      CHECK(std::abs(a.distance - b.distance) < 1e-12);
      CHECK((a.point - b.point).norm() < 1e-9);
    }
  }
  SUBCASE("closest point on a triangle matches the case analysis") {
    Rng rng(12);
    for (int i = 0; i < 2000; ++i) {
      const Vec3 a(rng.normal(), rng.normal(), rng.normal()), b(rng.normal(), rng.normal(), rng.normal()),
          c(rng.normal(), rng.normal(), rng.normal()), p(2 * rng.normal(), 2 * rng.normal(), 2 * rng.normal());
      const Vec3 x = closest_point_on_triangle(p, a, b, c), y = oracle::closest_on_triangle(p, a, b, c);
      CHECK(std::abs((x - p).norm() - (y - p).norm()) < 1e-9);
    }
  }
}
