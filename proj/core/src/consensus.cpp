#include "archmark/consensus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>
#include <vector>

#include <Eigen/Eigenvalues>

#include "archmark/error.hpp"

namespace archmark {

void validate(const ConsensusConfig& c) {
  if (c.min_rays < 2) throw Error(ErrorCode::InvalidConfig, "consensus.min_rays must be >= 2");
  if (!(c.outlier_threshold_mm > 0.0)) throw Error(ErrorCode::InvalidConfig, "consensus.outlier_threshold_mm must be > 0");
  if (!(c.condition_floor > 0.0)) throw Error(ErrorCode::InvalidConfig, "consensus.condition_floor must be > 0");
  if (c.max_reweight_iterations < 0) {
    throw Error(ErrorCode::InvalidConfig, "consensus.max_reweight_iterations must be >= 0");
  }
}

std::string_view to_string(EstimateStatus s) {
  switch (s) {
    case EstimateStatus::Ok: return "ok";
    case EstimateStatus::InsufficientRays: return "insufficient_rays";
    case EstimateStatus::Degenerate: return "degenerate";
  }
  return "unknown";
}

double ray_distance(const Ray& ray, const Vec3& point) {
  const Vec3 v = point - ray.origin;
  return (v - v.dot(ray.direction) * ray.direction).norm();
}

namespace {

// Gaussian elimination with full pivoting on a 3x3 system.
Vec3 solve3_full_pivot(Mat3 a, Vec3 b) {
  std::array<int, 3> col{0, 1, 2};
  for (int k = 0; k < 3; ++k) {
    int pr = k, pc = k;
    for (int r = k; r < 3; ++r) {
      for (int c = k; c < 3; ++c) {
        if (std::abs(a(r, c)) > std::abs(a(pr, pc))) {
          pr = r;
          pc = c;
        }
      }
    }
    if (a(pr, pc) == 0.0) throw Error(ErrorCode::DegenerateGeometry, "singular consensus system");
    a.row(k).swap(a.row(pr));
    std::swap(b(k), b(pr));
    a.col(k).swap(a.col(pc));
    std::swap(col[static_cast<std::size_t>(k)], col[static_cast<std::size_t>(pc)]);
    for (int r = k + 1; r < 3; ++r) {
      const double f = a(r, k) / a(k, k);
      for (int c = k; c < 3; ++c) a(r, c) -= f * a(k, c);
      b(r) -= f * b(k);
    }
  }
  Vec3 y;
  for (int k = 2; k >= 0; --k) {
    double s = b(k);
    for (int c = k + 1; c < 3; ++c) s -= a(k, c) * y(c);
    y(k) = s / a(k, k);
  }
  Vec3 x;
  for (int k = 0; k < 3; ++k) x(col[static_cast<std::size_t>(k)]) = y(k);
  return x;
}

}  // namespace

Vec3 consensus_point(std::span<const Ray> rays, std::span<const double> weights, double condition_floor) {
  if (rays.size() != weights.size()) throw Error(ErrorCode::InvalidParams, "one weight per ray required");
  if (rays.size() < 2) throw Error(ErrorCode::InsufficientRays, "consensus needs at least two rays");
  double wsum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw Error(ErrorCode::InvalidParams, "ray weights must be finite and >= 0");
    wsum += w;
  }
  if (wsum <= 0.0) throw Error(ErrorCode::InsufficientRays, "all ray weights are zero");

  Mat3 a = Mat3::Zero();
  Vec3 b = Vec3::Zero();
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const Vec3 d = rays[i].direction.normalized();
    const Mat3 p = Mat3::Identity() - d * d.transpose();
    a += (weights[i] / wsum) * p;
    b += (weights[i] / wsum) * (p * rays[i].origin);
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(a, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues()(0) >= condition_floor)) {
    throw Error(ErrorCode::DegenerateGeometry, "rays are (nearly) parallel; smallest eigenvalue " +
                                                   std::to_string(eig.eigenvalues()(0)));
  }
  return solve3_full_pivot(a, b);
}

LandmarkEstimate robust_consensus(std::span<const Ray> rays_in, std::span<const double> weights_in,
                                  const ConsensusConfig& config) {
  validate(config);
  if (rays_in.size() != weights_in.size()) throw Error(ErrorCode::InvalidParams, "one weight per ray required");

  // Canonical order so the floating point sums never depend on input order.
  std::vector<std::size_t> idx(rays_in.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto key = [&](std::size_t i) {
    const auto& r = rays_in[i];
    return std::make_tuple(r.origin.x(), r.origin.y(), r.origin.z(), r.direction.x(), r.direction.y(),
                           r.direction.z(), weights_in[i]);
  };
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  std::vector<Ray> rays;
  std::vector<double> weights;
  for (auto i : idx) {
    rays.push_back(rays_in[i]);
    weights.push_back(weights_in[i]);
  }

  LandmarkEstimate est;
  std::vector<bool> active(rays.size(), true);
  auto solve = [&](LandmarkEstimate& e) {
    std::vector<Ray> r;
    std::vector<double> w;
    for (std::size_t i = 0; i < rays.size(); ++i) {
      if (active[i]) {
        r.push_back(rays[i]);
        w.push_back(weights[i]);
      }
    }
    e.n_rays_used = static_cast<int>(r.size());
    if (e.n_rays_used < config.min_rays) {
      e.status = EstimateStatus::InsufficientRays;
      return false;
    }
    try {
      e.position = consensus_point(r, w, config.condition_floor);
    } catch (const Error& err) {
      e.status = err.code() == ErrorCode::DegenerateGeometry ? EstimateStatus::Degenerate
                                                             : EstimateStatus::InsufficientRays;
      return false;
    }
    e.status = EstimateStatus::Ok;
    return true;
  };

  if (!solve(est)) return est;
  for (int it = 0; it < config.max_reweight_iterations; ++it) {
    std::vector<bool> next(rays.size());
    for (std::size_t i = 0; i < rays.size(); ++i) {
      next[i] = ray_distance(rays[i], est.position) <= config.outlier_threshold_mm;
    }
    if (next == active) break;
    active = std::move(next);
    ++est.drop_iterations;
    if (!solve(est)) return est;
  }

  double ss = 0.0;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    if (!active[i]) continue;
    const double d = ray_distance(rays[i], est.position);
    ss += d * d;
  }
  est.rms_ray_distance = std::sqrt(ss / est.n_rays_used);
  return est;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Voronoi-region walk over vertices, edges and the face interior.
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

SurfacePoint snap_to_surface(const TriangleMesh& mesh, const Vec3& point) {
  if (mesh.empty()) throw Error(ErrorCode::EmptyMesh, "cannot snap to a mesh without faces");
  SurfacePoint best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const auto [a, b, c] = mesh.corners(f);
    const Vec3 q = closest_point_on_triangle(point, a, b, c);
    const double d2 = (q - point).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best.point = q;
      best.face = f;
    }
  }
  best.distance = std::sqrt(best_d2);
  return best;
}

}  // namespace archmark
