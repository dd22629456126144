#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "archmark/mesh_io.hpp"
#include "archmark/multiview.hpp"

namespace archmark {

struct ConsensusConfig {
  int min_rays = 3;
  double outlier_threshold_mm = 3.0;
  int max_reweight_iterations = 5;
  bool snap_to_surface = true;
  /// Smallest acceptable eigenvalue of the weight-normalized normal matrix.
  double condition_floor = 1e-6;
};

/// Throws InvalidConfig unless min_rays >= 2, the thresholds are positive and
/// max_reweight_iterations >= 0.
void validate(const ConsensusConfig& config);

enum class EstimateStatus { Ok, InsufficientRays, Degenerate };

std::string_view to_string(EstimateStatus status);

struct LandmarkEstimate {
  Vec3 position = Vec3::Zero();
  int n_rays_used = 0;
  double rms_ray_distance = 0.0;
  EstimateStatus status = EstimateStatus::InsufficientRays;
  /// Rounds in which the inlier set changed.
  int drop_iterations = 0;
  /// Distance moved by surface snapping (0 when not snapped).
  double snap_distance = 0.0;
};

double ray_distance(const Ray& ray, const Vec3& point);

/// Point minimizing sum_i w_i * dist(x, ray_i)^2. Throws InsufficientRays for
/// fewer than two rays or all-zero weights, InvalidParams for negative or
/// non-finite weights and DegenerateGeometry when the smallest eigenvalue of
/// the normalized normal matrix is below condition_floor.
Vec3 consensus_point(std::span<const Ray> rays, std::span<const double> weights,
                     double condition_floor = ConsensusConfig{}.condition_floor);

/// Least squares with iterative distance-threshold outlier dropping. The
/// inlier set is recomputed from all rays each round and the result does not
/// depend on input order. Never throws for data problems; see status.
LandmarkEstimate robust_consensus(std::span<const Ray> rays, std::span<const double> weights,
                                  const ConsensusConfig& config);

struct SurfacePoint {
  Vec3 point = Vec3::Zero();
  double distance = 0.0;
  std::size_t face = 0;
};

/// Exact closest point on the triangle (a, b, c).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Closest point over all faces; ties keep the lowest face index. EmptyMesh
/// for a mesh without faces.
SurfacePoint snap_to_surface(const TriangleMesh& mesh, const Vec3& point);

}  // namespace archmark
