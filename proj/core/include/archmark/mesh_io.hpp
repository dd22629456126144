#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace archmark {

using Vec3 = Eigen::Vector3d;
using Face = std::array<std::uint32_t, 3>;

/// Indexed triangle surface. Coordinates are millimeters.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  /// Optional per-face unit normals; empty when not supplied.
  std::vector<Vec3> face_normals;

  bool empty() const noexcept { return faces.empty(); }
  std::size_t face_count() const noexcept { return faces.size(); }

  std::array<Vec3, 3> corners(std::size_t face) const {
    const auto& f = faces[face];
    return {vertices[f[0]], vertices[f[1]], vertices[f[2]]};
  }

  /// Geometric (winding-derived) unit normal of a face.
  Vec3 face_normal(std::size_t face) const;
};

/// Throws InvalidParams if an index is out of range, a coordinate is not
/// finite or a face has zero area.
void validate_mesh(const TriangleMesh& mesh);

struct StlInfo {
  bool ascii = false;
  std::size_t triangles_in_file = 0;
  std::size_t dropped_degenerate = 0;
};

/// Parses binary or ASCII STL. Vertices are merged on exact coordinate
/// equality in order of first appearance; zero-area facets are dropped and
/// counted in `info`.
TriangleMesh parse_stl(std::span<const std::uint8_t> bytes, StlInfo* info = nullptr);
TriangleMesh parse_stl(std::string_view bytes, StlInfo* info = nullptr);

enum class StlMode { Binary, Ascii };

std::vector<std::uint8_t> write_stl(const TriangleMesh& mesh, StlMode mode);

// ---------------------------------------------------------------------------
// Landmarks

inline constexpr int kLandmarkCount = 16;

struct Landmark {
  int index = 0;
  std::string name;
  Vec3 position = Vec3::Zero();
  bool present = false;

  friend bool operator==(const Landmark& a, const Landmark& b) {
    return a.index == b.index && a.name == b.name && a.position == b.position && a.present == b.present;
  }
};

/// Default display name for landmark `index` (1-based).
std::string_view default_landmark_name(int index);

/// Sixteen slots indexed 1..16. Slot i lives at `entries[i-1]`.
class LandmarkSet {
 public:
  explicit LandmarkSet(std::string landmark7_name = std::string(default_landmark_name(7)));

  const Landmark& at(int index) const;
  Landmark& at(int index);

  void set(int index, const Vec3& position);
  void clear(int index);

  bool present(int index) const { return at(index).present; }
  std::size_t present_count() const;

  const std::array<Landmark, kLandmarkCount>& entries() const noexcept { return entries_; }

  friend bool operator==(const LandmarkSet&, const LandmarkSet&) = default;

 private:
  std::array<Landmark, kLandmarkCount> entries_;
};

enum class LandmarkFormat { Fcsv, Json };

LandmarkSet read_landmarks(std::string_view text, LandmarkFormat format);
std::string write_landmarks(const LandmarkSet& landmarks, LandmarkFormat format);

/// Picks the format from the file extension (".json" -> Json, else Fcsv).
LandmarkFormat landmark_format_for_path(std::string_view path);

// ---------------------------------------------------------------------------
// Metrics and clinical frame

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 center() const { return 0.5 * (min + max); }
  double diagonal() const { return (max - min).norm(); }
};

struct MeshMetrics {
  double volume = 0.0;        // mm^3
  double surface_area = 0.0;  // mm^2
  Aabb aabb;
  bool watertight = false;
};

Aabb bounding_box(const TriangleMesh& mesh);

/// Volume from the signed-tetrahedron sum (absolute value). Open shells still
/// get a value; `watertight` tells whether it is meaningful.
MeshMetrics mesh_metrics(const TriangleMesh& mesh);

struct Plane {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitX();
};

struct ReferencePlanes {
  Plane sagittal;
  Plane coronal;
  Plane transverse;
};

enum class LargeSegmentSide { L15, L16 };

/// Requires landmarks 15 and 16. Axes follow the radiographic convention
/// +X left, +Y anterior, +Z superior.
ReferencePlanes reference_planes(const LandmarkSet& landmarks,
                                 LargeSegmentSide large_side = LargeSegmentSide::L16);

// ---------------------------------------------------------------------------
// Reference shapes (tests, benchmarks, examples)

/// Axis-aligned box with outward winding.
TriangleMesh make_box(const Vec3& min, const Vec3& max);
/// Icosahedron refined `subdivisions` times, projected to the sphere.
TriangleMesh make_icosphere(double radius, int subdivisions, const Vec3& center = Vec3::Zero());

}  // namespace archmark
