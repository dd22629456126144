#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "archmark/mesh_io.hpp"

namespace archmark {

/// Shape controls for a procedurally generated two-segment arch.
/// Lengths are millimeters, angles radians.
struct ArchParams {
  double arch_width = 40.0;    // distance between the two tuberosity points
  double arch_depth = 30.0;    // posterior-to-anterior extent of the centerline
  double ridge_height = 18.0;  // crest height above the base plane z = 0
  double ridge_half_width = 11.5;
  double cleft_gap_width = 6.0;
  /// Centerline parameter of the cleft: 0 is the subject's right tuberosity,
  /// pi/2 the anterior midline, pi the left tuberosity.
  double cleft_angular_position = 0.62 * 3.14159265358979323846;
  double segment_asymmetry = 0.2;  // -1..1, grows one segment and shrinks the other
  double surface_noise_amplitude = 0.3;
  std::uint64_t random_seed = 1;

  // Tessellation.
  double ring_spacing = 0.75;  // mm between cross-section rings
  int profile_segments = 32;   // facets across the ridge profile, multiple of 8

  bool operator==(const ArchParams&) const = default;
};

void validate(const ArchParams& params);

struct SyntheticArch {
  TriangleMesh mesh;
  LandmarkSet landmarks;
  /// Which tuberosity sits on the longer segment. Always L16 for generated arches.
  LargeSegmentSide large_side = LargeSegmentSide::L16;
};

/// Horseshoe ridge swept over a parametric centerline, split by a cleft into a
/// large and a small segment whose ends are capped. The base (z = 0) is left
/// open. All 16 landmarks are mesh vertices.
SyntheticArch generate_arch(const ArchParams& params);

enum class TreatmentTag { Pre, Post };
const char* to_string(TreatmentTag tag);

struct Range {
  double min = 0.0;
  double max = 0.0;
};

struct PopulationSpec {
  enum class Mode { Balanced, PreOnly, PostOnly };

  Range arch_width{36.0, 44.0};
  Range arch_depth{27.0, 33.0};
  Range ridge_height{16.0, 20.0};
  Range ridge_half_width{10.5, 12.5};
  Range cleft_gap_width{4.0, 10.0};
  Range cleft_angular_position{0.56 * 3.14159265358979323846, 0.70 * 3.14159265358979323846};
  Range segment_asymmetry{-0.3, 0.4};
  Range surface_noise_amplitude{0.1, 0.4};
  /// Post-treatment samples draw the cleft gap from this fraction of the range.
  double post_gap_scale = 0.35;
  Mode mode = Mode::Balanced;
};

struct SampledArch {
  ArchParams params;
  TreatmentTag tag = TreatmentTag::Pre;
};

/// n parameter sets; in balanced mode the first ceil(n/2) are tagged pre and
/// the rest post.
std::vector<SampledArch> sample_population(int n, const PopulationSpec& spec, std::uint64_t seed);

}  // namespace archmark
