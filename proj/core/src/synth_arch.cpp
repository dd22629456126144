#include "archmark/synth_arch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "archmark/error.hpp"
#include "archmark/random.hpp"

namespace archmark {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWidthBulge = 0.25;      // widens the arch behind the canines
constexpr double kAsymmetryGain = 0.15;   // relative size change per unit asymmetry

struct Centerline {
  double half_width;
  double depth;

  Eigen::Vector2d at(double t) const {
    return {-half_width * std::cos(t) * (1.0 + kWidthBulge * std::sin(t)), depth * std::sin(t)};
  }
  Eigen::Vector2d tangent(double t) const {
    const double dx = half_width * (std::sin(t) * (1.0 + kWidthBulge * std::sin(t)) -
                                    kWidthBulge * std::cos(t) * std::cos(t));
    const double dy = depth * std::cos(t);
    return Eigen::Vector2d(dx, dy).normalized();
  }
  double arc_length(double a, double b) const {
    constexpr int steps = 512;
    double len = 0.0;
    for (int i = 0; i < steps; ++i) {
      len += (at(a + (b - a) * (i + 1) / steps) - at(a + (b - a) * i / steps)).norm();
    }
    return len;
  }
};

// Smooth, seeded displacement field over (theta, phi); |value| <= 1.
struct NoiseField {
  double p[4];

  explicit NoiseField(std::uint64_t seed) {
    Rng rng(derive_seed(seed, "surface-noise"));
    for (double& v : p) v = rng.uniform(0.0, 2.0 * kPi);
  }
  double operator()(double t, double phi) const {
    return 0.6 * std::sin(3.0 * t + p[0]) * std::cos(2.0 * phi + p[1]) +
           0.4 * std::sin(7.0 * t + p[2]) * std::sin(phi + p[3]);
  }
};

struct Segment {
  double t_begin;  // tuberosity end
  double t_end;    // cleft end
  bool large;
  std::vector<double> rings;
  std::uint32_t first_vertex = 0;
};

// Angular half-width of the removed sector so that the two cleft-end ring
// centers are `gap` apart.
double cleft_half_angle(const Centerline& line, double t_cleft, double gap) {
  if (gap <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = std::min(t_cleft, kPi - t_cleft);
  if ((line.at(t_cleft + hi) - line.at(t_cleft - hi)).norm() < gap) {
    throw Error(ErrorCode::InvalidParams, "cleft gap wider than the arch allows at this position");
  }
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((line.at(t_cleft + mid) - line.at(t_cleft - mid)).norm() < gap ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void validate(const ArchParams& p) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidParams, what);
  };
  require(std::isfinite(p.arch_width) && p.arch_width > 0.0, "arch_width must be > 0");
  require(std::isfinite(p.arch_depth) && p.arch_depth > 0.0, "arch_depth must be > 0");
  require(std::isfinite(p.ridge_height) && p.ridge_height > 0.0, "ridge_height must be > 0");
  require(std::isfinite(p.ridge_half_width) && p.ridge_half_width > 0.0, "ridge_half_width must be > 0");
  require(std::isfinite(p.cleft_gap_width) && p.cleft_gap_width >= 0.0, "cleft_gap_width must be >= 0");
  require(std::isfinite(p.surface_noise_amplitude) && p.surface_noise_amplitude >= 0.0,
          "surface_noise_amplitude must be >= 0");
  require(p.segment_asymmetry >= -1.0 && p.segment_asymmetry <= 1.0, "segment_asymmetry must be in [-1, 1]");
  require(p.cleft_angular_position > 0.05 && p.cleft_angular_position < kPi - 0.05,
          "cleft_angular_position must lie inside (0.05, pi - 0.05)");
  require(p.ring_spacing > 0.0, "ring_spacing must be > 0");
  require(p.profile_segments >= 8 && p.profile_segments % 8 == 0, "profile_segments must be a multiple of 8");
  require(p.surface_noise_amplitude < 0.5 * std::min(p.ridge_height, p.ridge_half_width),
          "surface noise too large for the ridge");
}

SyntheticArch generate_arch(const ArchParams& params) {
  validate(params);
  const Centerline line{params.arch_width / 2.0, params.arch_depth};
  const NoiseField noise(params.random_seed);
  const double t_cleft = params.cleft_angular_position;
  const double half_gap = cleft_half_angle(line, t_cleft, params.cleft_gap_width);

  Segment right{0.0, t_cleft - half_gap, false, {}};
  Segment left{kPi, t_cleft + half_gap, false, {}};
  const bool right_large = line.arc_length(right.t_begin, right.t_end) >= line.arc_length(left.t_end, left.t_begin);
  right.large = right_large;
  left.large = !right_large;

  const int n_phi = params.profile_segments;
  const auto ring_size = static_cast<std::uint32_t>(n_phi + 1);

  SyntheticArch out;
  TriangleMesh& mesh = out.mesh;

  auto vertex_at = [&](const Segment& seg, double t, double phi) {
    const double dist = std::abs(t - t_cleft) / kPi;
    const double gain = kAsymmetryGain * params.segment_asymmetry * dist;
    const double scale = seg.large ? 1.0 + gain : 1.0 - gain;
    const double a = params.ridge_half_width * scale;
    const double h = params.ridge_height * scale;
    const double bump = params.surface_noise_amplitude * noise(t, phi) * std::sin(phi);
    const double lateral = a * std::cos(phi) + bump * std::cos(phi);
    const double up = h * std::sin(phi) + bump * std::sin(phi);
    const Eigen::Vector2d c = line.at(t);
    const Eigen::Vector2d tan = line.tangent(t);
    const Eigen::Vector2d normal(-tan.y(), tan.x());
    const Eigen::Vector2d xy = c + lateral * normal;
    return Vec3(xy.x(), xy.y(), up);
  };

  for (Segment* seg : {&right, &left}) {
    const double len = line.arc_length(std::min(seg->t_begin, seg->t_end), std::max(seg->t_begin, seg->t_end));
    const int n_rings = std::max(2, static_cast<int>(std::ceil(len / params.ring_spacing)) + 1);
    for (int i = 0; i < n_rings; ++i) {
      seg->rings.push_back(seg->t_begin + (seg->t_end - seg->t_begin) * i / (n_rings - 1));
    }
    seg->first_vertex = static_cast<std::uint32_t>(mesh.vertices.size());
    for (double t : seg->rings) {
      for (int j = 0; j <= n_phi; ++j) {
        const double phi = kPi * j / n_phi;
        Vec3 v = vertex_at(*seg, t, phi);
        if (j == 0 || j == n_phi) v.z() = 0.0;
        mesh.vertices.push_back(v);
      }
    }
  }

  auto vid = [&](const Segment& seg, std::size_t ring, int j) {
    return seg.first_vertex + static_cast<std::uint32_t>(ring) * ring_size + static_cast<std::uint32_t>(j);
  };

  for (const Segment* seg : {&right, &left}) {
    // Increasing theta runs anticlockwise seen from +z; the left segment's
    // rings run the other way, so its quads are wound in reverse.
    const bool forward = seg->t_end > seg->t_begin;
    for (std::size_t i = 0; i + 1 < seg->rings.size(); ++i) {
      for (int j = 0; j < n_phi; ++j) {
        const auto a = vid(*seg, i, j);
        const auto b = vid(*seg, i + 1, j);
        const auto c = vid(*seg, i + 1, j + 1);
        const auto d = vid(*seg, i, j + 1);
        if (forward) {
          mesh.faces.push_back({a, d, c});
          mesh.faces.push_back({a, c, b});
        } else {
          mesh.faces.push_back({a, b, c});
          mesh.faces.push_back({a, c, d});
        }
      }
    }
    // End caps: fan from the ring center on the base plane.
    for (const bool at_begin : {true, false}) {
      const std::size_t ring = at_begin ? 0 : seg->rings.size() - 1;
      const double t = seg->rings[ring];
      const Eigen::Vector2d c = line.at(t);
      const auto center = static_cast<std::uint32_t>(mesh.vertices.size());
      mesh.vertices.emplace_back(c.x(), c.y(), 0.0);
      // Cap faces +theta at the high-theta end of a ring run.
      const bool faces_plus_theta = (at_begin != forward);
      for (int j = 0; j < n_phi; ++j) {
        const auto p = vid(*seg, ring, j);
        const auto q = vid(*seg, ring, j + 1);
        if (faces_plus_theta) {
          mesh.faces.push_back({center, p, q});
        } else {
          mesh.faces.push_back({center, q, p});
        }
      }
    }
  }

  // Landmarks --------------------------------------------------------------
  const Segment& large = right.large ? right : left;
  const Segment& small = right.large ? left : right;
  const int crest = n_phi / 2;
  const int outer_mid = n_phi / 4;
  const int inner_mid = 3 * n_phi / 4;
  LandmarkSet& lm = out.landmarks;

  auto put = [&](int index, std::uint32_t vertex) { lm.set(index, mesh.vertices[vertex]); };
  auto nearest_ring = [](const Segment& seg, double t) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < seg.rings.size(); ++i) {
      if (std::abs(seg.rings[i] - t) < std::abs(seg.rings[best] - t)) best = i;
    }
    return best;
  };
  auto argmax_ring = [&](const Segment& seg, int j, auto&& key) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < seg.rings.size(); ++i) {
      if (key(mesh.vertices[vid(seg, i, j)]) > key(mesh.vertices[vid(seg, best, j)])) best = i;
    }
    return best;
  };
  const std::size_t small_cleft = small.rings.size() - 1;
  const std::size_t large_cleft = large.rings.size() - 1;
  auto anterior = [](const Vec3& v) { return v.y(); };
  auto lateral = [](const Vec3& v) { return std::abs(v.x()); };
  // Canines sit about 0.3 pi either side of the midline.
  auto canine_t = [&](const Segment& seg) { return seg.t_begin < 1.0 ? 0.2 * kPi : 0.8 * kPi; };
  // Midline features go on whichever segment holds the midline (nearest node otherwise).
  const Segment& midline_seg =
      std::abs(small.rings[nearest_ring(small, kPi / 2)] - kPi / 2) <
              std::abs(large.rings[nearest_ring(large, kPi / 2)] - kPi / 2)
          ? small
          : large;
  const std::size_t midline = nearest_ring(midline_seg, kPi / 2);

  put(1, vid(small, argmax_ring(small, crest, anterior), crest));
  put(2, vid(small, nearest_ring(small, canine_t(small)), crest));
  put(3, vid(small, small_cleft, inner_mid));
  put(4, vid(large, argmax_ring(large, crest, anterior), crest));
  put(5, vid(large, large_cleft, outer_mid));
  put(6, vid(small, argmax_ring(small, outer_mid, lateral), outer_mid));
  put(7, vid(large, nearest_ring(large, 0.5 * (large.t_begin + canine_t(large))), 5 * n_phi / 8));
  put(8, vid(large, large_cleft, inner_mid));
  put(9, vid(small, small_cleft, outer_mid));
  put(10, vid(large, argmax_ring(large, outer_mid, lateral), outer_mid));
  put(11, vid(large, nearest_ring(large, canine_t(large)), crest));
  put(12, vid(midline_seg, midline, 7 * n_phi / 8));
  put(13, vid(midline_seg, midline, outer_mid));
  put(14, vid(midline_seg, midline, n_phi / 8));
  put(15, vid(small, 0, crest));
  put(16, vid(large, 0, crest));
  out.large_side = LargeSegmentSide::L16;
  return out;
}

const char* to_string(TreatmentTag tag) { return tag == TreatmentTag::Pre ? "pre" : "post"; }

std::vector<SampledArch> sample_population(int n, const PopulationSpec& spec, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidParams, "population size must be >= 1");
  const Range* ranges[] = {&spec.arch_width,        &spec.arch_depth,        &spec.ridge_height,
                           &spec.ridge_half_width,  &spec.cleft_gap_width,   &spec.cleft_angular_position,
                           &spec.segment_asymmetry, &spec.surface_noise_amplitude};
  for (const Range* r : ranges) {
    if (!(r->min <= r->max)) throw Error(ErrorCode::InvalidRange, "range minimum exceeds maximum");
  }
  if (!(spec.post_gap_scale > 0.0 && spec.post_gap_scale <= 1.0)) {
    throw Error(ErrorCode::InvalidRange, "post_gap_scale must be in (0, 1]");
  }

  Rng rng(derive_seed(seed, "population"));
  std::vector<SampledArch> out;
  out.reserve(static_cast<std::size_t>(n));
  const int n_pre = spec.mode == PopulationSpec::Mode::Balanced ? (n + 1) / 2
                    : spec.mode == PopulationSpec::Mode::PreOnly ? n
                                                                 : 0;
  for (int i = 0; i < n; ++i) {
    SampledArch s;
    s.tag = i < n_pre ? TreatmentTag::Pre : TreatmentTag::Post;
    auto draw = [&](const Range& r) { return rng.uniform(r.min, r.max); };
    ArchParams& p = s.params;
    p.arch_width = draw(spec.arch_width);
    p.arch_depth = draw(spec.arch_depth);
    p.ridge_height = draw(spec.ridge_height);
    p.ridge_half_width = draw(spec.ridge_half_width);
    const double gap = draw(spec.cleft_gap_width);
    p.cleft_gap_width = s.tag == TreatmentTag::Post ? spec.cleft_gap_width.min * spec.post_gap_scale +
                                                          (gap - spec.cleft_gap_width.min) * spec.post_gap_scale
                                                    : gap;
    p.cleft_angular_position = draw(spec.cleft_angular_position);
    p.segment_asymmetry = draw(spec.segment_asymmetry);
    p.surface_noise_amplitude = draw(spec.surface_noise_amplitude);
    p.random_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    out.push_back(s);
  }
  return out;
}

}  // namespace archmark
