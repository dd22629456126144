#include "archmark/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "archmark/error.hpp"
#include "archmark/parallel.hpp"
#include "archmark/random.hpp"

namespace archmark {

Tensor<float> network_input(const RenderedView& r) {
  const int w = r.depth.width, h = r.depth.height;
  Tensor<float> t(1, 2, h, w);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double d : r.depth.data) {
    if (std::isfinite(d)) {
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  const double span = hi - lo;
  float* near = t.plane(0, 0);
  float* shade = t.plane(0, 1);
  for (std::size_t i = 0; i < r.depth.data.size(); ++i) {
    const double d = r.depth.data[i];
    if (std::isfinite(d)) near[i] = span > 0.0 ? static_cast<float>((hi - d) / span) : 1.0f;
    shade[i] = r.shading.data[i];
  }
  return t;
}

std::vector<RenderedView> render_views(const TriangleMesh& mesh, const ViewConfig& config, int threads) {
  const auto cameras = sample_cameras(bounding_box(mesh), config.n_views, config.camera);
  std::vector<RenderedView> views(cameras.size());
  parallel_for(cameras.size(), threads, [&](std::size_t i) { views[i] = rasterize(cameras[i], mesh); });
  return views;
}

std::vector<TrainingSample> make_training_samples(const TriangleMesh& mesh, const LandmarkSet& landmarks,
                                                  const ViewConfig& views, const HeatmapConfig& heatmaps,
                                                  int threads) {
  const auto rendered = render_views(mesh, views, threads);
  std::vector<TrainingSample> out(rendered.size());
  parallel_for(rendered.size(), threads, [&](std::size_t i) {
    out[i].image = network_input(rendered[i]);
    out[i].target = make_targets(rendered[i].camera, landmarks, rendered[i], heatmaps.sigma_px,
                                 heatmaps.visibility_epsilon_mm);
    out[i].target.view_id = static_cast<int>(i);
  });
  return out;
}

std::vector<HeatmapStack> NetworkPredictor::predict(std::span<const RenderedView> views) const {
  std::vector<HeatmapStack> out;
  const std::size_t step = static_cast<std::size_t>(std::max(1, batch_));
  for (std::size_t start = 0; start < views.size(); start += step) {
    const std::size_t n = std::min(step, views.size() - start);
    const int h = views[start].depth.height, w = views[start].depth.width;
    Tensor<float> batch(static_cast<int>(n), 2, h, w);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = network_input(views[start + i]);
      if (x.h != h || x.w != w) throw Error(ErrorCode::ShapeMismatch, "views must share one image size");
      std::copy(x.data.begin(), x.data.end(), batch.plane(static_cast<int>(i), 0));
    }
    const auto y = network_.infer(batch).stack2;
    for (std::size_t i = 0; i < n; ++i) {
      HeatmapStack s(h, w, static_cast<int>(start + i));
      const float* src = y.plane(static_cast<int>(i), 0);
      std::copy(src, src + s.maps.size(), s.maps.begin());
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<HeatmapStack> OraclePredictor::predict(std::span<const RenderedView> views) const {
  std::vector<HeatmapStack> out;
  for (std::size_t v = 0; v < views.size(); ++v) {
    const auto& r = views[v];
    HeatmapStack s(r.camera.height, r.camera.width, static_cast<int>(v));
    for (int k = 0; k < kLandmarkCount; ++k) {
      const auto& lm = truth_.at(k + 1);
      if (!lm.present || !is_visible(r, lm.position, heatmaps_.visibility_epsilon_mm)) continue;
      Vec2 center = project_point(r.camera, lm.position).pixel;
      if (noise_ > 0.0) {
        Rng rng(derive_seed(derive_seed(seed_, static_cast<std::uint64_t>(v)), static_cast<std::uint64_t>(k)));
        center += noise_ * Vec2(rng.normal(), rng.normal());
      }
      write_gaussian(s.channel(k), s.width, s.height, center, heatmaps_.sigma_px);
      s.target_visible[static_cast<std::size_t>(k)] = true;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<HeatmapStack> ZeroPredictor::predict(std::span<const RenderedView> views) const {
  std::vector<HeatmapStack> out;
  for (std::size_t v = 0; v < views.size(); ++v) {
    out.emplace_back(views[v].camera.height, views[v].camera.width, static_cast<int>(v));
  }
  return out;
}

Prediction predict_landmarks(const TriangleMesh& mesh, const HeatmapPredictor& predictor, const ViewConfig& views,
                             const HeatmapConfig& heatmaps, const ConsensusConfig& consensus, int threads) {
  validate(consensus);
  const auto rendered = render_views(mesh, views, threads);
  const auto stacks = predictor.predict(rendered);
  if (stacks.size() != rendered.size()) throw Error(ErrorCode::ShapeMismatch, "one heatmap stack per view expected");

  Prediction pred;
  parallel_for(kLandmarkCount, threads, [&](std::size_t k) {
    std::vector<Ray> rays;
    std::vector<double> weights;
    for (std::size_t v = 0; v < rendered.size(); ++v) {
      const auto& s = stacks[v];
      const auto peak = extract_peak(s.channel(static_cast<int>(k)), s.width, s.height, heatmaps.min_confidence);
      if (!peak.found) continue;
      rays.push_back(backproject(rendered[v].camera, peak.pixel));
      weights.push_back(peak.confidence);
    }
    auto est = robust_consensus(rays, weights, consensus);
    if (est.status == EstimateStatus::Ok && consensus.snap_to_surface) {
      const auto snapped = snap_to_surface(mesh, est.position);
      est.snap_distance = snapped.distance;
      est.position = snapped.point;
    }
    pred.estimates[k] = est;
  });
  for (int k = 0; k < kLandmarkCount; ++k) {
    const auto& est = pred.estimates[static_cast<std::size_t>(k)];
    if (est.status == EstimateStatus::Ok) pred.landmarks.set(k + 1, est.position);
  }
  return pred;
}

}  // namespace archmark
