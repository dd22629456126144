#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "archmark/consensus.hpp"
#include "archmark/heatmap.hpp"
#include "archmark/hourglass.hpp"
#include "archmark/mesh_io.hpp"
#include "archmark/multiview.hpp"

namespace archmark {

struct ViewConfig {
  int n_views = 24;
  CameraConfig camera;
};

/// Two input channels per pixel: normalized nearness (1 at the closest
/// surface point, 0 at the farthest and on background) and shading.
Tensor<float> network_input(const RenderedView& rendered);

/// Renders every view of the mesh; views fan out over `threads` workers.
std::vector<RenderedView> render_views(const TriangleMesh& mesh, const ViewConfig& config, int threads = 1);

/// One sample per view with Gaussian targets for the visible landmarks.
std::vector<TrainingSample> make_training_samples(const TriangleMesh& mesh, const LandmarkSet& landmarks,
                                                  const ViewConfig& views, const HeatmapConfig& heatmaps,
                                                  int threads = 1);

/// Source of per-view heatmap stacks.
class HeatmapPredictor {
 public:
  virtual ~HeatmapPredictor() = default;
  virtual std::vector<HeatmapStack> predict(std::span<const RenderedView> views) const = 0;
};

/// Second-stack output of a network, evaluated in inference mode.
class NetworkPredictor final : public HeatmapPredictor {
 public:
  explicit NetworkPredictor(const Network& network, int batch_size = 4) : network_(network), batch_(batch_size) {}
  std::vector<HeatmapStack> predict(std::span<const RenderedView> views) const override;

 private:
  const Network& network_;
  int batch_;
};

/// Exact Gaussian targets from known landmarks, optionally with isotropic
/// pixel noise on every peak center (seeded per view and landmark).
class OraclePredictor final : public HeatmapPredictor {
 public:
  OraclePredictor(LandmarkSet truth, HeatmapConfig heatmaps, double pixel_noise_sigma = 0.0,
                  std::uint64_t seed = 0)
      : truth_(std::move(truth)), heatmaps_(heatmaps), noise_(pixel_noise_sigma), seed_(seed) {}
  std::vector<HeatmapStack> predict(std::span<const RenderedView> views) const override;

 private:
  LandmarkSet truth_;
  HeatmapConfig heatmaps_;
  double noise_;
  std::uint64_t seed_;
};

/// All-zero heatmaps.
class ZeroPredictor final : public HeatmapPredictor {
 public:
  std::vector<HeatmapStack> predict(std::span<const RenderedView> views) const override;
};

struct Prediction {
  LandmarkSet landmarks;
  std::array<LandmarkEstimate, kLandmarkCount> estimates{};
};

/// cameras -> rasterize -> heatmaps -> peaks -> rays weighted by peak
/// confidence -> robust consensus -> optional surface snap. Landmarks whose
/// estimate is not ok are marked absent.
Prediction predict_landmarks(const TriangleMesh& mesh, const HeatmapPredictor& predictor, const ViewConfig& views,
                             const HeatmapConfig& heatmaps, const ConsensusConfig& consensus, int threads = 1);

}  // namespace archmark
