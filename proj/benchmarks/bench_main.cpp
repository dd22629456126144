#include <benchmark/benchmark.h>

#include <cmath>

#include "archmark/consensus.hpp"
#include "archmark/hourglass.hpp"
#include "archmark/mesh_io.hpp"
#include "archmark/multiview.hpp"
#include "archmark/random.hpp"
#include "archmark/synth_arch.hpp"

using namespace archmark;

namespace {

TriangleMesh heightfield(int nx, int ny) {
  TriangleMesh m;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) m.vertices.emplace_back(0.4 * i, 0.3 * j, 3.0 * std::sin(0.2 * i) * std::cos(0.1 * j));
  }
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const auto a = static_cast<std::uint32_t>(j * nx + i);
      m.faces.push_back({a, a + 1, a + static_cast<std::uint32_t>(nx) + 1});
      m.faces.push_back({a, a + static_cast<std::uint32_t>(nx) + 1, a + static_cast<std::uint32_t>(nx)});
    }
  }
  return m;
}

}  // namespace

static void BM_Rasterize(benchmark::State& state) {
  const auto m = heightfield(126, 201);
  CameraConfig cc;
  cc.image_size = static_cast<int>(state.range(0));
  const auto cam = sample_cameras(bounding_box(m), 2, cc)[0];
  for (auto _ : state) benchmark::DoNotOptimize(rasterize(cam, m));
  state.counters["faces"] = static_cast<double>(m.faces.size());
}
BENCHMARK(BM_Rasterize)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_RasterizeArch(benchmark::State& state) {
  const auto arch = generate_arch(ArchParams{});
  const auto cam = sample_cameras(bounding_box(arch.mesh), 2)[0];
  for (auto _ : state) benchmark::DoNotOptimize(rasterize(cam, arch.mesh));
}
BENCHMARK(BM_RasterizeArch)->Unit(benchmark::kMillisecond);

static void BM_NetworkInference(benchmark::State& state) {
  NetworkConfig c;
  c.base_feature_width = static_cast<int>(state.range(0));
  Network net(c);
  Rng rng(1);
  Tensor<float> x(1, 2, 64, 64);
  for (auto& v : x.data) v = static_cast<float>(rng.uniform());
  for (auto _ : state) benchmark::DoNotOptimize(net.infer(x));
}
BENCHMARK(BM_NetworkInference)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_TrainingStep(benchmark::State& state) {
  NetworkConfig c;
  c.base_feature_width = 16;
  Network net(c);
  Rng rng(2);
  Tensor<float> x(4, 2, 64, 64);
  Tensor<float> t(4, kLandmarkCount, 64, 64);
  for (auto& v : x.data) v = static_cast<float>(rng.uniform());
  std::array<bool, kLandmarkCount> all;
  all.fill(true);
  const std::vector<std::array<bool, kLandmarkCount>> visible(4, all);
  std::vector<std::vector<float>> velocity;
  for (auto _ : state) {
    net.zero_grad();
    const auto y = net.forward(x, Mode::Training);
    const auto loss = heatmap_loss(y, t, std::span(visible));
    net.backward(loss.grad_stack1, loss.grad_stack2);
    sgd_step(net, velocity, 1e-3, 0.9);
  }
}
BENCHMARK(BM_TrainingStep)->Unit(benchmark::kMillisecond);

static void BM_Consensus(benchmark::State& state) {
  Rng rng(3);
  const auto n = static_cast<int>(state.range(0));
  std::vector<Ray> rays;
  std::vector<double> w;
  for (int i = 0; i < n; ++i) {
    const Vec3 d = Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
    rays.push_back({Vec3(rng.normal(), rng.normal(), rng.normal()) - 30.0 * d, d});
    w.push_back(rng.uniform(0.1, 1.0));
  }
  const ConsensusConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(robust_consensus(rays, w, cfg));
}
BENCHMARK(BM_Consensus)->Arg(4)->Arg(24)->Arg(96);

static void BM_SnapToSurface(benchmark::State& state) {
  const auto arch = generate_arch(ArchParams{});
  Rng rng(4);
  const auto box = bounding_box(arch.mesh);
  for (auto _ : state) {
    const Vec3 p(rng.uniform(box.min.x(), box.max.x()), rng.uniform(box.min.y(), box.max.y()),
                 rng.uniform(box.min.z(), box.max.z()));
    benchmark::DoNotOptimize(snap_to_surface(arch.mesh, p));
  }
}
BENCHMARK(BM_SnapToSurface)->Unit(benchmark::kMicrosecond);

static void BM_ParseBinaryStl(benchmark::State& state) {
  const auto bytes = write_stl(heightfield(126, 201), StlMode::Binary);
  for (auto _ : state) benchmark::DoNotOptimize(parse_stl(bytes));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes.size()));
}
BENCHMARK(BM_ParseBinaryStl)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
