#include <cmath>

#include "archmark/error.hpp"
#include "archmark/hourglass.hpp"
#include "archmark/random.hpp"
#include "doctest.h"
#include "nn_layers.hpp"
#include "oracles.hpp"

using namespace archmark;

namespace {

NetworkConfig tiny(std::uint64_t seed = 7) {
  NetworkConfig c;
  c.base_feature_width = 4;
  c.hourglass_depth = 1;
  c.dropout_rate = 0.0;
  c.seed = seed;
  return c;
}

template <class T>
Batch<T> random_batch(int n, int size, std::uint64_t seed) {
  Rng rng(seed);
  Batch<T> b{Tensor<T>(n, 2, size, size), Tensor<T>(n, kLandmarkCount, size, size), {}};
  for (auto& v : b.images.data) v = static_cast<T>(rng.uniform());
  for (auto& v : b.targets.data) v = static_cast<T>(rng.uniform());
  std::array<bool, kLandmarkCount> all;
  all.fill(true);
  b.visible.assign(static_cast<std::size_t>(n), all);
  return b;
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

TEST_CASE("output shapes and validation") {
  NetworkConfig c;
  Network net(c);
  const Tensor<float> x(2, 2, 32, 32);
  const auto y = net.infer(x);
  CHECK(y.stack1.n == 2);
  CHECK(y.stack1.c == 16);
  CHECK(y.stack1.h == 32);
  CHECK(y.stack2.w == 32);
  CHECK(code_of([&] { net.infer(Tensor<float>(2, 2, 100, 100)); }) == ErrorCode::ShapeMismatch);

  c.hourglass_depth = 0;
  CHECK(code_of([&] { Network bad(c); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("default parameter count is fixed") {
  CHECK(Network(NetworkConfig{}).parameter_count() == 645792);
}

TEST_CASE("same seed gives identical initial parameters") {
  Network a(NetworkConfig{}), b(NetworkConfig{});
  const auto pa = a.parameters(), pb = b.parameters();
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(std::equal(pa[i].value.begin(), pa[i].value.end(), pb[i].value.begin(), pb[i].value.end()));
  }
}

TEST_CASE("zero input on a fresh network gives spatially constant maps") {
  Network net(tiny());
  const auto y = net.infer(Tensor<float>(1, 2, 16, 16));
  for (const auto* s : {&y.stack1, &y.stack2}) {
    for (int k = 0; k < 16; ++k) {
      const float* p = s->plane(0, k);
      for (std::size_t i = 1; i < s->plane_size(); ++i) CHECK(p[i] == p[0]);
    }
  }
}

TEST_CASE("inference is repeatable and does not touch the network") {
  Network net(tiny());
  const auto b = random_batch<float>(2, 16, 1);
  const auto before = save_weights(net);
  const auto y1 = net.infer(b.images), y2 = net.forward(b.images, Mode::Inference);
  CHECK(y1.stack2 == y2.stack2);
  CHECK(save_weights(net) == before);
}

TEST_CASE("loss") {
  auto b = random_batch<float>(2, 8, 3);
  StackOutputs<float> same{b.targets, b.targets};
  CHECK(heatmap_loss(same, b.targets, std::span(b.visible)).value == 0.0);

  StackOutputs<float> shifted = same;
  for (auto* t : {&shifted.stack1, &shifted.stack2}) {
    for (auto& v : t->data) v += 1.0f;
  }
  CHECK(heatmap_loss(shifted, b.targets, std::span(b.visible)).value == doctest::Approx(1.0).epsilon(1e-6));

  for (auto& row : b.visible) row.fill(false);
  const auto none = heatmap_loss(shifted, b.targets, std::span(b.visible));
  CHECK(none.value == 0.0);
  for (float g : none.grad_stack1.data) CHECK(g == 0.0f);
}

TEST_CASE("backward bookkeeping") {
  Network net(tiny());
  const auto b = random_batch<float>(2, 16, 2);
  const auto y = net.forward(b.images, Mode::Training);
  const Tensor<float> zero(2, 16, 16, 16);
  net.zero_grad();
  net.backward(zero, zero);
  for (const auto& p : net.parameters()) {
    for (float g : p.grad) CHECK(g == 0.0f);
  }
  CHECK(code_of([&] { net.backward(zero, zero); }) == ErrorCode::NoForwardState);
}

TEST_CASE("analytic gradients match central differences") {
  BasicNetwork<double> net(tiny());
  const auto b = random_batch<double>(2, 16, 99);
  const auto r = oracle::finite_difference_check(net, b, 1e-3, 20, 5);
  CHECK(r.accepted >= 20);
  CHECK(r.worst_relative_error <= 1e-4);
}

TEST_CASE("batch norm normalizes each channel in training mode") {
  nn::BatchNormRelu<double> bn("bn", 3);
  Rng rng(1);
  Tensor<double> x(4, 3, 5, 5);
  for (auto& v : x.data) v = 3.0 + 2.0 * rng.normal();
  bn.forward(x, nn::ForwardContext{true, 0, 0});
  const auto& xh = bn.normalized();
  for (int c = 0; c < 3; ++c) {
    double s = 0, q = 0;
    int n = 0;
    for (int i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < xh.plane_size(); ++j, ++n) {
        const double v = xh.plane(i, c)[j];
        s += v;
        q += v * v;
      }
    }
    const double mean = s / n;
    CHECK(std::abs(mean) < 1e-6);
    CHECK(std::abs(q / n - mean * mean - 1.0) < 1e-5);
  }
}

TEST_CASE("dropout rate and inference behaviour") {
  nn::Builder b(1, 0.3);
  nn::Dropout<double> drop(b);
  const Tensor<double> x(1, 1, 100, 100, 1.0);
  const auto y = drop.forward(x, nn::ForwardContext{true, 5, 0});
  int zeros = 0;
  for (double v : y.data) zeros += v == 0.0;
  const double p = 0.3, n = 10000.0;
  CHECK(std::abs(zeros / n - p) <= 3.0 * std::sqrt(p * (1 - p) / n));
  const auto z = drop.forward(x, nn::ForwardContext{false, 5, 0});
  CHECK(z == x);
}

TEST_CASE("training") {
  const auto b = random_batch<float>(2, 16, 4);
  std::vector<TrainingSample> data;
  for (int i = 0; i < 2; ++i) {
    TrainingSample s;
    s.image = Tensor<float>(1, 2, 16, 16);
    std::copy(b.images.plane(i, 0), b.images.plane(i, 0) + 2 * 256, s.image.data.begin());
    s.target = HeatmapStack(16, 16);
    std::copy(b.targets.plane(i, 0), b.targets.plane(i, 0) + 16 * 256, s.target.maps.begin());
    s.target.target_visible.fill(true);
    data.push_back(std::move(s));
  }
  SUBCASE("zero learning rate leaves the loss unchanged") {
    Network net(tiny());
    TrainConfig tc;
    tc.learning_rate = 0.0;
    tc.epochs = 3;
    tc.batch_size = 1;
    const auto log = train(net, data, tc);
    REQUIRE(log.epoch_loss.size() == 3);
    CHECK(log.epoch_loss[0] == log.epoch_loss[1]);
    CHECK(log.epoch_loss[1] == log.epoch_loss[2]);
  }
  SUBCASE("same seeds give identical weights") {
    TrainConfig tc;
    tc.epochs = 3;
    tc.batch_size = 1;
    NetworkConfig c = tiny();
    c.dropout_rate = 0.1;
    Network a(c), bnet(c);
    train(a, data, tc);
    train(bnet, data, tc);
    CHECK(save_weights(a) == save_weights(bnet));
  }
  SUBCASE("tiny network overfits one batch") {
    Network net(tiny());
    TrainConfig tc;
    tc.epochs = 200;
    tc.batch_size = 2;
    const auto log = train(net, data, tc);
    CHECK(log.epoch_loss.back() < 0.5 * log.epoch_loss.front());
  }
}

TEST_CASE("weights round trip and failure modes") {
  Network net(tiny());
  const auto bytes = save_weights(net);
  const auto back = load_weights<float>(bytes, tiny());
  const auto b = random_batch<float>(1, 16, 6);
  CHECK(back.infer(b.images).stack2 == net.infer(b.images).stack2);

  NetworkConfig wide = tiny();
  wide.base_feature_width = 8;
  CHECK(code_of([&] { load_weights<float>(bytes, wide); }) == ErrorCode::ArchitectureMismatch);

  auto cut = bytes;
  cut.resize(cut.size() / 2);
  CHECK(code_of([&] { load_weights<float>(cut, tiny()); }) == ErrorCode::CorruptFile);

  auto flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x10;
  CHECK(code_of([&] { load_weights<float>(flipped, tiny()); }) == ErrorCode::CorruptFile);
}
