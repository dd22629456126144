#include "archmark/hourglass.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <initializer_list>
#include <numeric>

#include <zlib.h>

#include "archmark/error.hpp"
#include "archmark/random.hpp"
#include "byte_io.hpp"
#include "nn_layers.hpp"

namespace archmark {

void validate(const NetworkConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidConfig, what);
  };
  require(c.n_stacks == 2, "n_stacks must be 2");
  require(c.n_landmarks == kLandmarkCount, "n_landmarks must be 16");
  require(c.hourglass_depth >= 1 && c.hourglass_depth <= 8, "hourglass_depth must be in 1..8");
  require(c.input_channels >= 1, "input_channels must be >= 1");
  require(c.base_feature_width >= 1, "base_feature_width must be >= 1");
  require(c.dropout_rate >= 0.0 && c.dropout_rate < 1.0, "dropout_rate must be in [0, 1)");
}

std::uint64_t architecture_fingerprint(const NetworkConfig& c) {
  std::uint64_t h = derive_seed(0x414d4847ULL, "architecture");
  for (int v : {c.input_channels, c.base_feature_width, c.hourglass_depth, c.n_stacks, c.n_landmarks}) {
    h = derive_seed(h, static_cast<std::uint64_t>(v));
  }
  return h;
}

// Heads start close to the all-zero map instead of at He scale.
constexpr double kHeadInitStd = 1e-3;

template <class T>
struct BasicNetwork<T>::Impl {
  nn::Builder builder;
  nn::ConvUnit<T> stem;
  nn::Residual<T> stem_res;
  nn::Hourglass<T> hg0, hg1;
  nn::Residual<T> feat0, feat1;
  nn::ConvUnit<T> lin0, lin1;  // 1x1 conv + BN + ReLU ahead of each head
  nn::Conv2d<T> head0, head1;
  nn::Conv2d<T> merge_feat, merge_heat;
  std::vector<nn::Parameter<T>*> params;

  explicit Impl(const NetworkConfig& c)
      : builder(c.seed, c.dropout_rate),
        stem(builder, "stem", c.input_channels, c.base_feature_width, /*need_input_grad=*/false),
        stem_res(builder, "stem.res", c.base_feature_width, c.base_feature_width),
        hg0(builder, "stack0.hg", c.hourglass_depth, c.base_feature_width),
        hg1(builder, "stack1.hg", c.hourglass_depth, c.base_feature_width),
        feat0(builder, "stack0.feat", c.base_feature_width, c.base_feature_width),
        feat1(builder, "stack1.feat", c.base_feature_width, c.base_feature_width),
        lin0(builder, "stack0.lin", c.base_feature_width, c.base_feature_width, true, 1),
        lin1(builder, "stack1.lin", c.base_feature_width, c.base_feature_width, true, 1),
        head0(builder, "stack0.head", c.base_feature_width, c.n_landmarks, 1, true, true, kHeadInitStd),
        head1(builder, "stack1.head", c.base_feature_width, c.n_landmarks, 1, true, true, kHeadInitStd),
        merge_feat(builder, "stack0.merge_feat", c.base_feature_width, c.base_feature_width, 1, true),
        merge_heat(builder, "stack0.merge_heat", c.n_landmarks, c.base_feature_width, 1, true) {
    stem.collect(params);
    stem_res.collect(params);
    hg0.collect(params);
    feat0.collect(params);
    lin0.collect(params);
    head0.collect(params);
    merge_feat.collect(params);
    merge_heat.collect(params);
    hg1.collect(params);
    feat1.collect(params);
    lin1.collect(params);
    head1.collect(params);
  }

  std::uint64_t pattern() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const nn::Module<T>* m : std::initializer_list<const nn::Module<T>*>{
             &stem, &stem_res, &hg0, &feat0, &lin0, &hg1, &feat1, &lin1}) {
      m->fold_pattern(h);
    }
    return h;
  }

  StackOutputs<T> run(const Tensor<T>& input, const nn::ForwardContext& ctx) const {
    const Tensor<T> x = stem_res.forward(stem.forward(input, ctx), ctx);
    const Tensor<T> f0 = lin0.forward(feat0.forward(hg0.forward(x, ctx), ctx), ctx);
    StackOutputs<T> out;
    out.stack1 = head0.forward(f0, ctx);
    Tensor<T> x2 = x;
    nn::add_into(x2, merge_feat.forward(f0, ctx));
    nn::add_into(x2, merge_heat.forward(out.stack1, ctx));
    out.stack2 = head1.forward(lin1.forward(feat1.forward(hg1.forward(x2, ctx), ctx), ctx), ctx);
    return out;
  }

  void back(const Tensor<T>& g1, const Tensor<T>& g2) {
    const Tensor<T> gx2 = hg1.backward(feat1.backward(lin1.backward(head1.backward(g2))));
    Tensor<T> gheat = merge_heat.backward(gx2);
    nn::add_into(gheat, g1);
    Tensor<T> gf0 = merge_feat.backward(gx2);
    nn::add_into(gf0, head0.backward(gheat));
    Tensor<T> gx = hg0.backward(feat0.backward(lin0.backward(gf0)));
    nn::add_into(gx, gx2);
    stem.backward(stem_res.backward(gx));
  }
};

template <class T>
BasicNetwork<T>::BasicNetwork(const NetworkConfig& config) : config_(config) {
  validate(config_);
  impl_ = std::make_unique<Impl>(config_);
}

template <class T>
BasicNetwork<T>::~BasicNetwork() = default;
template <class T>
BasicNetwork<T>::BasicNetwork(BasicNetwork&&) noexcept = default;
template <class T>
BasicNetwork<T>& BasicNetwork<T>::operator=(BasicNetwork&&) noexcept = default;

namespace {

void check_input(const NetworkConfig& c, int n, int ch, int h, int w) {
  const int div = 1 << c.hourglass_depth;
  if (n < 1 || ch != c.input_channels || h < div || w < div || h % div != 0 || w % div != 0) {
    throw Error(ErrorCode::ShapeMismatch,
                "input " + std::to_string(ch) + "x" + std::to_string(h) + "x" + std::to_string(w) + " needs " +
                    std::to_string(c.input_channels) + " channels and sides divisible by " + std::to_string(div));
  }
}

}  // namespace

template <class T>
StackOutputs<T> BasicNetwork<T>::forward(const Tensor<T>& input, Mode mode) {
  if (mode == Mode::Inference) return infer(input);
  check_input(config_, input.n, input.c, input.h, input.w);
  nn::ForwardContext ctx{true, derive_seed(config_.seed, "dropout"), dropout_step_};
  auto out = impl_->run(input, ctx);
  has_forward_state_ = true;
  return out;
}

template <class T>
StackOutputs<T> BasicNetwork<T>::infer(const Tensor<T>& input) const {
  check_input(config_, input.n, input.c, input.h, input.w);
  return impl_->run(input, nn::ForwardContext{false, 0, 0});
}

template <class T>
void BasicNetwork<T>::backward(const Tensor<T>& grad_stack1, const Tensor<T>& grad_stack2) {
  if (!has_forward_state_) throw Error(ErrorCode::NoForwardState, "backward needs a preceding training forward");
  has_forward_state_ = false;
  impl_->back(grad_stack1, grad_stack2);
}

template <class T>
std::uint64_t BasicNetwork<T>::activation_pattern() const {
  if (!has_forward_state_) throw Error(ErrorCode::NoForwardState, "activation pattern needs a training forward");
  return impl_->pattern();
}

template <class T>
void BasicNetwork<T>::zero_grad() {
  for (auto* p : impl_->params) std::fill(p->grad.begin(), p->grad.end(), T(0));
}

template <class T>
std::vector<ParameterView<T>> BasicNetwork<T>::parameters() {
  std::vector<ParameterView<T>> out;
  for (auto* p : impl_->params) out.push_back({&p->name, &p->shape, p->value, p->grad, p->trainable});
  return out;
}

template <class T>
std::vector<ParameterView<const T>> BasicNetwork<T>::parameters() const {
  std::vector<ParameterView<const T>> out;
  for (const auto* p : impl_->params) {
    out.push_back({&p->name, &p->shape, std::span<const T>(p->value), std::span<const T>(p->grad), p->trainable});
  }
  return out;
}

template <class T>
std::size_t BasicNetwork<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto* p : impl_->params) {
    if (p->trainable) n += p->value.size();
  }
  return n;
}

template class BasicNetwork<float>;
template class BasicNetwork<double>;

// ---------------------------------------------------------------------------

template <class T>
Batch<T> make_batch(std::span<const TrainingSample> samples, std::span<const std::size_t> order) {
  if (order.empty()) throw Error(ErrorCode::EmptyDataset, "empty batch");
  const auto& first = samples[order[0]];
  const int c = first.image.c, h = first.image.h, w = first.image.w;
  const int n = static_cast<int>(order.size());
  Batch<T> batch{Tensor<T>(n, c, h, w), Tensor<T>(n, kLandmarkCount, h, w), {}};
  for (int i = 0; i < n; ++i) {
    const auto& s = samples[order[static_cast<std::size_t>(i)]];
    if (s.image.c != c || s.image.h != h || s.image.w != w || s.target.height != h || s.target.width != w) {
      throw Error(ErrorCode::ShapeMismatch, "samples in a batch must share their shape");
    }
    std::copy(s.image.data.begin(), s.image.data.end(), batch.images.plane(i, 0));
    std::copy(s.target.maps.begin(), s.target.maps.end(), batch.targets.plane(i, 0));
    batch.visible.push_back(s.target.target_visible);
  }
  return batch;
}

template <class T>
LossResult<T> heatmap_loss(const StackOutputs<T>& predicted, const Tensor<T>& target,
                           std::span<const std::array<bool, kLandmarkCount>> visible) {
  const Tensor<T>* preds[2] = {&predicted.stack1, &predicted.stack2};
  for (const auto* p : preds) {
    if (!p->same_shape(target)) throw Error(ErrorCode::ShapeMismatch, "prediction and target shapes differ");
  }
  if (target.c != kLandmarkCount || visible.size() != static_cast<std::size_t>(target.n)) {
    throw Error(ErrorCode::ShapeMismatch, "target needs 16 channels and one visibility row per sample");
  }
  LossResult<T> out{0.0, Tensor<T>(target.n, target.c, target.h, target.w),
                    Tensor<T>(target.n, target.c, target.h, target.w)};
  std::size_t visible_maps = 0;
  for (const auto& row : visible) visible_maps += static_cast<std::size_t>(std::count(row.begin(), row.end(), true));
  if (visible_maps == 0) return out;

  const double count = static_cast<double>(visible_maps) * static_cast<double>(target.plane_size());
  Tensor<T>* grads[2] = {&out.grad_stack1, &out.grad_stack2};
  double total = 0.0;
  for (int s = 0; s < 2; ++s) {
    double sse = 0.0;
    for (int n = 0; n < target.n; ++n) {
      for (int k = 0; k < kLandmarkCount; ++k) {
        if (!visible[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)]) continue;
        const T* p = preds[s]->plane(n, k);
        const T* t = target.plane(n, k);
        T* g = grads[s]->plane(n, k);
        for (std::size_t i = 0; i < target.plane_size(); ++i) {
          const double d = static_cast<double>(p[i]) - t[i];
          sse += d * d;
          // d(0.5 * (mse1 + mse2)) / dp = d / count
          g[i] = static_cast<T>(d / count);
        }
      }
    }
    total += sse / count;
  }
  out.value = 0.5 * total;
  return out;
}

template <class T>
Gradients<T> compute_gradients(BasicNetwork<T>& network, const Batch<T>& batch) {
  network.zero_grad();
  const auto pred = network.forward(batch.images, Mode::Training);
  const auto loss = heatmap_loss(pred, batch.targets, std::span(batch.visible));
  network.backward(loss.grad_stack1, loss.grad_stack2);
  Gradients<T> g;
  g.loss = loss.value;
  for (const auto& p : network.parameters()) {
    if (p.trainable) g.per_parameter.emplace_back(p.grad.begin(), p.grad.end());
  }
  return g;
}

template <class T>
void sgd_step(BasicNetwork<T>& network, std::vector<std::vector<T>>& velocity, double learning_rate,
              double momentum) {
  auto params = network.parameters();
  std::size_t slot = 0;
  for (auto& p : params) {
    if (!p.trainable) continue;
    if (velocity.size() <= slot) velocity.emplace_back(p.value.size(), T(0));
    auto& v = velocity[slot++];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      v[i] = static_cast<T>(momentum * v[i] + p.grad[i]);
      p.value[i] -= static_cast<T>(learning_rate * v[i]);
    }
  }
}

TrainingLog train(Network& network, std::span<const TrainingSample> dataset, const TrainConfig& config) {
  if (dataset.empty()) throw Error(ErrorCode::EmptyDataset, "training set is empty");
  if (!(config.learning_rate >= 0.0) || config.batch_size < 1 || config.epochs < 0) {
    throw Error(ErrorCode::InvalidConfig, "invalid training configuration");
  }
  TrainingLog log;
  Rng rng(derive_seed(config.seed, "shuffle"));
  std::vector<std::size_t> order(dataset.size());
  std::vector<std::vector<float>> velocity;
  std::uint64_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order.begin(), order.end());
    double sum = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      if (config.max_steps > 0 && step >= static_cast<std::uint64_t>(config.max_steps)) break;
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      const auto batch = make_batch<float>(dataset, std::span(order).subspan(start, end - start));
      network.set_dropout_step(step);
      network.zero_grad();
      const auto pred = network.forward(batch.images, Mode::Training);
      const auto loss = heatmap_loss(pred, batch.targets, std::span(batch.visible));
      network.backward(loss.grad_stack1, loss.grad_stack2);
      sgd_step(network, velocity, config.learning_rate, config.momentum);
      log.step_loss.push_back(loss.value);
      sum += loss.value;
      ++batches;
      ++step;
    }
    if (batches == 0) break;
    log.epoch_loss.push_back(sum / batches);
  }
  return log;
}

// ---------------------------------------------------------------------------
// Weights file: "AMHG" | version u32 | fingerprint u64 | scalar bytes u32 |
// tensor count u32 | per tensor (name, ndims u32, dims u32...) | values | CRC32

template <class T>
std::vector<std::uint8_t> save_weights(const BasicNetwork<T>& network) {
  detail::ByteWriter out;
  out.raw("AMHG", 4);
  out.u32(kWeightsVersion);
  out.u64(architecture_fingerprint(network.config()));
  out.u32(sizeof(T));
  const auto params = network.parameters();
  out.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    out.str(*p.name);
    out.u32(static_cast<std::uint32_t>(p.shape->size()));
    for (int d : *p.shape) out.u32(static_cast<std::uint32_t>(d));
  }
  for (const auto& p : params) {
    for (T v : p.value) {
      if constexpr (sizeof(T) == 4) {
        out.f32(v);
      } else {
        out.f64(v);
      }
    }
  }
  auto& bytes = out.bytes();
  const auto crc = static_cast<std::uint32_t>(crc32(0L, bytes.data(), static_cast<uInt>(bytes.size())));
  out.u32(crc);
  return std::move(out.bytes());
}

namespace {

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> b) : bytes_(b) {}

  const std::uint8_t* take(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw Error(ErrorCode::CorruptFile, "weights file is truncated");
    const auto* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::uint32_t u32() { return detail::read_u32_le(take(4)); }
  std::uint64_t u64() { return detail::read_u64_le(take(8)); }
  std::string str() {
    const auto n = u32();
    const auto* p = take(n);
    return {reinterpret_cast<const char*>(p), n};
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

template <class T>
BasicNetwork<T> load_weights(std::span<const std::uint8_t> bytes, const NetworkConfig& config) {
  if (bytes.size() < 4 + 4 + 8 + 4 + 4 + 4) throw Error(ErrorCode::CorruptFile, "weights file is truncated");
  const std::size_t body = bytes.size() - 4;
  const auto stored_crc = detail::read_u32_le(bytes.data() + body);
  const auto crc = static_cast<std::uint32_t>(crc32(0L, bytes.data(), static_cast<uInt>(body)));
  if (crc != stored_crc) throw Error(ErrorCode::CorruptFile, "weights checksum mismatch");

  ByteReader in(bytes.first(body));
  if (std::memcmp(in.take(4), "AMHG", 4) != 0) throw Error(ErrorCode::CorruptFile, "not an AMHG weights file");
  const auto version = in.u32();
  if (version != kWeightsVersion) {
    throw Error(ErrorCode::VersionMismatch, "weights format version " + std::to_string(version) + ", expected " +
                                                std::to_string(kWeightsVersion));
  }
  if (in.u64() != architecture_fingerprint(config)) {
    throw Error(ErrorCode::ArchitectureMismatch, "weights were saved for a different architecture");
  }
  const auto scalar = in.u32();
  if (scalar != 4 && scalar != 8) throw Error(ErrorCode::CorruptFile, "unsupported scalar size");

  BasicNetwork<T> net(config);
  auto params = net.parameters();
  if (in.u32() != params.size()) throw Error(ErrorCode::ArchitectureMismatch, "parameter tensor count differs");
  for (const auto& p : params) {
    const auto name = in.str();
    const auto ndims = in.u32();
    std::vector<int> dims(ndims);
    for (auto& d : dims) d = static_cast<int>(in.u32());
    if (name != *p.name || dims != *p.shape) {
      throw Error(ErrorCode::ArchitectureMismatch, "tensor '" + name + "' does not match '" + *p.name + "'");
    }
  }
  for (auto& p : params) {
    const auto* raw = in.take(p.value.size() * scalar);
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double v = scalar == 4 ? detail::read_f32_le(raw + 4 * i) : detail::read_f64_le(raw + 8 * i);
      p.value[i] = static_cast<T>(v);
    }
  }
  return net;
}

#define ARCHMARK_INSTANTIATE(T)                                                                              \
  template Batch<T> make_batch<T>(std::span<const TrainingSample>, std::span<const std::size_t>);            \
  template LossResult<T> heatmap_loss<T>(const StackOutputs<T>&, const Tensor<T>&,                           \
                                         std::span<const std::array<bool, kLandmarkCount>>);                 \
  template Gradients<T> compute_gradients<T>(BasicNetwork<T>&, const Batch<T>&);                             \
  template void sgd_step<T>(BasicNetwork<T>&, std::vector<std::vector<T>>&, double, double);                 \
  template std::vector<std::uint8_t> save_weights<T>(const BasicNetwork<T>&);                                \
  template BasicNetwork<T> load_weights<T>(std::span<const std::uint8_t>, const NetworkConfig&);

ARCHMARK_INSTANTIATE(float)
ARCHMARK_INSTANTIATE(double)

#undef ARCHMARK_INSTANTIATE

}  // namespace archmark
