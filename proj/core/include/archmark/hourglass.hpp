#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "archmark/heatmap.hpp"
#include "archmark/mesh_io.hpp"
#include "archmark/tensor.hpp"

namespace archmark {

struct NetworkConfig {
  int input_channels = 2;  // depth + shading
  int base_feature_width = 32;
  int hourglass_depth = 3;  // 2x2 max-pool levels per hourglass
  int n_stacks = 2;
  int n_landmarks = kLandmarkCount;
  double dropout_rate = 0.1;
  std::uint64_t seed = 0;

  bool operator==(const NetworkConfig&) const = default;
};

/// Throws InvalidConfig unless n_stacks == 2, n_landmarks == 16, depth >= 1,
/// widths are positive and 0 <= dropout_rate < 1.
void validate(const NetworkConfig& config);

/// Hash of the architecture-defining fields (not seed, not dropout rate).
std::uint64_t architecture_fingerprint(const NetworkConfig& config);

enum class Mode { Training, Inference };

template <class T>
struct ParameterView {
  const std::string* name;
  const std::vector<int>* shape;
  std::span<T> value;
  std::span<T> grad;  // empty for buffers (batch-norm running statistics)
  bool trainable;
};

template <class T>
struct StackOutputs {
  Tensor<T> stack1;
  Tensor<T> stack2;
};

/// Two-stack hourglass. Residual blocks are three (3x3 conv, batch norm,
/// ReLU) units plus a skip, followed by dropout.
template <class T>
class BasicNetwork {
 public:
  explicit BasicNetwork(const NetworkConfig& config);
  ~BasicNetwork();
  BasicNetwork(BasicNetwork&&) noexcept;
  BasicNetwork& operator=(BasicNetwork&&) noexcept;

  const NetworkConfig& config() const noexcept { return config_; }

  /// Input is N x input_channels x H x W with H, W divisible by 2^depth.
  /// Training mode records state for backward(); inference mode does not
  /// mutate the network.
  StackOutputs<T> forward(const Tensor<T>& input, Mode mode);
  StackOutputs<T> infer(const Tensor<T>& input) const;

  /// Accumulates parameter gradients from the output gradients of the last
  /// training-mode forward and consumes that state (NoForwardState otherwise).
  void backward(const Tensor<T>& grad_stack1, const Tensor<T>& grad_stack2);

  void zero_grad();

  /// Hash of which ReLUs fired and which max-pool inputs won in the last
  /// training forward. Two inputs with equal patterns lie in the same smooth
  /// piece of the (piecewise smooth) network function, barring collisions.
  std::uint64_t activation_pattern() const;

  /// Dropout masks are a pure function of (seed, layer, step).
  void set_dropout_step(std::uint64_t step) noexcept { dropout_step_ = step; }
  std::uint64_t dropout_step() const noexcept { return dropout_step_; }

  std::vector<ParameterView<T>> parameters();
  std::vector<ParameterView<const T>> parameters() const;
  /// Number of trainable scalars.
  std::size_t parameter_count() const;

 private:
  struct Impl;
  NetworkConfig config_;
  std::unique_ptr<Impl> impl_;
  std::uint64_t dropout_step_ = 0;
  bool has_forward_state_ = false;
};

extern template class BasicNetwork<float>;
extern template class BasicNetwork<double>;

using Network = BasicNetwork<float>;

/// One training example: C x H x W image and its target stack.
struct TrainingSample {
  Tensor<float> image;  // n == 1
  HeatmapStack target;
};

template <class T>
struct Batch {
  Tensor<T> images;
  Tensor<T> targets;  // N x 16 x H x W
  std::vector<std::array<bool, kLandmarkCount>> visible;
};

template <class T>
Batch<T> make_batch(std::span<const TrainingSample> samples, std::span<const std::size_t> order);

template <class T>
struct LossResult {
  double value = 0.0;
  Tensor<T> grad_stack1;
  Tensor<T> grad_stack2;
};

/// Mean over both stacks of the per-pixel squared error, restricted to
/// landmarks whose target is visible. Zero (with zero gradient) when none is.
template <class T>
LossResult<T> heatmap_loss(const StackOutputs<T>& predicted, const Tensor<T>& target,
                           std::span<const std::array<bool, kLandmarkCount>> visible);

template <class T>
struct Gradients {
  double loss = 0.0;
  std::vector<std::vector<T>> per_parameter;  // trainable parameters, in parameters() order
};

/// Training-mode forward, loss and backward for one batch.
template <class T>
Gradients<T> compute_gradients(BasicNetwork<T>& network, const Batch<T>& batch);

struct TrainConfig {
  double learning_rate = 5.0;  // the loss is a per-pixel mean
  int batch_size = 4;
  int epochs = 10;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  /// Upper bound on optimizer steps (0 = no bound).
  int max_steps = 0;
};

struct TrainingLog {
  std::vector<double> epoch_loss;  // mean batch loss per epoch
  std::vector<double> step_loss;
};

/// Shuffled mini-batch SGD with momentum. Deterministic given the seeds.
TrainingLog train(Network& network, std::span<const TrainingSample> dataset, const TrainConfig& config);

/// One SGD-with-momentum step using the gradients currently held by the network.
template <class T>
void sgd_step(BasicNetwork<T>& network, std::vector<std::vector<T>>& velocity, double learning_rate,
              double momentum);

template <class T>
std::vector<std::uint8_t> save_weights(const BasicNetwork<T>& network);

/// Throws CorruptFile (checksum, truncation, bad magic), VersionMismatch or
/// ArchitectureMismatch.
template <class T>
BasicNetwork<T> load_weights(std::span<const std::uint8_t> bytes, const NetworkConfig& config);

inline constexpr std::uint32_t kWeightsVersion = 1;

}  // namespace archmark
