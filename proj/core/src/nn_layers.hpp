#pragma once

// Building blocks of the hourglass network: forward/backward kernels for
// convolution, batch norm + ReLU, pooling, upsampling and dropout, and the
// residual / hourglass modules composed from them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "archmark/error.hpp"
#include "archmark/random.hpp"
#include "archmark/tensor.hpp"

namespace archmark::nn {

inline constexpr double kBatchNormEpsilon = 1e-5;
inline constexpr double kBatchNormMomentum = 0.1;

template <class T>
struct Parameter {
  std::string name;
  std::vector<int> shape;
  std::vector<T> value;
  std::vector<T> grad;  // empty for buffers
  bool trainable = true;

  Parameter(std::string n, std::vector<int> s, bool train = true) : name(std::move(n)), shape(std::move(s)) {
    std::size_t count = 1;
    for (int d : shape) count *= static_cast<std::size_t>(d);
    value.assign(count, T(0));
    trainable = train;
    if (trainable) grad.assign(count, T(0));
  }
};

struct ForwardContext {
  bool training = false;
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
};

/// Shared construction state: parameter naming, He initialization, and
/// sequential ids for dropout streams.
struct Builder {
  Rng rng;
  std::uint64_t next_dropout_id = 0;
  double dropout_rate = 0.0;

  explicit Builder(std::uint64_t seed, double dropout) : rng(derive_seed(seed, "he-init")), dropout_rate(dropout) {}
};

template <class T>
void add_into(Tensor<T>& dst, const Tensor<T>& src) {
  for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}

// Eight-lane dot product; the fixed association keeps results reproducible.
template <class T>
T dot(const T* a, const T* b, int n) {
  T acc[8] = {};
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    for (int l = 0; l < 8; ++l) acc[l] += a[i + l] * b[i + l];
  }
  T s = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

template <class T>
class Module {
 public:
  virtual ~Module() = default;
  virtual Tensor<T> forward(const Tensor<T>& x, const ForwardContext& ctx) const = 0;
  virtual Tensor<T> backward(const Tensor<T>& grad) = 0;
  virtual void collect(std::vector<Parameter<T>*>& out) = 0;
  /// Folds the ReLU on/off and pooling choices of the last training forward
  /// into `h`.
  virtual void fold_pattern(std::uint64_t& /*h*/) const {}
};

inline void fold(std::uint64_t& h, std::uint64_t v) { h = (h ^ v) * 0x100000001b3ULL; }

/// Stride-1 "same" convolution with kernel 1 or 3 and zero padding.
template <class T>
class Conv2d final : public Module<T> {
 public:
  /// init_std 0 selects He initialization.
  Conv2d(Builder& b, const std::string& name, int in, int out, int kernel, bool bias, bool need_input_grad = true,
         double init_std = 0.0)
      : in_(in),
        out_(out),
        k_(kernel),
        need_input_grad_(need_input_grad),
        weight_(name + ".weight", {out, in, kernel, kernel}) {
    const double std_dev =
        init_std > 0.0 ? init_std : std::sqrt(2.0 / (static_cast<double>(in) * kernel * kernel));
    for (auto& w : weight_.value) w = static_cast<T>(std_dev * b.rng.normal());
    if (bias) bias_ = std::make_unique<Parameter<T>>(name + ".bias", std::vector<int>{out});
  }

  Tensor<T> forward(const Tensor<T>& x, const ForwardContext& ctx) const override {
    if (x.c != in_) throw Error(ErrorCode::ShapeMismatch, "convolution input channel mismatch");
    if (ctx.training) input_ = x;
    Tensor<T> y(x.n, out_, x.h, x.w);
    const int H = x.h, W = x.w;
    for (int n = 0; n < x.n; ++n) {
      for (int oc = 0; oc < out_; ++oc) {
        T* o = y.plane(n, oc);
        if (bias_) std::fill(o, o + y.plane_size(), bias_->value[static_cast<std::size_t>(oc)]);
        for (int ic = 0; ic < in_; ++ic) {
          const T* in = x.plane(n, ic);
          const T* wk = weight_.value.data() + (static_cast<std::size_t>(oc) * in_ + ic) * k_ * k_;
          if (k_ == 1) {
            const T wv = wk[0];
            for (std::size_t i = 0; i < y.plane_size(); ++i) o[i] += wv * in[i];
          } else {
            conv3x3_plane(o, in, wk, H, W);
          }
        }
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    const Tensor<T>& x = input_;
    if (x.data.empty()) throw Error(ErrorCode::NoForwardState, "convolution has no recorded input");
    if (g.n != x.n || g.c != out_ || g.h != x.h || g.w != x.w) {
      throw Error(ErrorCode::ShapeMismatch, "convolution gradient shape mismatch");
    }
    const int H = x.h, W = x.w;
    Tensor<T> gin;
    if (need_input_grad_) gin = Tensor<T>(x.n, in_, H, W);
    for (int n = 0; n < x.n; ++n) {
      for (int oc = 0; oc < out_; ++oc) {
        const T* go = g.plane(n, oc);
        if (bias_) {
          double s = 0.0;
          for (std::size_t i = 0; i < g.plane_size(); ++i) s += go[i];
          bias_->grad[static_cast<std::size_t>(oc)] += static_cast<T>(s);
        }
        for (int ic = 0; ic < in_; ++ic) {
          const T* in = x.plane(n, ic);
          const std::size_t woff = (static_cast<std::size_t>(oc) * in_ + ic) * k_ * k_;
          const T* wk = weight_.value.data() + woff;
          T* gw = weight_.grad.data() + woff;
          if (k_ == 1) {
            gw[0] += dot(go, in, static_cast<int>(g.plane_size()));
            if (need_input_grad_) {
              T* gi = gin.plane(n, ic);
              const T wv = wk[0];
              for (std::size_t i = 0; i < g.plane_size(); ++i) gi[i] += wv * go[i];
            }
          } else {
            weight_grad3x3(gw, go, in, H, W);
            if (need_input_grad_) input_grad3x3(gin.plane(n, ic), go, wk, H, W);
          }
        }
      }
    }
    input_ = Tensor<T>();
    return gin;
  }

  void collect(std::vector<Parameter<T>*>& out) override {
    out.push_back(&weight_);
    if (bias_) out.push_back(bias_.get());
  }

 private:
  static void conv3x3_plane(T* o, const T* in, const T* wk, int H, int W) {
    for (int y = 0; y < H; ++y) {
      T* orow = o + static_cast<std::size_t>(y) * W;
      for (int ky = 0; ky < 3; ++ky) {
        const int iy = y + ky - 1;
        if (iy < 0 || iy >= H) continue;
        const T* irow = in + static_cast<std::size_t>(iy) * W;
        const T w0 = wk[ky * 3 + 0], w1 = wk[ky * 3 + 1], w2 = wk[ky * 3 + 2];
        if (W == 1) {
          orow[0] += w1 * irow[0];
          continue;
        }
        orow[0] += w1 * irow[0] + w2 * irow[1];
        for (int x = 1; x < W - 1; ++x) orow[x] += w0 * irow[x - 1] + w1 * irow[x] + w2 * irow[x + 1];
        orow[W - 1] += w0 * irow[W - 2] + w1 * irow[W - 1];
      }
    }
  }

  static void input_grad3x3(T* gi, const T* go, const T* wk, int H, int W) {
    for (int y = 0; y < H; ++y) {
      const T* grow = go + static_cast<std::size_t>(y) * W;
      for (int ky = 0; ky < 3; ++ky) {
        const int iy = y + ky - 1;
        if (iy < 0 || iy >= H) continue;
        T* girow = gi + static_cast<std::size_t>(iy) * W;
        const T w0 = wk[ky * 3 + 0], w1 = wk[ky * 3 + 1], w2 = wk[ky * 3 + 2];
        if (W == 1) {
          girow[0] += w1 * grow[0];
          continue;
        }
        girow[0] += w1 * grow[0] + w0 * grow[1];
        for (int x = 1; x < W - 1; ++x) girow[x] += w2 * grow[x - 1] + w1 * grow[x] + w0 * grow[x + 1];
        girow[W - 1] += w2 * grow[W - 2] + w1 * grow[W - 1];
      }
    }
  }

  static void weight_grad3x3(T* gw, const T* go, const T* in, int H, int W) {
    double acc[9] = {};
    for (int y = 0; y < H; ++y) {
      const T* grow = go + static_cast<std::size_t>(y) * W;
      for (int ky = 0; ky < 3; ++ky) {
        const int iy = y + ky - 1;
        if (iy < 0 || iy >= H) continue;
        const T* irow = in + static_cast<std::size_t>(iy) * W;
        acc[ky * 3 + 0] += dot(grow + 1, irow, W - 1);
        acc[ky * 3 + 1] += dot(grow, irow, W);
        acc[ky * 3 + 2] += dot(grow, irow + 1, W - 1);
      }
    }
    for (int i = 0; i < 9; ++i) gw[i] += static_cast<T>(acc[i]);
  }

  int in_, out_, k_;
  bool need_input_grad_;
  Parameter<T> weight_;
  std::unique_ptr<Parameter<T>> bias_;
  mutable Tensor<T> input_;
};

/// Batch normalization followed by ReLU.
template <class T>
class BatchNormRelu final : public Module<T> {
 public:
  BatchNormRelu(const std::string& name, int channels)
      : c_(channels),
        gamma_(name + ".gamma", {channels}),
        beta_(name + ".beta", {channels}),
        running_mean_(name + ".running_mean", {channels}, false),
        running_var_(name + ".running_var", {channels}, false) {
    std::fill(gamma_.value.begin(), gamma_.value.end(), T(1));
    std::fill(running_var_.value.begin(), running_var_.value.end(), T(1));
  }

  Tensor<T> forward(const Tensor<T>& x, const ForwardContext& ctx) const override {
    if (x.c != c_) throw Error(ErrorCode::ShapeMismatch, "batch norm channel mismatch");
    Tensor<T> y(x.n, x.c, x.h, x.w);
    const std::size_t plane = x.plane_size();
    if (!ctx.training) {
      for (int ch = 0; ch < c_; ++ch) {
        const auto k = static_cast<std::size_t>(ch);
        const double scale = gamma_.value[k] / std::sqrt(static_cast<double>(running_var_.value[k]) + kBatchNormEpsilon);
        const double shift = beta_.value[k] - scale * running_mean_.value[k];
        for (int n = 0; n < x.n; ++n) {
          const T* in = x.plane(n, ch);
          T* out = y.plane(n, ch);
          for (std::size_t i = 0; i < plane; ++i) {
            out[i] = std::max(T(0), static_cast<T>(scale * in[i] + shift));
          }
        }
      }
      return y;
    }

    x_hat_ = Tensor<T>(x.n, x.c, x.h, x.w);
    inv_std_.assign(static_cast<std::size_t>(c_), 0.0);
    const double count = static_cast<double>(x.n) * static_cast<double>(plane);
    for (int ch = 0; ch < c_; ++ch) {
      const auto k = static_cast<std::size_t>(ch);
      double sum = 0.0;
      for (int n = 0; n < x.n; ++n) {
        const T* in = x.plane(n, ch);
        for (std::size_t i = 0; i < plane; ++i) sum += in[i];
      }
      const double mean = sum / count;
      double sq = 0.0;
      for (int n = 0; n < x.n; ++n) {
        const T* in = x.plane(n, ch);
        for (std::size_t i = 0; i < plane; ++i) {
          const double d = in[i] - mean;
          sq += d * d;
        }
      }
      const double var = sq / count;
      const double inv = 1.0 / std::sqrt(var + kBatchNormEpsilon);
      inv_std_[k] = inv;
      const T g = gamma_.value[k];
      const T b = beta_.value[k];
      for (int n = 0; n < x.n; ++n) {
        const T* in = x.plane(n, ch);
        T* xh = x_hat_.plane(n, ch);
        T* out = y.plane(n, ch);
        for (std::size_t i = 0; i < plane; ++i) {
          xh[i] = static_cast<T>((in[i] - mean) * inv);
          out[i] = std::max(T(0), g * xh[i] + b);
        }
      }
      const double unbiased = count > 1.0 ? var * count / (count - 1.0) : var;
      running_mean_.value[k] =
          static_cast<T>((1.0 - kBatchNormMomentum) * running_mean_.value[k] + kBatchNormMomentum * mean);
      running_var_.value[k] =
          static_cast<T>((1.0 - kBatchNormMomentum) * running_var_.value[k] + kBatchNormMomentum * unbiased);
    }
    output_ = y;
    return y;
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    if (!g.same_shape(output_)) throw Error(ErrorCode::ShapeMismatch, "batch norm gradient shape mismatch");
    Tensor<T> gin(g.n, g.c, g.h, g.w);
    const std::size_t plane = g.plane_size();
    const double count = static_cast<double>(g.n) * static_cast<double>(plane);
    for (int ch = 0; ch < c_; ++ch) {
      const auto k = static_cast<std::size_t>(ch);
      double dgamma = 0.0, dbeta = 0.0;
      for (int n = 0; n < g.n; ++n) {
        const T* go = g.plane(n, ch);
        const T* out = output_.plane(n, ch);
        const T* xh = x_hat_.plane(n, ch);
        for (std::size_t i = 0; i < plane; ++i) {
          if (out[i] > T(0)) {
            dgamma += static_cast<double>(go[i]) * xh[i];
            dbeta += go[i];
          }
        }
      }
      gamma_.grad[k] += static_cast<T>(dgamma);
      beta_.grad[k] += static_cast<T>(dbeta);
      const double gam = gamma_.value[k];
      const double inv = inv_std_[k];
      const double mean_dxhat = gam * dbeta / count;
      const double mean_dxhat_xhat = gam * dgamma / count;
      for (int n = 0; n < g.n; ++n) {
        const T* go = g.plane(n, ch);
        const T* out = output_.plane(n, ch);
        const T* xh = x_hat_.plane(n, ch);
        T* gi = gin.plane(n, ch);
        for (std::size_t i = 0; i < plane; ++i) {
          const double dxhat = out[i] > T(0) ? gam * go[i] : 0.0;
          gi[i] = static_cast<T>(inv * (dxhat - mean_dxhat - xh[i] * mean_dxhat_xhat));
        }
      }
    }
    x_hat_ = Tensor<T>();
    output_ = Tensor<T>();
    return gin;
  }

  void collect(std::vector<Parameter<T>*>& out) override {
    out.push_back(&gamma_);
    out.push_back(&beta_);
    out.push_back(&running_mean_);
    out.push_back(&running_var_);
  }

  void fold_pattern(std::uint64_t& h) const override {
    for (std::size_t i = 0; i < output_.data.size(); i += 64) {
      std::uint64_t bits = 0;
      for (std::size_t j = i; j < std::min(i + 64, output_.data.size()); ++j) bits = bits << 1 | (output_.data[j] > T(0));
      fold(h, bits);
    }
  }

  /// Normalized pre-scale activations of the last training forward.
  const Tensor<T>& normalized() const { return x_hat_; }

 private:
  int c_;
  Parameter<T> gamma_, beta_;
  mutable Parameter<T> running_mean_, running_var_;  // updated by training forward
  mutable Tensor<T> x_hat_;
  mutable Tensor<T> output_;
  mutable std::vector<double> inv_std_;
};

template <class T>
class MaxPool2 final : public Module<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, const ForwardContext& ctx) const override {
    if (x.h % 2 || x.w % 2) throw Error(ErrorCode::ShapeMismatch, "max pool needs even spatial size");
    Tensor<T> y(x.n, x.c, x.h / 2, x.w / 2);
    std::vector<std::uint32_t> arg;
    if (ctx.training) arg.resize(y.size());
    std::size_t idx = 0;
    for (int n = 0; n < x.n; ++n) {
      for (int c = 0; c < x.c; ++c) {
        const T* in = x.plane(n, c);
        T* out = y.plane(n, c);
        for (int yy = 0; yy < y.h; ++yy) {
          for (int xx = 0; xx < y.w; ++xx, ++idx) {
            std::uint32_t best = static_cast<std::uint32_t>(2 * yy * x.w + 2 * xx);
            for (std::uint32_t cand : {best + 1, best + static_cast<std::uint32_t>(x.w),
                                       best + static_cast<std::uint32_t>(x.w) + 1}) {
              if (in[cand] > in[best]) best = cand;
            }
            out[yy * y.w + xx] = in[best];
            if (ctx.training) arg[idx] = best;
          }
        }
      }
    }
    if (ctx.training) {
      argmax_ = std::move(arg);
      in_shape_ = {x.n, x.c, x.h, x.w};
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    Tensor<T> gin(in_shape_[0], in_shape_[1], in_shape_[2], in_shape_[3]);
    if (argmax_.size() != g.size()) throw Error(ErrorCode::ShapeMismatch, "max pool gradient shape mismatch");
    std::size_t idx = 0;
    for (int n = 0; n < g.n; ++n) {
      for (int c = 0; c < g.c; ++c) {
        const T* go = g.plane(n, c);
        T* gi = gin.plane(n, c);
        for (std::size_t i = 0; i < g.plane_size(); ++i, ++idx) gi[argmax_[idx]] += go[i];
      }
    }
    argmax_.clear();
    return gin;
  }

  void collect(std::vector<Parameter<T>*>&) override {}
  void fold_pattern(std::uint64_t& h) const override {
    for (auto a : argmax_) fold(h, a);
  }

 private:
  mutable std::vector<std::uint32_t> argmax_;
  mutable std::array<int, 4> in_shape_{};
};

template <class T>
Tensor<T> upsample2(const Tensor<T>& x) {
  Tensor<T> y(x.n, x.c, x.h * 2, x.w * 2);
  for (int n = 0; n < x.n; ++n) {
    for (int c = 0; c < x.c; ++c) {
      const T* in = x.plane(n, c);
      T* out = y.plane(n, c);
      for (int yy = 0; yy < y.h; ++yy) {
        const T* irow = in + (yy / 2) * x.w;
        T* orow = out + yy * y.w;
        for (int xx = 0; xx < y.w; ++xx) orow[xx] = irow[xx / 2];
      }
    }
  }
  return y;
}

template <class T>
Tensor<T> upsample2_backward(const Tensor<T>& g) {
  Tensor<T> gin(g.n, g.c, g.h / 2, g.w / 2);
  for (int n = 0; n < g.n; ++n) {
    for (int c = 0; c < g.c; ++c) {
      const T* go = g.plane(n, c);
      T* gi = gin.plane(n, c);
      for (int yy = 0; yy < g.h; ++yy) {
        for (int xx = 0; xx < g.w; ++xx) gi[(yy / 2) * gin.w + xx / 2] += go[yy * g.w + xx];
      }
    }
  }
  return gin;
}

/// Inverted dropout; the mask is a pure function of (seed, layer id, step).
template <class T>
class Dropout final : public Module<T> {
 public:
  Dropout(Builder& b) : rate_(b.dropout_rate), id_(b.next_dropout_id++) {}

  Tensor<T> forward(const Tensor<T>& x, const ForwardContext& ctx) const override {
    if (!ctx.training || rate_ <= 0.0) {
      if (ctx.training) mask_.clear();
      return x;
    }
    Rng rng(derive_seed(derive_seed(ctx.seed, id_), ctx.step));
    const T keep_scale = static_cast<T>(1.0 / (1.0 - rate_));
    mask_.resize(x.size());
    Tensor<T> y = x;
    for (std::size_t i = 0; i < y.size(); ++i) {
      mask_[i] = rng.uniform() < rate_ ? T(0) : keep_scale;
      y.data[i] *= mask_[i];
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    if (mask_.empty()) return g;
    Tensor<T> gin = g;
    for (std::size_t i = 0; i < gin.size(); ++i) gin.data[i] *= mask_[i];
    mask_.clear();
    return gin;
  }

  void collect(std::vector<Parameter<T>*>&) override {}

  /// Mask of the last training forward (empty when dropout was inactive).
  const std::vector<T>& mask() const { return mask_; }

 private:
  double rate_;
  std::uint64_t id_;
  mutable std::vector<T> mask_;
};

/// 3x3 convolution (no bias) + batch norm + ReLU.
template <class T>
class ConvUnit final : public Module<T> {
 public:
  ConvUnit(Builder& b, const std::string& name, int in, int out, bool need_input_grad = true, int kernel = 3)
      : conv_(b, name + ".conv", in, out, kernel, false, need_input_grad), bn_(name + ".bn", out) {}

  Tensor<T> forward(const Tensor<T>& x, const ForwardContext& ctx) const override {
    return bn_.forward(conv_.forward(x, ctx), ctx);
  }
  Tensor<T> backward(const Tensor<T>& g) override { return conv_.backward(bn_.backward(g)); }
  void collect(std::vector<Parameter<T>*>& out) override {
    conv_.collect(out);
    bn_.collect(out);
  }
  void fold_pattern(std::uint64_t& h) const override { bn_.fold_pattern(h); }

  BatchNormRelu<T>& batch_norm() { return bn_; }

 private:
  Conv2d<T> conv_;
  BatchNormRelu<T> bn_;
};

template <class T>
class Residual final : public Module<T> {
 public:
  Residual(Builder& b, const std::string& name, int in, int out)
      : u1_(b, name + ".u1", in, out), u2_(b, name + ".u2", out, out), u3_(b, name + ".u3", out, out), drop_(b) {
    if (in != out) skip_ = std::make_unique<Conv2d<T>>(b, name + ".skip", in, out, 1, true);
  }

  Tensor<T> forward(const Tensor<T>& x, const ForwardContext& ctx) const override {
    Tensor<T> h = u3_.forward(u2_.forward(u1_.forward(x, ctx), ctx), ctx);
    if (skip_) {
      add_into(h, skip_->forward(x, ctx));
    } else {
      add_into(h, x);
    }
    return drop_.forward(h, ctx);
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    const Tensor<T> gd = drop_.backward(g);
    Tensor<T> gx = u1_.backward(u2_.backward(u3_.backward(gd)));
    add_into(gx, skip_ ? skip_->backward(gd) : gd);
    return gx;
  }

  void collect(std::vector<Parameter<T>*>& out) override {
    u1_.collect(out);
    u2_.collect(out);
    u3_.collect(out);
    if (skip_) skip_->collect(out);
  }
  void fold_pattern(std::uint64_t& h) const override {
    u1_.fold_pattern(h);
    u2_.fold_pattern(h);
    u3_.fold_pattern(h);
  }

 private:
  ConvUnit<T> u1_, u2_, u3_;
  Dropout<T> drop_;
  std::unique_ptr<Conv2d<T>> skip_;
};

/// Recursive encoder/decoder: skip branch at this resolution, pooled branch
/// through (depth - 1) further levels, nearest-neighbour upsample and add.
template <class T>
class Hourglass final : public Module<T> {
 public:
  Hourglass(Builder& b, const std::string& name, int depth, int width)
      : up1_(b, name + ".up1", width, width), low1_(b, name + ".low1", width, width) {
    if (depth > 1) {
      inner_ = std::make_unique<Hourglass<T>>(b, name + ".inner", depth - 1, width);
    } else {
      inner_ = std::make_unique<Residual<T>>(b, name + ".bottleneck", width, width);
    }
    low3_ = std::make_unique<Residual<T>>(b, name + ".low3", width, width);
  }

  Tensor<T> forward(const Tensor<T>& x, const ForwardContext& ctx) const override {
    Tensor<T> up = up1_.forward(x, ctx);
    Tensor<T> low = low3_->forward(inner_->forward(low1_.forward(pool_.forward(x, ctx), ctx), ctx), ctx);
    add_into(up, upsample2(low));
    return up;
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    Tensor<T> gx = up1_.backward(g);
    const Tensor<T> glow = pool_.backward(low1_.backward(inner_->backward(low3_->backward(upsample2_backward(g)))));
    add_into(gx, glow);
    return gx;
  }

  void collect(std::vector<Parameter<T>*>& out) override {
    up1_.collect(out);
    low1_.collect(out);
    inner_->collect(out);
    low3_->collect(out);
  }
  void fold_pattern(std::uint64_t& h) const override {
    up1_.fold_pattern(h);
    pool_.fold_pattern(h);
    low1_.fold_pattern(h);
    inner_->fold_pattern(h);
    low3_->fold_pattern(h);
  }

 private:
  Residual<T> up1_;
  MaxPool2<T> pool_;
  Residual<T> low1_;
  std::unique_ptr<Module<T>> inner_;
  std::unique_ptr<Residual<T>> low3_;
};

}  // namespace archmark::nn
