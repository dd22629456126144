#pragma once

#include <cstddef>
#include <vector>

namespace archmark {

/// Dense N x C x H x W tensor, row-major in that order.
template <class T>
struct Tensor {
  int n = 0;
  int c = 0;
  int h = 0;
  int w = 0;
  std::vector<T> data;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_, T fill = T(0))
      : n(n_), c(c_), h(h_), w(w_), data(static_cast<std::size_t>(n_) * c_ * h_ * w_, fill) {}

  std::size_t size() const noexcept { return data.size(); }
  std::size_t plane_size() const noexcept { return static_cast<std::size_t>(h) * w; }

  T* plane(int ni, int ci) { return data.data() + (static_cast<std::size_t>(ni) * c + ci) * plane_size(); }
  const T* plane(int ni, int ci) const {
    return data.data() + (static_cast<std::size_t>(ni) * c + ci) * plane_size();
  }

  T& operator()(int ni, int ci, int y, int x) { return plane(ni, ci)[static_cast<std::size_t>(y) * w + x]; }
  const T& operator()(int ni, int ci, int y, int x) const {
    return plane(ni, ci)[static_cast<std::size_t>(y) * w + x];
  }

  bool same_shape(const Tensor& o) const noexcept { return n == o.n && c == o.c && h == o.h && w == o.w; }
  bool operator==(const Tensor&) const = default;
};

}  // namespace archmark
