#ifndef FLOWSMOOTH_PYRAMID_HPP
#define FLOWSMOOTH_PYRAMID_HPP

#include <algorithm>
#include <vector>

#include "flowsmooth/frame.hpp"

namespace flowsmooth {

inline constexpr int kPyramidMinSize = 16;

/// Number of levels whose smaller side stays at or above 16 px (at least 1).
inline int auto_pyramid_levels(int width, int height) noexcept {
  int levels = 1;
  int side = std::min(width, height);
  while (side / 2 >= kPyramidMinSize) {
    side /= 2;
    ++levels;
  }
  return levels;
}

namespace detail {

template <typename Scalar>
Scalar binomial_tap(const Scalar* p, int i, int n, int stride) {
  const auto at = [&](int k) { return p[static_cast<std::ptrdiff_t>(std::clamp(k, 0, n - 1)) * stride]; };
  return (at(i - 2) + Scalar(4) * at(i - 1) + Scalar(6) * at(i) + Scalar(4) * at(i + 1) + at(i + 2)) / Scalar(16);
}

}  // namespace detail

/// Separable [1 4 6 4 1]/16 blur with clamp-to-edge borders.
template <typename Scalar>
Plane<Scalar> binomial_blur(const Plane<Scalar>& in) {
  const int h = static_cast<int>(in.rows()), w = static_cast<int>(in.cols());
  Plane<Scalar> rows(h, w), out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) rows(y, x) = detail::binomial_tap(&in(y, 0), x, w, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out(y, x) = detail::binomial_tap(&rows(0, x), y, h, w);
  return out;
}

/// Blur then keep every second row and column; level k+1 pixel i sits on
/// level k pixel 2i.
template <typename Scalar>
Plane<Scalar> pyramid_down(const Plane<Scalar>& in) {
  const Plane<Scalar> blurred = binomial_blur(in);
  const Eigen::Index h = (in.rows() + 1) / 2, w = (in.cols() + 1) / 2;
  Plane<Scalar> out(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) out(y, x) = blurred(2 * y, 2 * x);
  return out;
}

/// Level 0 is the input itself.
template <typename Scalar>
std::vector<Plane<Scalar>> gaussian_pyramid(const Plane<Scalar>& base, int levels) {
  std::vector<Plane<Scalar>> pyr;
  pyr.reserve(static_cast<std::size_t>(std::max(levels, 1)));
  pyr.push_back(base);
  for (int l = 1; l < levels; ++l) pyr.push_back(pyramid_down(pyr.back()));
  return pyr;
}

}  // namespace flowsmooth

#endif  // FLOWSMOOTH_PYRAMID_HPP
