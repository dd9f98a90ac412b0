#ifndef FLOWSMOOTH_WARP_HPP
#define FLOWSMOOTH_WARP_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "flowsmooth/flow_field.hpp"
#include "flowsmooth/frame.hpp"

namespace flowsmooth {

/// Bilinear sample at real coordinates, clamped to [0, W-1] x [0, H-1].
/// The result never leaves the range of the four contributing samples.
template <typename Scalar>
Scalar bilinear_sample(const Plane<Scalar>& img, Scalar x, Scalar y) {
  const Eigen::Index w = img.cols(), h = img.rows();
  x = std::clamp(x, Scalar(0), Scalar(w - 1));
  y = std::clamp(y, Scalar(0), Scalar(h - 1));
  const auto x0 = static_cast<Eigen::Index>(std::floor(x));
  const auto y0 = static_cast<Eigen::Index>(std::floor(y));
  const Eigen::Index x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
  const Scalar fx = x - Scalar(x0), fy = y - Scalar(y0);
  const Scalar a = img(y0, x0), b = img(y0, x1), c = img(y1, x0), d = img(y1, x1);
  const Scalar top = (Scalar(1) - fx) * a + fx * b;
  const Scalar bottom = (Scalar(1) - fx) * c + fx * d;
  const Scalar out = (Scalar(1) - fy) * top + fy * bottom;
  const Scalar lo = std::min({a, b, c, d}), hi = std::max({a, b, c, d});
  return std::clamp(out, lo, hi);
}

/// out(x, y) = img(x + u(x, y), y + v(x, y)), bilinear, clamp-to-edge.
template <typename Scalar>
Plane<Scalar> remap(const Plane<Scalar>& img, const Plane<Scalar>& u, const Plane<Scalar>& v) {
  if (u.rows() != img.rows() || u.cols() != img.cols() || v.rows() != img.rows() || v.cols() != img.cols())
    throw Error(ErrorKind::DimensionMismatch, "flow and image sizes differ");
  Plane<Scalar> out(img.rows(), img.cols());
  for (Eigen::Index y = 0; y < img.rows(); ++y)
    for (Eigen::Index x = 0; x < img.cols(); ++x)
      out(y, x) = bilinear_sample(img, Scalar(x) + u(y, x), Scalar(y) + v(y, x));
  return out;
}

/// Backward warp of every channel of `image` by `field`.
template <typename Scalar>
BasicFrame<Scalar> warp(const BasicFrame<Scalar>& image, const BasicFlowField<Scalar>& field) {
  if (image.width() != field.width() || image.height() != field.height())
    throw Error(ErrorKind::DimensionMismatch, "warp: image is " + std::to_string(image.width()) + "x" +
                                                  std::to_string(image.height()) + ", flow is " +
                                                  std::to_string(field.width()) + "x" + std::to_string(field.height()));
  std::vector<Plane<Scalar>> out;
  out.reserve(static_cast<std::size_t>(image.channels()));
  for (const auto& p : image.planes()) out.push_back(remap(p, field.u, field.v));
  return BasicFrame<Scalar>(std::move(out));
}

/// Resample a coarse-level flow onto a grid of `width` x `height` whose
/// pixel 2i lies on coarse pixel i; displacements are doubled.
template <typename Scalar>
BasicFlowField<Scalar> upsample_flow(const BasicFlowField<Scalar>& coarse, int width, int height) {
  BasicFlowField<Scalar> fine(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const Scalar cx = Scalar(x) / Scalar(2), cy = Scalar(y) / Scalar(2);
      fine.u(y, x) = Scalar(2) * bilinear_sample(coarse.u, cx, cy);
      fine.v(y, x) = Scalar(2) * bilinear_sample(coarse.v, cx, cy);
    }
  return fine;
}

}  // namespace flowsmooth

#endif  // FLOWSMOOTH_WARP_HPP
