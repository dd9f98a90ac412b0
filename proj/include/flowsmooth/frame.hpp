#ifndef FLOWSMOOTH_FRAME_HPP
#define FLOWSMOOTH_FRAME_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "flowsmooth/error.hpp"

namespace flowsmooth {

/// One image channel: rows = height, cols = width, row-major storage.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using PlaneD = Plane<double>;

/// An image of the sequence held as one plane per channel. Samples are real
/// values on the 8-bit scale [0, 255]; processing may leave them slightly
/// outside that range, which quantization clamps away on write.
template <typename Scalar>
class BasicFrame {
 public:
  using scalar_type = Scalar;
  using plane_type = Plane<Scalar>;

  BasicFrame() = default;

  BasicFrame(int width, int height, int channels, Scalar fill = Scalar(0)) {
    check_shape(width, height, channels);
    planes_.assign(static_cast<std::size_t>(channels), plane_type::Constant(height, width, fill));
  }

  explicit BasicFrame(std::vector<plane_type> planes) : planes_(std::move(planes)) {
    if (planes_.empty())
      throw Error(ErrorKind::InvalidParams, "frame needs at least one plane");
    check_shape(static_cast<int>(planes_.front().cols()), static_cast<int>(planes_.front().rows()),
                static_cast<int>(planes_.size()));
    for (const auto& p : planes_)
      if (p.rows() != planes_.front().rows() || p.cols() != planes_.front().cols())
        throw Error(ErrorKind::DimensionMismatch, "planes of a frame differ in size");
  }

  int width() const noexcept { return planes_.empty() ? 0 : static_cast<int>(planes_.front().cols()); }
  int height() const noexcept { return planes_.empty() ? 0 : static_cast<int>(planes_.front().rows()); }
  int channels() const noexcept { return static_cast<int>(planes_.size()); }
  bool empty() const noexcept { return planes_.empty(); }
  std::size_t sample_count() const noexcept {
    return static_cast<std::size_t>(width()) * static_cast<std::size_t>(height()) * planes_.size();
  }

  const plane_type& plane(int c) const { return planes_.at(static_cast<std::size_t>(c)); }
  plane_type& plane(int c) { return planes_.at(static_cast<std::size_t>(c)); }
  const std::vector<plane_type>& planes() const noexcept { return planes_; }

  Scalar operator()(int x, int y, int c = 0) const { return planes_[static_cast<std::size_t>(c)](y, x); }
  Scalar& operator()(int x, int y, int c = 0) { return planes_[static_cast<std::size_t>(c)](y, x); }

  bool same_shape(const BasicFrame& other) const noexcept {
    return width() == other.width() && height() == other.height() && channels() == other.channels();
  }

  template <typename Other>
  BasicFrame<Other> cast() const {
    std::vector<Plane<Other>> out;
    out.reserve(planes_.size());
    for (const auto& p : planes_) out.push_back(p.template cast<Other>());
    return BasicFrame<Other>(std::move(out));
  }

  /// True when every sample is finite and inside [0, 255].
  bool in_range() const {
    for (const auto& p : planes_)
      if (!p.isFinite().all() || (p < Scalar(0)).any() || (p > Scalar(255)).any()) return false;
    return true;
  }

  friend bool operator==(const BasicFrame& a, const BasicFrame& b) {
    if (!a.same_shape(b)) return false;
    for (std::size_t c = 0; c < a.planes_.size(); ++c)
      if ((a.planes_[c] != b.planes_[c]).any()) return false;
    return true;
  }

 private:
  static void check_shape(int width, int height, int channels) {
    if (width <= 0 || height <= 0)
      throw Error(ErrorKind::InvalidParams, "frame dimensions must be positive");
    if (channels != 1 && channels != 3)
      throw Error(ErrorKind::InvalidParams, "frame must have 1 or 3 channels, got " + std::to_string(channels));
  }

  std::vector<plane_type> planes_;
};

using Frame = BasicFrame<double>;

inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

/// BT.601 luma. A single-channel frame is returned unchanged.
template <typename Scalar>
BasicFrame<Scalar> to_luma(const BasicFrame<Scalar>& f) {
  if (f.channels() == 1) return f;
  Plane<Scalar> y = Scalar(kLumaR) * f.plane(0) + Scalar(kLumaG) * f.plane(1) + Scalar(kLumaB) * f.plane(2);
  // Weights sum to one, but rounding can push a full-scale pixel a ulp past 255.
  y = y.cwiseMax(f.plane(0).cwiseMin(f.plane(1)).cwiseMin(f.plane(2)))
          .cwiseMin(f.plane(0).cwiseMax(f.plane(1)).cwiseMax(f.plane(2)));
  return BasicFrame<Scalar>(std::vector<Plane<Scalar>>{std::move(y)});
}

/// Convenience for algorithms that work on one channel.
template <typename Scalar>
Plane<Scalar> luma_plane(const BasicFrame<Scalar>& f) {
  return to_luma(f).plane(0);
}

/// Round half away from zero, then clamp to [0, 255].
template <typename Scalar>
std::uint8_t quantize_sample(Scalar v) {
  if (!(v == v)) return 0;
  const double r = std::round(static_cast<double>(v));
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

/// Snap every sample to the value it would have after an 8-bit write.
template <typename Scalar>
BasicFrame<Scalar> quantize(const BasicFrame<Scalar>& f) {
  std::vector<Plane<Scalar>> out;
  out.reserve(static_cast<std::size_t>(f.channels()));
  for (const auto& p : f.planes())
    out.push_back(p.unaryExpr([](Scalar v) { return static_cast<Scalar>(quantize_sample(v)); }));
  return BasicFrame<Scalar>(std::move(out));
}

}  // namespace flowsmooth

#endif  // FLOWSMOOTH_FRAME_HPP
