#ifndef FLOWSMOOTH_FLOW_FIELD_HPP
#define FLOWSMOOTH_FLOW_FIELD_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "flowsmooth/frame.hpp"

namespace flowsmooth {

/// Dense displacement field in pixels. u is positive rightward, v positive
/// downward. Fields produced by the estimator are backward flows: pixel x of
/// the target frame corresponds to x + f(x) in the source frame.
template <typename Scalar>
struct BasicFlowField {
  Plane<Scalar> u;
  Plane<Scalar> v;

  BasicFlowField() = default;
  BasicFlowField(int width, int height, Scalar fu = Scalar(0), Scalar fv = Scalar(0))
      : u(Plane<Scalar>::Constant(height, width, fu)), v(Plane<Scalar>::Constant(height, width, fv)) {}
  BasicFlowField(Plane<Scalar> u_, Plane<Scalar> v_) : u(std::move(u_)), v(std::move(v_)) {
    if (u.rows() != v.rows() || u.cols() != v.cols())
      throw Error(ErrorKind::DimensionMismatch, "flow components differ in size");
  }

  int width() const noexcept { return static_cast<int>(u.cols()); }
  int height() const noexcept { return static_cast<int>(u.rows()); }

  template <typename Other>
  BasicFlowField<Other> cast() const {
    return BasicFlowField<Other>(u.template cast<Other>(), v.template cast<Other>());
  }

  Plane<Scalar> magnitude() const { return (u.square() + v.square()).sqrt(); }

  friend bool operator==(const BasicFlowField& a, const BasicFlowField& b) {
    return a.u.rows() == b.u.rows() && a.u.cols() == b.u.cols() && (a.u == b.u).all() && (a.v == b.v).all();
  }
};

using FlowField = BasicFlowField<double>;

/// Mean per-pixel Euclidean length of the field, accumulated in row-major
/// order so the result does not depend on vectorization.
template <typename Scalar>
double mean_magnitude(const BasicFlowField<Scalar>& field) {
  const Eigen::Index n = field.u.size();
  if (n == 0) return 0.0;
  const Scalar* pu = field.u.data();
  const Scalar* pv = field.v.data();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double du = static_cast<double>(pu[i]), dv = static_cast<double>(pv[i]);
    sum += std::sqrt(du * du + dv * dv);
  }
  return sum / static_cast<double>(n);
}

template <typename Scalar>
double max_magnitude(const BasicFlowField<Scalar>& field) {
  if (field.u.size() == 0) return 0.0;
  return static_cast<double>(field.magnitude().maxCoeff());
}

/// Endpoint error against `truth`, averaged over pixels at least `margin`
/// pixels away from every border.
template <typename Scalar>
double mean_endpoint_error(const BasicFlowField<Scalar>& estimate, const BasicFlowField<Scalar>& truth,
                           int margin = 0) {
  if (estimate.width() != truth.width() || estimate.height() != truth.height())
    throw Error(ErrorKind::DimensionMismatch, "flow fields differ in size");
  const int w = estimate.width() - 2 * margin, h = estimate.height() - 2 * margin;
  if (w <= 0 || h <= 0) throw Error(ErrorKind::TooSmall, "margin leaves no interior pixels");
  const auto du = estimate.u.block(margin, margin, h, w) - truth.u.block(margin, margin, h, w);
  const auto dv = estimate.v.block(margin, margin, h, w) - truth.v.block(margin, margin, h, w);
  return static_cast<double>((du.square() + dv.square()).sqrt().mean());
}

/// Middlebury .flo: "PIEH" magic (float 202021.25 LE), int32 width, int32
/// height, then interleaved (u, v) rows as float32 LE.
FlowField read_flo(const std::filesystem::path& path);
void write_flo(const FlowField& field, const std::filesystem::path& path);

std::vector<std::uint8_t> encode_flo(const FlowField& field);
FlowField decode_flo(std::span<const std::uint8_t> bytes);

inline constexpr float kFloMagic = 202021.25f;

}  // namespace flowsmooth

#endif  // FLOWSMOOTH_FLOW_FIELD_HPP
