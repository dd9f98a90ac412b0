#include "flowsmooth/optical_flow.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "flowsmooth/pyramid.hpp"
#include "flowsmooth/warp.hpp"

namespace flowsmooth {

void FlowParams::validate() const {
  if (pyramid_levels && *pyramid_levels < 1)
    throw Error(ErrorKind::InvalidParams, "pyramid_levels must be >= 1");
  if (!(smoothness_lambda >= 0.0) || !std::isfinite(smoothness_lambda))
    throw Error(ErrorKind::InvalidParams, "smoothness_lambda must be a finite value >= 0");
  if (iterations_per_level < 1) throw Error(ErrorKind::InvalidParams, "iterations_per_level must be >= 1");
  if (warps_per_level < 1) throw Error(ErrorKind::InvalidParams, "warps_per_level must be >= 1");
}

int FlowParams::levels_for(int width, int height) const {
  if (!pyramid_levels) return auto_pyramid_levels(width, height);
  // Never build levels below one pixel.
  int possible = 1;
  for (int s = std::min(width, height); s > 1; s = (s + 1) / 2) ++possible;
  return std::min(*pyramid_levels, possible);
}

namespace {

// Central differences inside, one-sided at the border.
PlaneD derivative_x(const PlaneD& p) {
  const Eigen::Index h = p.rows(), w = p.cols();
  PlaneD d = PlaneD::Zero(h, w);
  if (w < 2) return d;
  if (w > 2) d.middleCols(1, w - 2) = 0.5 * (p.rightCols(w - 2) - p.leftCols(w - 2));
  d.col(0) = p.col(1) - p.col(0);
  d.col(w - 1) = p.col(w - 1) - p.col(w - 2);
  return d;
}

PlaneD derivative_y(const PlaneD& p) {
  const Eigen::Index h = p.rows(), w = p.cols();
  PlaneD d = PlaneD::Zero(h, w);
  if (h < 2) return d;
  if (h > 2) d.middleRows(1, h - 2) = 0.5 * (p.bottomRows(h - 2) - p.topRows(h - 2));
  d.row(0) = p.row(1) - p.row(0);
  d.row(h - 1) = p.row(h - 1) - p.row(h - 2);
  return d;
}

// One Jacobi sweep of the Horn-Schunck update. The neighbourhood mean uses
// weights 1/6 (edge) and 1/12 (diagonal) with replicated borders, evaluated
// as ([1 2 1] x [1 2 1] - 4 delta) / 12. The sweep reads only `u`, `v` and
// writes only `u_out`, `v_out`; `scratch_*` hold one row of column sums.
void jacobi_sweep(const PlaneD& u, const PlaneD& v, const PlaneD& ix, const PlaneD& iy, const PlaneD& offset,
                  const PlaneD& inv_denom, PlaneD& u_out, PlaneD& v_out, std::vector<double>& scratch_u,
                  std::vector<double>& scratch_v) {
  constexpr double kTwelfth = 1.0 / 12.0;
  const Eigen::Index h = u.rows(), w = u.cols();
  // Column sums padded by one replicated sample on each side.
  scratch_u.resize(static_cast<std::size_t>(w + 2));
  scratch_v.resize(static_cast<std::size_t>(w + 2));
  double* __restrict cu = scratch_u.data() + 1;
  double* __restrict cv = scratch_v.data() + 1;
  for (Eigen::Index y = 0; y < h; ++y) {
    const Eigen::Index ym = y > 0 ? y - 1 : 0, yp = y + 1 < h ? y + 1 : h - 1;
    const double* __restrict um = &u(ym, 0);
    const double* __restrict uc = &u(y, 0);
    const double* __restrict up = &u(yp, 0);
    const double* __restrict vm = &v(ym, 0);
    const double* __restrict vc = &v(y, 0);
    const double* __restrict vp = &v(yp, 0);
    const double* __restrict gx = &ix(y, 0);
    const double* __restrict gy = &iy(y, 0);
    const double* __restrict off = &offset(y, 0);
    const double* __restrict inv = &inv_denom(y, 0);
    double* __restrict uo = &u_out(y, 0);
    double* __restrict vo = &v_out(y, 0);
    for (Eigen::Index x = 0; x < w; ++x) {
      cu[x] = um[x] + 2.0 * uc[x] + up[x];
      cv[x] = vm[x] + 2.0 * vc[x] + vp[x];
    }
    cu[-1] = cu[0];
    cu[w] = cu[w - 1];
    cv[-1] = cv[0];
    cv[w] = cv[w - 1];
    for (Eigen::Index x = 0; x < w; ++x) {
      const double ub = kTwelfth * (cu[x - 1] + 2.0 * cu[x] + cu[x + 1] - 4.0 * uc[x]);
      const double vb = kTwelfth * (cv[x - 1] + 2.0 * cv[x] + cv[x + 1] - 4.0 * vc[x]);
      const double t = (gx[x] * ub + gy[x] * vb + off[x]) * inv[x];
      uo[x] = ub - gx[x] * t;
      vo[x] = vb - gy[x] * t;
    }
  }
}

// One linearization of the data term around `flow` per warp pass, followed by
// Jacobi sweeps on the total flow.
void refine_level(const PlaneD& prev, const PlaneD& next, FlowField& flow, const FlowParams& params) {
  const Eigen::Index h = next.rows(), w = next.cols();
  const double lambda_sq = params.smoothness_lambda * params.smoothness_lambda;
  PlaneD u_next(h, w), v_next(h, w);
  std::vector<double> scratch_u, scratch_v;

  for (int pass = 0; pass < params.warps_per_level; ++pass) {
    const PlaneD warped = remap(prev, flow.u, flow.v);
    const PlaneD ix = 0.5 * (derivative_x(warped) + derivative_x(next));
    const PlaneD iy = 0.5 * (derivative_y(warped) + derivative_y(next));
    // Linearized constraint in terms of the total flow: ix*u + iy*v + offset = 0.
    const PlaneD offset = (warped - next) - ix * flow.u - iy * flow.v;
    // Without regularization a flat pixel has no constraint; it keeps the mean.
    const PlaneD inv_denom =
        (lambda_sq + ix.square() + iy.square()).unaryExpr([](double d) { return d > 0.0 ? 1.0 / d : 0.0; });
    for (int it = 0; it < params.iterations_per_level; ++it) {
      jacobi_sweep(flow.u, flow.v, ix, iy, offset, inv_denom, u_next, v_next, scratch_u, scratch_v);
      flow.u.swap(u_next);
      flow.v.swap(v_next);
    }
  }
}

}  // namespace

FlowField estimate_flow(const PlaneD& prev, const PlaneD& next, const FlowParams& params) {
  params.validate();
  if (prev.rows() != next.rows() || prev.cols() != next.cols())
    throw Error(ErrorKind::DimensionMismatch, "estimate_flow: frames differ in size");
  const int w = static_cast<int>(next.cols()), h = static_cast<int>(next.rows());
  const int levels = params.levels_for(w, h);
  const auto prev_pyr = gaussian_pyramid(prev, levels);
  const auto next_pyr = gaussian_pyramid(next, levels);

  FlowField flow(static_cast<int>(next_pyr.back().cols()), static_cast<int>(next_pyr.back().rows()));
  for (int level = levels - 1; level >= 0; --level) {
    const auto& p = prev_pyr[static_cast<std::size_t>(level)];
    const auto& n = next_pyr[static_cast<std::size_t>(level)];
    if (flow.width() != n.cols() || flow.height() != n.rows())
      flow = upsample_flow(flow, static_cast<int>(n.cols()), static_cast<int>(n.rows()));
    refine_level(p, n, flow, params);
  }
  return flow;
}

FlowField estimate_flow(const Frame& prev, const Frame& next, const FlowParams& params) {
  if (prev.width() != next.width() || prev.height() != next.height())
    throw Error(ErrorKind::DimensionMismatch,
                "estimate_flow: " + std::to_string(prev.width()) + "x" + std::to_string(prev.height()) + " vs " +
                    std::to_string(next.width()) + "x" + std::to_string(next.height()));
  return estimate_flow(luma_plane(prev), luma_plane(next), params);
}

}  // namespace flowsmooth
