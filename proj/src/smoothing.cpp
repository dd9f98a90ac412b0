#include "flowsmooth/smoothing.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "flowsmooth/warp.hpp"
#include "parallel.hpp"

namespace flowsmooth {

void SmoothingParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidParams, "alpha must lie in [0, 1]");
  flow.validate();
  if (occlusion_check && !(occlusion_check->threshold_px > 0.0 && std::isfinite(occlusion_check->threshold_px)))
    throw Error(ErrorKind::InvalidParams, "occlusion threshold must be positive");
}

std::string pair_flow_file_name(std::size_t t) {
  char name[32];
  std::snprintf(name, sizeof name, "pair_%06zu.flo", t);
  return name;
}

FlowField load_pair_flow(const std::filesystem::path& dir, std::size_t t, int width, int height) {
  const auto path = dir / pair_flow_file_name(t);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw Error(ErrorKind::MissingExternalFlow, "missing " + path.string());
  FlowField field = read_flo(path);
  if (field.width() != width || field.height() != height)
    throw Error(ErrorKind::DimensionMismatch, path.filename().string() + " is " + std::to_string(field.width()) +
                                                  "x" + std::to_string(field.height()) + ", frames are " +
                                                  std::to_string(width) + "x" + std::to_string(height));
  return field;
}

Frame blend(const Frame& warped, const Frame& current, double alpha, const PlaneD* weight) {
  if (!warped.same_shape(current)) throw Error(ErrorKind::DimensionMismatch, "blend: frame shapes differ");
  std::vector<PlaneD> out;
  out.reserve(static_cast<std::size_t>(current.channels()));
  for (int c = 0; c < current.channels(); ++c) {
    const PlaneD& w = warped.plane(c);
    const PlaneD& g = current.plane(c);
    PlaneD mixed;
    if (weight) {
      const PlaneD a = alpha * *weight;
      mixed = a * w + (1.0 - a) * g;
    } else {
      mixed = alpha * w + (1.0 - alpha) * g;
    }
    out.push_back(mixed.cwiseMax(w.cwiseMin(g)).cwiseMin(w.cwiseMax(g)));
  }
  return Frame(std::move(out));
}

PlaneD consistency_mask(const FlowField& backward, const FlowField& forward, double threshold_px) {
  if (backward.width() != forward.width() || backward.height() != forward.height())
    throw Error(ErrorKind::DimensionMismatch, "consistency_mask: flow sizes differ");
  const double limit_sq = threshold_px * threshold_px;
  PlaneD mask(backward.height(), backward.width());
  for (int y = 0; y < backward.height(); ++y)
    for (int x = 0; x < backward.width(); ++x) {
      const double bx = backward.u(y, x), by = backward.v(y, x);
      const double fx = bilinear_sample(forward.u, x + bx, y + by);
      const double fy = bilinear_sample(forward.v, x + bx, y + by);
      const double ex = bx + fx, ey = by + fy;
      mask(y, x) = ex * ex + ey * ey > limit_sq ? 0.0 : 1.0;
    }
  return mask;
}

StepResult smooth_step(const Frame& prev_final, const Frame& gan_prev, const Frame& gan_curr,
                       const SmoothingParams& params, const FlowField& flow) {
  params.validate();
  if (!prev_final.same_shape(gan_curr) || !gan_prev.same_shape(gan_curr))
    throw Error(ErrorKind::DimensionMismatch, "smooth_step: frame shapes differ");
  const Frame warped = warp(prev_final, flow);
  if (!params.occlusion_check) return {blend(warped, gan_curr, params.alpha), flow};
  const FlowField forward = estimate_flow(gan_curr, gan_prev, params.flow);
  const PlaneD mask = consistency_mask(flow, forward, params.occlusion_check->threshold_px);
  return {blend(warped, gan_curr, params.alpha, &mask), flow};
}

StepResult smooth_step(const Frame& prev_final, const Frame& gan_prev, const Frame& gan_curr,
                       const SmoothingParams& params) {
  if (params.external_flow_dir)
    throw Error(ErrorKind::MissingExternalFlow, "external flow requires a pair index; use smooth_sequence");
  if (!prev_final.same_shape(gan_curr) || !gan_prev.same_shape(gan_curr))
    throw Error(ErrorKind::DimensionMismatch, "smooth_step: frame shapes differ");
  return smooth_step(prev_final, gan_prev, gan_curr, params, estimate_flow(gan_prev, gan_curr, params.flow));
}

std::vector<FlowField> estimate_pair_flows(const SequenceHandle& seq, const FlowParams& params, unsigned threads) {
  params.validate();
  std::vector<FlowField> flows(seq.size() - 1);
  detail::for_each_index(1, seq.size(), threads,
                         [&](std::size_t t) { flows[t - 1] = estimate_flow(seq[t - 1], seq[t], params); });
  return flows;
}

void check_pair_flows(const SequenceHandle& seq, std::span<const FlowField> flows) {
  if (flows.size() + 1 != seq.size())
    throw Error(ErrorKind::InvalidParams, "expected " + std::to_string(seq.size() - 1) + " pair flows, got " +
                                              std::to_string(flows.size()));
  for (const auto& f : flows)
    if (f.width() != seq.width() || f.height() != seq.height())
      throw Error(ErrorKind::DimensionMismatch, "pair flow size differs from the frames");
}

namespace {

template <typename PairFlow>
SmoothedSequence smooth_with(const SequenceHandle& seq, const SmoothingParams& params, PairFlow&& pair_flow) {
  std::vector<Frame> out;
  std::vector<FlowField> flows;
  out.reserve(seq.size());
  flows.reserve(seq.size() - 1);
  out.push_back(seq[0]);
  for (std::size_t t = 1; t < seq.size(); ++t) {
    StepResult step = smooth_step(out.back(), seq[t - 1], seq[t], params, pair_flow(t));
    out.push_back(std::move(step.frame));
    flows.push_back(std::move(step.flow));
  }
  return {SequenceHandle(std::move(out), seq.source_names()), std::move(flows)};
}

}  // namespace

SmoothedSequence smooth_sequence(const SequenceHandle& seq, const SmoothingParams& params) {
  params.validate();
  return smooth_with(seq, params, [&](std::size_t t) {
    return params.external_flow_dir ? load_pair_flow(*params.external_flow_dir, t, seq.width(), seq.height())
                                    : estimate_flow(seq[t - 1], seq[t], params.flow);
  });
}

SmoothedSequence smooth_sequence(const SequenceHandle& seq, const SmoothingParams& params,
                                 std::span<const FlowField> flows) {
  params.validate();
  if (params.external_flow_dir)
    throw Error(ErrorKind::InvalidParams, "in-memory flows and an external flow directory are exclusive");
  check_pair_flows(seq, flows);
  return smooth_with(seq, params, [&](std::size_t t) -> const FlowField& { return flows[t - 1]; });
}

}  // namespace flowsmooth
