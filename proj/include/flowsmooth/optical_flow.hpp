#ifndef FLOWSMOOTH_OPTICAL_FLOW_HPP
#define FLOWSMOOTH_OPTICAL_FLOW_HPP

#include <optional>

#include "flowsmooth/flow_field.hpp"
#include "flowsmooth/frame.hpp"

namespace flowsmooth {

/// Coarse-to-fine Horn-Schunck configuration. `smoothness_lambda` is the
/// regularization weight on the 8-bit intensity scale; it enters the update
/// squared, like the classic alpha.
struct FlowParams {
  std::optional<int> pyramid_levels;  // auto when unset
  double smoothness_lambda = 15.0;
  int iterations_per_level = 100;
  int warps_per_level = 3;

  /// Throws InvalidParams when any field is out of range.
  void validate() const;
  int levels_for(int width, int height) const;
};

/// Backward flow on `next`'s grid: next(x) ~ prev(x + f(x)). Both frames
/// are reduced to luma first. Deterministic for fixed inputs.
FlowField estimate_flow(const Frame& prev, const Frame& next, const FlowParams& params = {});

/// Single-channel core of estimate_flow, exposed for callers that already
/// hold luma planes.
FlowField estimate_flow(const PlaneD& prev, const PlaneD& next, const FlowParams& params);

}  // namespace flowsmooth

#endif  // FLOWSMOOTH_OPTICAL_FLOW_HPP
