#ifndef FLOWSMOOTH_SMOOTHING_HPP
#define FLOWSMOOTH_SMOOTHING_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowsmooth/flow_field.hpp"
#include "flowsmooth/frame.hpp"
#include "flowsmooth/optical_flow.hpp"
#include "flowsmooth/sequence.hpp"

namespace flowsmooth {

/// Forward-backward consistency fallback. Pixels whose round-trip flow error
/// exceeds `threshold_px` blend with weight 0 (they keep the current frame).
struct OcclusionCheck {
  double threshold_px = 1.0;
};

struct SmoothingParams {
  double alpha = 0.5;
  FlowParams flow;
  /// Directory of pair_%06d.flo files (index t = flow onto frame t). When
  /// unset, flow is estimated from consecutive input frames.
  std::optional<std::filesystem::path> external_flow_dir;
  std::optional<OcclusionCheck> occlusion_check;

  void validate() const;
};

/// File name of the flow onto frame `t` inside an external flow directory.
std::string pair_flow_file_name(std::size_t t);

FlowField load_pair_flow(const std::filesystem::path& dir, std::size_t t, int width, int height);

/// Estimated backward flow of every input pair, flows[t-1] for pair t. Pairs
/// are independent, so they may run on `threads` workers (0 = hardware
/// count); the result does not depend on the thread count.
std::vector<FlowField> estimate_pair_flows(const SequenceHandle& seq, const FlowParams& params = {},
                                           unsigned threads = 1);

/// Throws InvalidParams unless there is one flow per pair and
/// DimensionMismatch unless every flow matches the frame size.
void check_pair_flows(const SequenceHandle& seq, std::span<const FlowField> flows);

struct StepResult {
  Frame frame;
  FlowField flow;
};

/// alpha * warped + (1 - alpha) * current, per channel, clamped to the pair's
/// per-pixel range. `weight` (optional, one per pixel) multiplies alpha.
Frame blend(const Frame& warped, const Frame& current, double alpha, const PlaneD* weight = nullptr);

/// Pixels where x + b(x) lands on a forward vector that does not return to x
/// within `threshold_px` get weight 0, others 1.
PlaneD consistency_mask(const FlowField& backward, const FlowField& forward, double threshold_px);

/// One recursion step with a flow that is already known.
StepResult smooth_step(const Frame& prev_final, const Frame& gan_prev, const Frame& gan_curr,
                       const SmoothingParams& params, const FlowField& flow);

/// One recursion step estimating the flow from (gan_prev, gan_curr).
/// Throws MissingExternalFlow when params name an external flow directory,
/// since the pair index is unknown here.
StepResult smooth_step(const Frame& prev_final, const Frame& gan_prev, const Frame& gan_curr,
                       const SmoothingParams& params);

struct SmoothedSequence {
  SequenceHandle frames;
  std::vector<FlowField> flows;  // flows[t-1] is the flow onto frame t
};

/// Single forward pass. The first frame passes through; every later output is
/// smooth_step of the previous (unquantized) output.
SmoothedSequence smooth_sequence(const SequenceHandle& seq, const SmoothingParams& params);

/// Same, with the pair flows supplied in memory (flows[t-1] for pair t)
/// instead of estimated or loaded. params.external_flow_dir must be unset.
SmoothedSequence smooth_sequence(const SequenceHandle& seq, const SmoothingParams& params,
                                 std::span<const FlowField> flows);

}  // namespace flowsmooth

#endif  // FLOWSMOOTH_SMOOTHING_HPP
