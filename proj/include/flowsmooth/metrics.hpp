#ifndef FLOWSMOOTH_METRICS_HPP
#define FLOWSMOOTH_METRICS_HPP

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowsmooth/frame.hpp"
#include "flowsmooth/optical_flow.hpp"
#include "flowsmooth/sequence.hpp"

namespace flowsmooth {

/// Returned by psnr when the two frames are identical (MSE below 1e-12).
inline constexpr double kPsnrIdentical = 99.0;

/// Mean squared error over every sample of every channel.
template <typename Scalar>
double mean_squared_error(const BasicFrame<Scalar>& a, const BasicFrame<Scalar>& b) {
  if (!a.same_shape(b)) throw Error(ErrorKind::DimensionMismatch, "frames differ in shape");
  double sum = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    const Scalar* pa = a.plane(c).data();
    const Scalar* pb = b.plane(c).data();
    const Eigen::Index n = a.plane(c).size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = static_cast<double>(pa[i]) - static_cast<double>(pb[i]);
      sum += d * d;
    }
  }
  return sum / static_cast<double>(a.sample_count());
}

/// Peak signal-to-noise ratio in dB with peak 255.
template <typename Scalar>
double psnr(const BasicFrame<Scalar>& a, const BasicFrame<Scalar>& b) {
  const double mse = mean_squared_error(a, b);
  if (mse < 1e-12) return kPsnrIdentical;
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;

  void validate() const;
  double c1() const noexcept { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const noexcept { return (k2 * dynamic_range) * (k2 * dynamic_range); }
};

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
std::vector<double> gaussian_taps(int size, double sigma);

/// Local SSIM values for every window lying fully inside the image, i.e. a
/// (H - window + 1) x (W - window + 1) map.
PlaneD ssim_map(const PlaneD& a, const PlaneD& b, const SsimParams& params = {});

/// Mean single-scale SSIM on luma.
double ssim(const Frame& a, const Frame& b, const SsimParams& params = {});

struct PairMetrics {
  std::size_t pair = 0;  // index of the later frame of the pair
  double psnr_db = 0.0;
  double ssim = 0.0;
  double flow_mag_px = 0.0;
};

struct MetricsReport {
  std::size_t frame_count = 0;
  std::size_t pair_count = 0;
  double itf_db = 0.0;
  double isi = 0.0;
  double mofm_px = 0.0;
  std::vector<PairMetrics> per_pair;
};

struct MetricsOptions {
  FlowParams flow;
  /// pair_%06d.flo replaces estimation for the MOFM term when set.
  std::optional<std::filesystem::path> external_flow_dir;
  SsimParams ssim;
  /// Worker threads for per-pair evaluation; 0 picks the hardware count.
  /// Results do not depend on this value.
  unsigned threads = 1;
};

/// ITF / ISI / MOFM over consecutive pairs, aggregated as index-ordered means.
MetricsReport evaluate_sequence(const SequenceHandle& seq, const MetricsOptions& options = {});

/// Same, with the MOFM term taken from `flows` (flows[t-1] for pair t), e.g.
/// from estimate_pair_flows. options.flow and options.external_flow_dir are
/// not used.
MetricsReport evaluate_sequence(const SequenceHandle& seq, std::span<const FlowField> flows,
                                const MetricsOptions& options = {});

/// Means of the per-pair entries, folded in index order.
void aggregate(MetricsReport& report);

/// JSON with fixed key order and every real printed with 6 decimals.
std::string report_to_json(const MetricsReport& report);

/// `ITF=<v> dB  ISI=<v>  MOFM=<v> px`
std::string summary_line(const MetricsReport& report);

}  // namespace flowsmooth

#endif  // FLOWSMOOTH_METRICS_HPP
