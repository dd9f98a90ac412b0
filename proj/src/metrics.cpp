#include "flowsmooth/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <string_view>

#include "flowsmooth/flow_field.hpp"
#include "flowsmooth/smoothing.hpp"
#include "parallel.hpp"

namespace flowsmooth {

void SsimParams::validate() const {
  if (window < 1 || window % 2 == 0) throw Error(ErrorKind::InvalidParams, "SSIM window must be odd and positive");
  if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidParams, "SSIM sigma must be positive");
  if (!(k1 > 0.0) || !(k2 > 0.0)) throw Error(ErrorKind::InvalidParams, "SSIM k1, k2 must be positive");
  if (!(dynamic_range > 0.0)) throw Error(ErrorKind::InvalidParams, "SSIM dynamic range must be positive");
}

std::vector<double> gaussian_taps(int size, double sigma) {
  std::vector<double> taps(static_cast<std::size_t>(size));
  const double centre = (size - 1) / 2.0;
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - centre;
    taps[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
    total += taps[static_cast<std::size_t>(i)];
  }
  for (auto& t : taps) t /= total;
  return taps;
}

namespace {

// Separable correlation keeping only windows fully inside the image.
PlaneD filter_valid(const PlaneD& in, const std::vector<double>& taps) {
  const Eigen::Index n = static_cast<Eigen::Index>(taps.size());
  const Eigen::Index h = in.rows(), w = in.cols();
  PlaneD rows = PlaneD::Zero(h, w - n + 1);
  for (Eigen::Index k = 0; k < n; ++k) rows += taps[static_cast<std::size_t>(k)] * in.middleCols(k, w - n + 1);
  PlaneD out = PlaneD::Zero(h - n + 1, w - n + 1);
  for (Eigen::Index k = 0; k < n; ++k) out += taps[static_cast<std::size_t>(k)] * rows.middleRows(k, h - n + 1);
  return out;
}

}  // namespace

PlaneD ssim_map(const PlaneD& a, const PlaneD& b, const SsimParams& params) {
  params.validate();
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorKind::DimensionMismatch, "ssim: sizes differ");
  if (a.rows() < params.window || a.cols() < params.window)
    throw Error(ErrorKind::TooSmall, "ssim needs at least " + std::to_string(params.window) + " px per side");
  const auto taps = gaussian_taps(params.window, params.sigma);
  const PlaneD mu_a = filter_valid(a, taps);
  const PlaneD mu_b = filter_valid(b, taps);
  const PlaneD var_a = filter_valid(a.square(), taps) - mu_a.square();
  const PlaneD var_b = filter_valid(b.square(), taps) - mu_b.square();
  const PlaneD cov = filter_valid(a * b, taps) - mu_a * mu_b;
  const double c1 = params.c1(), c2 = params.c2();
  return ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
         ((mu_a.square() + mu_b.square() + c1) * (var_a + var_b + c2));
}

double ssim(const Frame& a, const Frame& b, const SsimParams& params) {
  if (a.width() != b.width() || a.height() != b.height())
    throw Error(ErrorKind::DimensionMismatch, "ssim: frames differ in size");
  const PlaneD map = ssim_map(luma_plane(a), luma_plane(b), params);
  // Row-major fold keeps the result independent of Eigen's reduction order.
  double sum = 0.0;
  for (Eigen::Index i = 0; i < map.size(); ++i) sum += map.data()[i];
  return sum / static_cast<double>(map.size());
}

void aggregate(MetricsReport& report) {
  report.pair_count = report.per_pair.size();
  double itf = 0.0, isi = 0.0, mofm = 0.0;
  for (const auto& p : report.per_pair) {
    itf += p.psnr_db;
    isi += p.ssim;
    mofm += p.flow_mag_px;
  }
  const double n = static_cast<double>(std::max<std::size_t>(report.per_pair.size(), 1));
  report.itf_db = itf / n;
  report.isi = isi / n;
  report.mofm_px = mofm / n;
}

namespace {

MetricsReport evaluate_with(const SequenceHandle& seq, const MetricsOptions& options,
                            const std::function<FlowField(std::size_t)>& pair_flow) {
  if (seq.size() < 2) throw Error(ErrorKind::TooFewFrames, "metrics need at least two frames");
  options.flow.validate();
  options.ssim.validate();

  MetricsReport report;
  report.frame_count = seq.size();
  report.per_pair.resize(seq.size() - 1);
  detail::for_each_index(1, seq.size(), options.threads, [&](std::size_t t) {
    PairMetrics m;
    m.pair = t;
    m.psnr_db = psnr(seq[t - 1], seq[t]);
    m.ssim = ssim(seq[t - 1], seq[t], options.ssim);
    m.flow_mag_px = mean_magnitude(pair_flow(t));
    report.per_pair[t - 1] = m;
  });
  aggregate(report);
  return report;
}

}  // namespace

MetricsReport evaluate_sequence(const SequenceHandle& seq, const MetricsOptions& options) {
  return evaluate_with(seq, options, [&](std::size_t t) {
    return options.external_flow_dir ? load_pair_flow(*options.external_flow_dir, t, seq.width(), seq.height())
                                     : estimate_flow(seq[t - 1], seq[t], options.flow);
  });
}

MetricsReport evaluate_sequence(const SequenceHandle& seq, std::span<const FlowField> flows,
                                const MetricsOptions& options) {
  check_pair_flows(seq, flows);
  return evaluate_with(seq, options, [&](std::size_t t) { return flows[t - 1]; });
}

namespace {
std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  // Negative zero would print as "-0.000000"; normalize so equal values print equally.
  if (std::string_view(buf) == "-0.000000") return "0.000000";
  return buf;
}
}  // namespace

std::string report_to_json(const MetricsReport& report) {
  std::string out = "{\n";
  out += "  \"frame_count\": " + std::to_string(report.frame_count) + ",\n";
  out += "  \"pair_count\": " + std::to_string(report.pair_count) + ",\n";
  out += "  \"itf_db\": " + fixed6(report.itf_db) + ",\n";
  out += "  \"isi\": " + fixed6(report.isi) + ",\n";
  out += "  \"mofm_px\": " + fixed6(report.mofm_px) + ",\n";
  out += "  \"per_pair\": [";
  for (std::size_t i = 0; i < report.per_pair.size(); ++i) {
    const auto& p = report.per_pair[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"pair\": " + std::to_string(p.pair) + ", \"psnr_db\": " + fixed6(p.psnr_db) +
           ", \"ssim\": " + fixed6(p.ssim) + ", \"flow_mag_px\": " + fixed6(p.flow_mag_px) + "}";
  }
  out += report.per_pair.empty() ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

std::string summary_line(const MetricsReport& report) {
  return "ITF=" + fixed6(report.itf_db) + " dB  ISI=" + fixed6(report.isi) + "  MOFM=" + fixed6(report.mofm_px) +
         " px";
}

}  // namespace flowsmooth
