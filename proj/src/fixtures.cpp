#include "flowsmooth/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "flowsmooth/smoothing.hpp"

namespace flowsmooth {

double SplitMix64::gaussian() noexcept {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string_view to_string(FixtureKind kind) noexcept {
  switch (kind) {
    case FixtureKind::StaticNoise: return "static-noise";
    case FixtureKind::GlobalTranslation: return "global-translation";
    case FixtureKind::Flat: return "flat";
  }
  return "flat";
}

std::optional<FixtureKind> parse_fixture_kind(std::string_view name) noexcept {
  if (name == "static-noise") return FixtureKind::StaticNoise;
  if (name == "global-translation") return FixtureKind::GlobalTranslation;
  if (name == "flat") return FixtureKind::Flat;
  return std::nullopt;
}

void FixtureSpec::validate() const {
  if (width <= 0 || height <= 0) throw Error(ErrorKind::InvalidSpec, "fixture dimensions must be positive");
  if (frame_count < 1) throw Error(ErrorKind::InvalidSpec, "fixture needs at least one frame");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw Error(ErrorKind::InvalidSpec, "noise_sigma must be a finite value >= 0");
}

namespace {

constexpr double kTextureSigma = 2.0;
constexpr int kTextureRadius = 6;
constexpr double kTextureLow = 32.0;
constexpr double kTextureHigh = 223.0;

PlaneD gaussian_blur_clamped(const PlaneD& in, double sigma, int radius) {
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    taps[static_cast<std::size_t>(k + radius)] = std::exp(-(k * k) / (2.0 * sigma * sigma));
    total += taps[static_cast<std::size_t>(k + radius)];
  }
  for (auto& t : taps) t /= total;
  const int h = static_cast<int>(in.rows()), w = static_cast<int>(in.cols());
  PlaneD rows(h, w), out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += taps[static_cast<std::size_t>(k + radius)] * in(y, std::clamp(x + k, 0, w - 1));
      rows(y, x) = acc;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += taps[static_cast<std::size_t>(k + radius)] * rows(std::clamp(y + k, 0, h - 1), x);
      out(y, x) = acc;
    }
  return out;
}

PlaneD add_noise(const PlaneD& base, double sigma, std::uint64_t seed, std::uint64_t frame_index) {
  if (sigma == 0.0) return base;
  SplitMix64 rng(seed ^ frame_index ^ kNoiseStreamKey);
  PlaneD out(base.rows(), base.cols());
  for (Eigen::Index i = 0; i < base.size(); ++i)
    out.data()[i] = quantize_sample(base.data()[i] + sigma * rng.gaussian());
  return out;
}

PlaneD translated(const PlaneD& base, int dx, int dy) {
  const int h = static_cast<int>(base.rows()), w = static_cast<int>(base.cols());
  PlaneD out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out(y, x) = base(std::clamp(y - dy, 0, h - 1), std::clamp(x - dx, 0, w - 1));
  return out;
}

}  // namespace

PlaneD base_texture(int width, int height, std::uint64_t seed) {
  SplitMix64 rng(seed);
  PlaneD white(height, width);
  for (Eigen::Index i = 0; i < white.size(); ++i) white.data()[i] = rng.gaussian();
  const PlaneD blurred = gaussian_blur_clamped(white, kTextureSigma, kTextureRadius);
  const double lo = blurred.minCoeff(), hi = blurred.maxCoeff();
  const double span = hi - lo;
  return blurred.unaryExpr([&](double v) {
    const double scaled = span > 0.0 ? kTextureLow + (v - lo) * (kTextureHigh - kTextureLow) / span
                                     : 0.5 * (kTextureLow + kTextureHigh);
    return static_cast<double>(quantize_sample(scaled));
  });
}

Fixture generate(const FixtureSpec& spec) {
  spec.validate();
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(spec.frame_count));
  std::vector<FlowField> truth;
  truth.reserve(static_cast<std::size_t>(spec.frame_count - 1));

  if (spec.kind == FixtureKind::Flat) {
    for (int t = 0; t < spec.frame_count; ++t) frames.emplace_back(spec.width, spec.height, 1, 128.0);
    for (int t = 1; t < spec.frame_count; ++t) truth.emplace_back(spec.width, spec.height);
  } else {
    const PlaneD base = base_texture(spec.width, spec.height, spec.seed);
    const bool moving = spec.kind == FixtureKind::GlobalTranslation;
    for (int t = 0; t < spec.frame_count; ++t) {
      const PlaneD clean = moving ? translated(base, t * spec.shift_x, t * spec.shift_y) : base;
      frames.emplace_back(std::vector<PlaneD>{
          add_noise(clean, spec.noise_sigma, spec.seed, static_cast<std::uint64_t>(t))});
    }
    for (int t = 1; t < spec.frame_count; ++t)
      truth.emplace_back(spec.width, spec.height, moving ? -static_cast<double>(spec.shift_x) : 0.0,
                         moving ? -static_cast<double>(spec.shift_y) : 0.0);
  }
  return {SequenceHandle(std::move(frames)), std::move(truth)};
}

void write_fixture(const Fixture& fixture, const FixtureSpec& spec, const std::filesystem::path& dir) {
  write_sequence(fixture.sequence, dir, ImageFormat::Pgm);
  const auto gt_dir = dir / "ground_truth";
  std::error_code ec;
  std::filesystem::create_directories(gt_dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + gt_dir.string());
  for (std::size_t t = 1; t <= fixture.ground_truth.size(); ++t)
    write_flo(fixture.ground_truth[t - 1], gt_dir / pair_flow_file_name(t));

  std::ofstream meta(dir / "fixture.txt", std::ios::trunc);
  if (!meta) throw Error(ErrorKind::IoError, "cannot create fixture.txt in " + dir.string());
  char sigma[64];
  std::snprintf(sigma, sizeof sigma, "%.17g", spec.noise_sigma);
  meta << "kind = " << to_string(spec.kind) << "\n"
       << "width = " << spec.width << "\n"
       << "height = " << spec.height << "\n"
       << "frames = " << spec.frame_count << "\n"
       << "noise_sigma = " << sigma << "\n"
       << "shift_x = " << spec.shift_x << "\n"
       << "shift_y = " << spec.shift_y << "\n"
       << "seed = " << spec.seed << "\n"
       << "prng = splitmix64\n"
       << "noise_stream = seed ^ frame_index ^ 0xa5a5a5a5a5a5a5a5\n"
       << "flow_convention = backward; pair_t maps frame t pixel x to x + f(x) in frame t-1\n"
       << "ground_truth_dir = ground_truth\n";
  if (!meta) throw Error(ErrorKind::IoError, "write failed for fixture.txt");
}

}  // namespace flowsmooth
