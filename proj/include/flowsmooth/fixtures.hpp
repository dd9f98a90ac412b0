#ifndef FLOWSMOOTH_FIXTURES_HPP
#define FLOWSMOOTH_FIXTURES_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flowsmooth/flow_field.hpp"
#include "flowsmooth/sequence.hpp"

namespace flowsmooth {

/// SplitMix64 (Steele, Lea, Flood). Every fixture stream is drawn from it:
///   state += 0x9E3779B97F4A7C15
///   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB; return z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Top 53 bits scaled to [0, 1).
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Box-Muller, cosine branch only: sqrt(-2 ln(1 - u1)) * cos(2 pi u2).
  double gaussian() noexcept;

 private:
  std::uint64_t state_;
};

/// XOR-ed into `seed ^ frame_index` to separate per-frame noise streams from
/// the texture stream.
inline constexpr std::uint64_t kNoiseStreamKey = 0xA5A5A5A5A5A5A5A5ULL;

enum class FixtureKind { StaticNoise, GlobalTranslation, Flat };

std::string_view to_string(FixtureKind kind) noexcept;
std::optional<FixtureKind> parse_fixture_kind(std::string_view name) noexcept;

struct FixtureSpec {
  FixtureKind kind = FixtureKind::StaticNoise;
  int width = 256;
  int height = 256;
  int frame_count = 64;
  double noise_sigma = 10.0;  // ignored for flat
  int shift_x = 0;            // per frame, global-translation only
  int shift_y = 0;
  std::uint64_t seed = 1;

  /// Throws InvalidSpec.
  void validate() const;
};

struct Fixture {
  SequenceHandle sequence;
  /// ground_truth[t-1] is the backward flow onto frame t.
  std::vector<FlowField> ground_truth;
};

/// Band-limited base texture: N(0,1) white noise from SplitMix64(seed),
/// Gaussian blur sigma 2 (13 taps, clamp-to-edge), rescaled linearly to
/// [32, 223] and rounded to integers.
PlaneD base_texture(int width, int height, std::uint64_t seed);

Fixture generate(const FixtureSpec& spec);

/// Writes frame_%06d.pgm, fixture.txt (spec + flow convention) and
/// ground_truth/pair_%06d.flo.
void write_fixture(const Fixture& fixture, const FixtureSpec& spec, const std::filesystem::path& dir);

}  // namespace flowsmooth

#endif  // FLOWSMOOTH_FIXTURES_HPP
