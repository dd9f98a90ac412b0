#ifndef FLOWSMOOTH_TOOLS_CLI_HPP
#define FLOWSMOOTH_TOOLS_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flowsmooth/fixtures.hpp"
#include "flowsmooth/image_io.hpp"
#include "flowsmooth/smoothing.hpp"

namespace flowsmooth::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPipeline = 1;
inline constexpr int kExitUsage = 2;

/// Bad flags, config entries or parameter values. Maps to exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { Smooth, Metrics, Genseq };

struct RunConfig {
  Command command = Command::Smooth;
  std::optional<std::filesystem::path> input_dir;
  std::optional<std::filesystem::path> output_dir;
  std::string prefix = "frame_";
  SmoothingParams smoothing;
  std::optional<std::filesystem::path> flow_out;
  std::optional<std::filesystem::path> report_path;
  std::optional<ImageFormat> format;
  FixtureSpec fixture;
  unsigned threads = 1;
  int verbosity = 0;
};

/// `key = value` lines; `#` starts a comment; blank lines are ignored.
/// Keys are normalized to lower case with '_' replaced by '-'.
std::map<std::string, std::string> parse_config_text(std::string_view text);
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Applies one setting (flag or config entry) to `config`. Throws UsageError
/// for unknown keys or unparsable values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Checks cross-field invariants for the selected command.
void validate(const RunConfig& config);

int run_smooth(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_metrics(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_genseq(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full front-end: parse argv, merge defaults < config file < flags, dispatch.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a, printed in run manifests.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace flowsmooth::cli

#endif  // FLOWSMOOTH_TOOLS_CLI_HPP
