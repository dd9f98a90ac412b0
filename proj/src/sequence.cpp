#include "flowsmooth/sequence.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>

namespace flowsmooth {

SequenceHandle::SequenceHandle(std::vector<Frame> frames, std::vector<std::string> source_names)
    : frames_(std::move(frames)), names_(std::move(source_names)) {
  validate();
}

void SequenceHandle::validate() const {
  if (frames_.empty()) throw Error(ErrorKind::NoFrames, "sequence must contain at least one frame");
  if (names_.size() != frames_.size())
    throw Error(ErrorKind::InvalidParams, "one source name per frame is required");
  for (std::size_t i = 1; i < frames_.size(); ++i) {
    if (!frames_[i].same_shape(frames_.front()))
      throw Error(ErrorKind::DimensionMismatch,
                  names_[i] + " is " + std::to_string(frames_[i].width()) + "x" +
                      std::to_string(frames_[i].height()) + "x" + std::to_string(frames_[i].channels()) +
                      ", expected " + std::to_string(width()) + "x" + std::to_string(height()) + "x" +
                      std::to_string(channels()));
  }
}

namespace {
std::vector<std::string> default_names(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back(frame_file_name(i, ImageFormat::Pgm));
  return names;
}
}  // namespace

SequenceHandle::SequenceHandle(std::vector<Frame> frames) : frames_(std::move(frames)) {
  names_ = default_names(frames_.size());
  validate();
}

std::string frame_file_name(std::size_t index, ImageFormat format, const std::string& prefix) {
  char digits[32];
  std::snprintf(digits, sizeof digits, "%06zu", index);
  return prefix + digits + "." + std::string(extension(format));
}

SequenceHandle load_sequence(const std::filesystem::path& dir, const FramePattern& pattern) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::IoError, "not a directory: " + dir.string());

  std::map<unsigned long long, fs::path> by_index;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto path = entry.path();
    const auto format = format_from_extension(path);
    if (!format || (pattern.format && *pattern.format != *format &&
                    !(*pattern.format == ImageFormat::Ppm && path.extension() == ".pnm")))
      continue;
    const std::string stem = path.stem().string();
    if (stem.size() <= pattern.prefix.size() || stem.compare(0, pattern.prefix.size(), pattern.prefix) != 0)
      continue;
    const std::string_view digits(stem.data() + pattern.prefix.size(), stem.size() - pattern.prefix.size());
    if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) continue;
    unsigned long long index = 0;
    if (std::from_chars(digits.data(), digits.data() + digits.size(), index).ec != std::errc{}) continue;
    if (!by_index.emplace(index, path).second)
      throw Error(ErrorKind::DecodeError, "duplicate frame index " + std::to_string(index) + " in " + dir.string());
  }
  if (by_index.empty())
    throw Error(ErrorKind::NoFrames, "no files matching " + pattern.prefix + "<index>.<ext> in " + dir.string());

  std::vector<Frame> frames;
  std::vector<std::string> names;
  frames.reserve(by_index.size());
  for (const auto& [index, path] : by_index) {
    frames.push_back(read_image(path));
    names.push_back(path.filename().string());
  }
  return SequenceHandle(std::move(frames), std::move(names));
}

std::vector<std::string> write_sequence(const SequenceHandle& seq, const std::filesystem::path& dir,
                                        ImageFormat format, const std::string& prefix) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::string> names;
  names.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    names.push_back(frame_file_name(i, format, prefix));
    write_image(seq[i], dir / names.back(), format);
  }
  return names;
}

ImageFormat natural_format(const SequenceHandle& seq) noexcept {
  return seq.channels() == 1 ? ImageFormat::Pgm : ImageFormat::Ppm;
}

}  // namespace flowsmooth
