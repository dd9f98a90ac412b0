#ifndef FLOWSMOOTH_SEQUENCE_HPP
#define FLOWSMOOTH_SEQUENCE_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flowsmooth/frame.hpp"
#include "flowsmooth/image_io.hpp"

namespace flowsmooth {

/// An ordered, non-empty list of frames sharing one shape, plus the file
/// name each frame came from (or will be written to).
class SequenceHandle {
 public:
  SequenceHandle(std::vector<Frame> frames, std::vector<std::string> source_names);
  explicit SequenceHandle(std::vector<Frame> frames);

  std::size_t size() const noexcept { return frames_.size(); }
  const Frame& operator[](std::size_t i) const { return frames_[i]; }
  const std::vector<Frame>& frames() const noexcept { return frames_; }
  const std::vector<std::string>& source_names() const noexcept { return names_; }

  int width() const noexcept { return frames_.front().width(); }
  int height() const noexcept { return frames_.front().height(); }
  int channels() const noexcept { return frames_.front().channels(); }

 private:
  void validate() const;

  std::vector<Frame> frames_;
  std::vector<std::string> names_;
};

/// Matches `<prefix><decimal index>.<ext>` where ext is pgm, ppm, pnm or png.
struct FramePattern {
  std::string prefix = "frame_";
  std::optional<ImageFormat> format;  // any supported extension when unset
};

/// Default file name for index `i`: prefix + 6-digit zero-padded index + ext.
std::string frame_file_name(std::size_t index, ImageFormat format, const std::string& prefix = "frame_");

/// Loads every matching file, ordered by parsed integer index.
SequenceHandle load_sequence(const std::filesystem::path& dir, const FramePattern& pattern = {});

/// Writes frame_%06d.<ext> files. Samples are rounded half away from zero
/// and clamped to [0, 255]. Returns the file names written, in order.
std::vector<std::string> write_sequence(const SequenceHandle& seq, const std::filesystem::path& dir,
                                        ImageFormat format, const std::string& prefix = "frame_");

/// pgm for luma sequences, ppm for RGB.
ImageFormat natural_format(const SequenceHandle& seq) noexcept;

}  // namespace flowsmooth

#endif  // FLOWSMOOTH_SEQUENCE_HPP
