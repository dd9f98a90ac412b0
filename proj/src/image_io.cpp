#include "flowsmooth/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace flowsmooth {

std::string_view extension(ImageFormat format) noexcept {
  switch (format) {
    case ImageFormat::Pgm: return "pgm";
    case ImageFormat::Ppm: return "ppm";
    case ImageFormat::Png: return "png";
  }
  return "pgm";
}

std::optional<ImageFormat> parse_image_format(std::string_view name) noexcept {
  if (name == "pgm") return ImageFormat::Pgm;
  if (name == "ppm") return ImageFormat::Ppm;
  if (name == "png") return ImageFormat::Png;
  return std::nullopt;
}

std::optional<ImageFormat> format_from_extension(const std::filesystem::path& path) noexcept {
  std::string ext = path.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (ext == ".pgm") return ImageFormat::Pgm;
  if (ext == ".ppm" || ext == ".pnm") return ImageFormat::Ppm;
  if (ext == ".png") return ImageFormat::Png;
  return std::nullopt;
}

namespace {

Frame frame_from_interleaved(const std::uint8_t* data, int width, int height, int channels) {
  Frame frame(width, height, channels);
  const std::size_t stride = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* row = data + static_cast<std::size_t>(y) * stride;
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < channels; ++c) frame(x, y, c) = row[x * channels + c];
  }
  return frame;
}

std::vector<std::uint8_t> interleaved_bytes(const Frame& frame, int out_channels) {
  const int w = frame.width(), h = frame.height();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
                                static_cast<std::size_t>(out_channels));
  std::size_t k = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < out_channels; ++c)
        out[k++] = quantize_sample(frame(x, y, frame.channels() == 1 ? 0 : c));
  return out;
}

class PnmHeaderReader {
 public:
  explicit PnmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  long next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_]))
      throw Error(ErrorKind::DecodeError, "malformed PNM header");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1'000'000'000L) throw Error(ErrorKind::DecodeError, "PNM header value too large");
    }
    return v;
  }

  void single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
      throw Error(ErrorKind::DecodeError, "missing whitespace after PNM maxval");
    ++pos_;
  }

  std::size_t position() const noexcept { return pos_; }
  void seek(std::size_t p) noexcept { pos_ = p; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Frame decode_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
    throw Error(ErrorKind::DecodeError, "not a binary PGM/PPM file");
  const int channels = bytes[1] == '5' ? 1 : 3;
  PnmHeaderReader header(bytes);
  header.seek(2);
  const long width = header.next_int();
  const long height = header.next_int();
  const long maxval = header.next_int();
  header.single_whitespace();
  if (width <= 0 || height <= 0) throw Error(ErrorKind::DecodeError, "PNM dimensions must be positive");
  if (maxval != 255) throw Error(ErrorKind::DecodeError, "only maxval 255 is supported");
  const std::size_t need = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels;
  if (bytes.size() - header.position() < need) throw Error(ErrorKind::DecodeError, "PNM raster truncated");
  return frame_from_interleaved(bytes.data() + header.position(), static_cast<int>(width),
                                static_cast<int>(height), channels);
}

std::vector<std::uint8_t> encode_pnm(const Frame& frame) {
  const std::string header = (frame.channels() == 1 ? "P5\n" : "P6\n") + std::to_string(frame.width()) + " " +
                             std::to_string(frame.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const auto raster = interleaved_bytes(frame, frame.channels());
  out.insert(out.end(), raster.begin(), raster.end());
  return out;
}

Frame decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    throw Error(ErrorKind::DecodeError, std::string("PNG: ") + image.message);
  const auto fmt = image.format;
  if ((fmt & (PNG_FORMAT_FLAG_ALPHA | PNG_FORMAT_FLAG_LINEAR | PNG_FORMAT_FLAG_COLORMAP)) != 0) {
    png_image_free(&image);
    throw Error(ErrorKind::DecodeError, "PNG must be 8-bit grayscale or RGB without alpha or palette");
  }
  const int channels = (fmt & PNG_FORMAT_FLAG_COLOR) ? 3 : 1;
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr))
    throw Error(ErrorKind::DecodeError, std::string("PNG: ") + image.message);
  const int w = static_cast<int>(image.width), h = static_cast<int>(image.height);
  png_image_free(&image);
  return frame_from_interleaved(buffer.data(), w, h, channels);
}

std::vector<std::uint8_t> encode_png(const Frame& frame) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(frame.width());
  image.height = static_cast<png_uint_32>(frame.height());
  image.format = frame.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const auto raster = interleaved_bytes(frame, frame.channels());
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, raster.data(), 0, nullptr))
    throw Error(ErrorKind::IoError, std::string("PNG encode: ") + image.message);
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, raster.data(), 0, nullptr))
    throw Error(ErrorKind::IoError, std::string("PNG encode: ") + image.message);
  out.resize(size);
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

Frame read_image(const std::filesystem::path& path) {
  const auto format = format_from_extension(path);
  if (!format) throw Error(ErrorKind::DecodeError, "unsupported image extension: " + path.string());
  const auto bytes = read_file_bytes(path);
  try {
    return *format == ImageFormat::Png ? decode_png(bytes) : decode_pnm(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.filename().string() + ": " + e.what());
  }
}

void write_image(const Frame& frame, const std::filesystem::path& path, ImageFormat format) {
  switch (format) {
    case ImageFormat::Pgm:
      if (frame.channels() != 1) throw Error(ErrorKind::InvalidParams, "PGM output needs a luma frame");
      write_file_bytes(path, encode_pnm(frame));
      break;
    case ImageFormat::Ppm:
      if (frame.channels() == 1) {
        Frame rgb(std::vector<PlaneD>{frame.plane(0), frame.plane(0), frame.plane(0)});
        write_file_bytes(path, encode_pnm(rgb));
      } else {
        write_file_bytes(path, encode_pnm(frame));
      }
      break;
    case ImageFormat::Png:
      write_file_bytes(path, encode_png(frame));
      break;
  }
}

}  // namespace flowsmooth
