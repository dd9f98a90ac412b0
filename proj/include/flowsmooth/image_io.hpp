#ifndef FLOWSMOOTH_IMAGE_IO_HPP
#define FLOWSMOOTH_IMAGE_IO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "flowsmooth/frame.hpp"

namespace flowsmooth {

enum class ImageFormat { Pgm, Ppm, Png };

std::string_view extension(ImageFormat format) noexcept;
std::optional<ImageFormat> parse_image_format(std::string_view name) noexcept;
std::optional<ImageFormat> format_from_extension(const std::filesystem::path& path) noexcept;

/// Binary PGM (P5) / PPM (P6), maxval 255. Comments in the header are
/// tolerated; exactly one whitespace byte follows the maxval.
Frame decode_pnm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pnm(const Frame& frame);

/// 8-bit grayscale or truecolor PNG. Palette, alpha and 16-bit inputs are
/// rejected rather than converted.
Frame decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const Frame& frame);

/// Reads by extension (.pgm, .ppm, .pnm, .png).
Frame read_image(const std::filesystem::path& path);

/// Writes with `format`. PGM requires a luma frame; PPM replicates luma into
/// three channels.
void write_image(const Frame& frame, const std::filesystem::path& path, ImageFormat format);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace flowsmooth

#endif  // FLOWSMOOTH_IMAGE_IO_HPP
