#include <bit>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <vector>

#include "flowsmooth/flow_field.hpp"
#include "flowsmooth/image_io.hpp"

namespace flowsmooth {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[at + i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_flo(const FlowField& field) {
  const int w = field.width(), h = field.height();
  std::vector<std::uint8_t> out;
  out.reserve(12 + 8 * static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  put_u32(out, std::bit_cast<std::uint32_t>(kFloMagic));
  put_u32(out, static_cast<std::uint32_t>(w));
  put_u32(out, static_cast<std::uint32_t>(h));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(field.u(y, x))));
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(field.v(y, x))));
    }
  return out;
}

FlowField decode_flo(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw Error(ErrorKind::TruncatedFile, ".flo shorter than its magic");
  if (std::bit_cast<float>(get_u32(bytes, 0)) != kFloMagic) throw Error(ErrorKind::BadMagic, "not a .flo file");
  if (bytes.size() < 12) throw Error(ErrorKind::TruncatedFile, ".flo header truncated");
  const auto w = static_cast<std::int32_t>(get_u32(bytes, 4));
  const auto h = static_cast<std::int32_t>(get_u32(bytes, 8));
  if (w <= 0 || h <= 0 || w > (1 << 20) || h > (1 << 20))
    throw Error(ErrorKind::DecodeError, ".flo dimensions out of range");
  const std::size_t need = 12 + 8 * static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() < need) throw Error(ErrorKind::TruncatedFile, ".flo payload truncated");
  FlowField field(w, h);
  std::size_t at = 12;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      field.u(y, x) = std::bit_cast<float>(get_u32(bytes, at));
      field.v(y, x) = std::bit_cast<float>(get_u32(bytes, at + 4));
      at += 8;
    }
  return field;
}

FlowField read_flo(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  const auto bytes = read_file_bytes(path);
  try {
    return decode_flo(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.filename().string() + ": " + e.what());
  }
}

void write_flo(const FlowField& field, const std::filesystem::path& path) {
  write_file_bytes(path, encode_flo(field));
}

}  // namespace flowsmooth
