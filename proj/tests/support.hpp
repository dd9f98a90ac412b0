#ifndef FLOWSMOOTH_TESTS_SUPPORT_HPP
#define FLOWSMOOTH_TESTS_SUPPORT_HPP

#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <string>

#include <unistd.h>

#include "flowsmooth/frame.hpp"

namespace flowsmooth::test {

/// Removes the directory on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("flowsmooth_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Integer-valued random frame in [0, 255].
inline Frame random_byte_frame(std::mt19937_64& rng, int width, int height, int channels) {
  std::uniform_int_distribution<int> dist(0, 255);
  Frame f(width, height, channels);
  for (int c = 0; c < channels; ++c)
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) f(x, y, c) = dist(rng);
  return f;
}

/// Real-valued random frame in [lo, hi].
inline Frame random_real_frame(std::mt19937_64& rng, int width, int height, int channels, double lo = 0.0,
                               double hi = 255.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Frame f(width, height, channels);
  for (int c = 0; c < channels; ++c)
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) f(x, y, c) = dist(rng);
  return f;
}

/// Relative path -> file contents for every regular file under `root`.
inline std::map<std::string, std::string> snapshot_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    files[std::filesystem::relative(entry.path(), root).generic_string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return files;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace flowsmooth::test

#endif  // FLOWSMOOTH_TESTS_SUPPORT_HPP
