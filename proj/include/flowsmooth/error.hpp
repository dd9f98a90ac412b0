#ifndef FLOWSMOOTH_ERROR_HPP
#define FLOWSMOOTH_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace flowsmooth {

enum class ErrorKind {
  NoFrames,
  DimensionMismatch,
  DecodeError,
  IoError,
  InvalidParams,
  BadMagic,
  TruncatedFile,
  MissingExternalFlow,
  TooSmall,
  TooFewFrames,
  InvalidSpec,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NoFrames: return "NoFrames";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DecodeError: return "DecodeError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::TruncatedFile: return "TruncatedFile";
    case ErrorKind::MissingExternalFlow: return "MissingExternalFlow";
    case ErrorKind::TooSmall: return "TooSmall";
    case ErrorKind::TooFewFrames: return "TooFewFrames";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace flowsmooth

#endif  // FLOWSMOOTH_ERROR_HPP
