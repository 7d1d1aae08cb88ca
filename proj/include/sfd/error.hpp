#ifndef SFD_ERROR_HPP
#define SFD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sfd {

/// Distinguishable failure categories. Every throwing operation in the
/// library raises Error with one of these codes so callers can branch
/// without parsing message text.
enum class ErrorCode {
  FileNotReadable,
  UnsupportedFormat,
  ZeroSizedImage,
  ImageTooSmall,
  UnwritablePath,
  DimensionMismatch,
  InvalidArgument,
  NoDiskFound,
  AllZeroImage,
  DegenerateHistogram,
  TooFewDistinctValues,
  NonFiniteValues,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace sfd

#endif
