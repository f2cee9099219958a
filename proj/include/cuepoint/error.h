#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cuepoint {

enum class ErrorCode {
  kFileNotFound,
  kUnsupportedCodec,
  kCorruptStream,
  kBufferTooShort,
  kNoPulse,
  kParseError,
  kNonMonotonic,
  kTooFewBeats,
  kTrackTooShort,
  kInvalidScript,
  kInvalidConfig,
  kNoOverlap,
  kInvalidArgument,
  kIoError,
};

std::string_view to_string(ErrorCode code);

/// Errors caused by bad user input (files, flags, scripts) as opposed to
/// failures of the analysis itself. The CLI maps these to exit code 2.
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cuepoint
