#include "cuepoint/error.h"

namespace cuepoint {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kUnsupportedCodec: return "UnsupportedCodec";
    case ErrorCode::kCorruptStream: return "CorruptStream";
    case ErrorCode::kBufferTooShort: return "BufferTooShort";
    case ErrorCode::kNoPulse: return "NoPulse";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kNonMonotonic: return "NonMonotonic";
    case ErrorCode::kTooFewBeats: return "TooFewBeats";
    case ErrorCode::kTrackTooShort: return "TrackTooShort";
    case ErrorCode::kInvalidScript: return "InvalidScript";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kNoOverlap: return "NoOverlap";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFileNotFound:
    case ErrorCode::kUnsupportedCodec:
    case ErrorCode::kCorruptStream:
    case ErrorCode::kParseError:
    case ErrorCode::kNonMonotonic:
    case ErrorCode::kInvalidScript:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kNoOverlap:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kIoError:
      return true;
    default:
      return false;
  }
}

}  // namespace cuepoint
