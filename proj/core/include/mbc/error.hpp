#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mbc {

enum class ErrorCode {
  // grammar construction / lookup
  kInvalidName,
  kDuplicatePatternName,
  kEmptyClassReferenced,
  kEmptyBody,
  kInvalidFrequency,
  kUnknownClass,
  kNotAMember,
  kUnknownSymbol,
  // derivation
  kNoCover,
  kCoverMismatch,
  // codec / formats
  kFingerprintMismatch,
  kTruncatedStream,
  kTrailingTokens,
  kMalformedStream,
  kBadMagic,
  kOffsetOutOfRange,
  kSyntaxError,
  kUnsortedInput,
  // learning
  kEmptyCorpus,
  // session
  kProtocolViolation,
  kChannelClosed,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mbc
