#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stutterfuzz {

enum class ErrorCode {
  UnsupportedFormat,
  CorruptFile,
  IoFailure,
  OutOfRange,
  InvalidParams,
  RateMismatch,
  TooShort,
  EmptyDictionary,
  OutOfVocabulary,
  NoVowel,
  NoSpeech,
  UnsplittableAudio,
  EmptyTranscript,
  InvalidAlignment,
  NotApplicable,
  InvalidChain,
  DimensionMismatch,
  TooFewResults,
  EmptyReference,
  EmptyInput,
  WrongPool,
  ConfigError,
  EmptyCorpus,
  ProviderUnavailable,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for all domain failures; the code drives CLI exit
/// statuses and test assertions.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stutterfuzz
