#include "stutterfuzz/error.hpp"

namespace stutterfuzz {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::RateMismatch: return "RateMismatch";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::EmptyDictionary: return "EmptyDictionary";
    case ErrorCode::OutOfVocabulary: return "OutOfVocabulary";
    case ErrorCode::NoVowel: return "NoVowel";
    case ErrorCode::NoSpeech: return "NoSpeech";
    case ErrorCode::UnsplittableAudio: return "UnsplittableAudio";
    case ErrorCode::EmptyTranscript: return "EmptyTranscript";
    case ErrorCode::InvalidAlignment: return "InvalidAlignment";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::InvalidChain: return "InvalidChain";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooFewResults: return "TooFewResults";
    case ErrorCode::EmptyReference: return "EmptyReference";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::WrongPool: return "WrongPool";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
  }
  return "Unknown";
}

}  // namespace stutterfuzz
