#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "stutterfuzz/alignment.hpp"
#include "stutterfuzz/audio.hpp"
#include "stutterfuzz/lexicon.hpp"

namespace stutterfuzz {

enum class SutKind { Http, Subprocess, MockOracle, MockFragile };

std::string_view to_string(SutKind kind);
/// "http", "subprocess", "mock_oracle", "mock_fragile"; throws ConfigError.
SutKind parse_sut_kind(std::string_view name);

/// Ground truth of each benign recording, keyed by benign_ref. Mocks answer
/// from here; word durations (when present) calibrate mock_fragile.
class GroundTruthRegistry {
 public:
  struct Entry {
    std::string transcript;
    std::vector<Ms> word_durations_ms;  // optional, one per token
  };

  void add(const std::string& benign_ref, std::string transcript,
           std::vector<Ms> word_durations_ms = {});
  /// Registers the transcript and the per-word durations of an alignment.
  void add(const std::string& benign_ref, const AlignedTranscript& a);
  std::optional<Entry> find(const std::string& benign_ref) const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, Entry> entries_;
};

struct SutDescriptor {
  std::string name;
  SutKind kind = SutKind::MockOracle;
  std::string endpoint;              // http: "http://host:port/path"
  std::vector<std::string> command;  // subprocess argv prefix
  int timeout_ms = 30000;
  int retries = 2;
  int max_in_flight = 4;
  std::shared_ptr<const GroundTruthRegistry> registry;  // mocks
  std::shared_ptr<const PronunciationDict> dict;        // mock_fragile fallback timing
};

enum class TranscriptionStatus { Ok, Error };

struct TranscriptionResult {
  std::string sut_name;
  std::string text;  // normalized
  double latency_ms = 0.0;
  TranscriptionStatus status = TranscriptionStatus::Ok;
  std::string error_detail;

  bool ok() const { return status == TranscriptionStatus::Ok; }
};

/// Throws ConfigError for an unusable descriptor.
void validate(const SutDescriptor& d);

/// What a SUT sees for one call. benign_ref names the unmutated ancestor;
/// only the mock SUTs read it.
struct TranscriptionRequest {
  const Waveform& audio;
  std::string benign_ref;
};

/// One system under test. Implementations hold no mutable shared state
/// besides the in-flight limiter, so a single instance may serve many threads.
class Recognizer {
 public:
  explicit Recognizer(SutDescriptor d);
  virtual ~Recognizer() = default;
  Recognizer(const Recognizer&) = delete;
  Recognizer& operator=(const Recognizer&) = delete;

  const SutDescriptor& descriptor() const { return descriptor_; }

  /// Never throws: after 1 + retries failed attempts the result carries
  /// status Error. Text is normalized.
  TranscriptionResult transcribe(const TranscriptionRequest& request) const;

 protected:
  /// One attempt. Throws on failure; the returned text is raw.
  virtual std::string attempt(const TranscriptionRequest& request) const = 0;

 private:
  SutDescriptor descriptor_;
  mutable std::counting_semaphore<64> in_flight_;
};

std::unique_ptr<Recognizer> make_recognizer(const SutDescriptor& d);

TranscriptionResult transcribe(const Recognizer& sut, const Waveform& w,
                               const std::string& benign_ref = {});

SutDescriptor mock_oracle(std::string name, std::shared_ptr<const GroundTruthRegistry> registry);
SutDescriptor mock_fragile(std::string name, std::shared_ptr<const GroundTruthRegistry> registry,
                           std::shared_ptr<const PronunciationDict> dict = nullptr);

/// The decoder behind mock_fragile, exposed for testing: one token per
/// detected burst, greedily matched against the reference tokens by duration.
std::vector<std::string> fragile_decode(const Waveform& w, const std::vector<std::string>& tokens,
                                        const std::vector<Ms>& reference_durations_ms);

}  // namespace stutterfuzz
