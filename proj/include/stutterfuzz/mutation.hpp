#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "stutterfuzz/alignment.hpp"
#include "stutterfuzz/audio.hpp"

namespace stutterfuzz {

enum class MutatorKind { Block, Prolongation, SoundRepetition, WordRepetition, Interjection };

inline constexpr std::array<MutatorKind, 5> kAllMutators = {
    MutatorKind::Block, MutatorKind::Prolongation, MutatorKind::SoundRepetition,
    MutatorKind::WordRepetition, MutatorKind::Interjection};

/// "block", "prolongation", "sound-repetition", "word-repetition", "interjection".
std::string_view to_string(MutatorKind kind);
/// Inverse of to_string; throws InvalidParams.
MutatorKind parse_mutator_kind(std::string_view name);

/// Random source for planning; owned by the caller, never shared.
using Rng = std::mt19937_64;

struct Anchor {
  std::size_t word = 0;
  /// Block: the pause goes after this syllable. Prolongation and
  /// SoundRepetition: the edited syllable. Interjection: the filler source.
  std::optional<std::size_t> syllable;

  friend bool operator==(const Anchor&, const Anchor&) = default;
};

/// One mutator application, positioned on the benign recording's timeline.
struct MutationRecord {
  MutatorKind kind = MutatorKind::Block;
  Anchor anchor;
  int pause_ms = 0;                // Block, [50, 200]
  int factor = 0;                  // Prolongation, {2, 3, 4}
  int copies = 0;                  // Sound/WordRepetition, {2, 3, 4}
  std::vector<std::size_t> slots;  // Interjection; slot k sits between words k-1 and k
  std::vector<std::int64_t> rng_draws;

  friend bool operator==(const MutationRecord&, const MutationRecord&) = default;
};

struct MutationChain {
  std::string benign_ref;
  std::vector<MutationRecord> records;

  friend bool operator==(const MutationChain&, const MutationChain&) = default;
};

struct TestCase {
  MutationChain chain;
  Waveform rendered;
  std::string expected_text;
  std::string id;
};

inline constexpr std::size_t kDefaultMaxChainLength = 8;
inline constexpr Ms kRepetitionCrossfadeMs = 10;
inline constexpr Ms kInterjectionFadeMs = 5;

/// Samples an anchor and parameters for `kind`. Throws NotApplicable when the
/// transcript cannot host the mutator.
MutationRecord plan_mutation(const AlignedTranscript& a, MutatorKind kind, Rng& rng,
                             const FillerSet& fillers = default_fillers());

/// Throws InvalidChain if the record's anchor or parameters are not valid
/// for this transcript.
void validate(const MutationRecord& r, const AlignedTranscript& a,
              const FillerSet& fillers = default_fillers());
void validate(const MutationChain& chain, const AlignedTranscript& a,
              std::size_t max_length = kDefaultMaxChainLength,
              const FillerSet& fillers = default_fillers());

/// Applies every record to the benign waveform. Records are applied in a
/// canonical order (latest original-timeline position first), so the result
/// does not depend on record order within the chain. Segments that contain
/// earlier-applied edits are widened to include them.
Waveform render(const Waveform& benign, const AlignedTranscript& a, const MutationChain& chain);

/// Surface text the rendered audio should read as.
std::string expected_text(const AlignedTranscript& a, const MutationChain& chain,
                          const FillerSet& fillers = default_fillers());

/// Stable 16-hex-digit id of (benign_ref, records).
std::string chain_id(const MutationChain& chain);

TestCase make_test_case(const Waveform& benign, const AlignedTranscript& a, MutationChain chain);

/// Timeline position (ms) where the slot's interjection is inserted.
Ms slot_position(const AlignedTranscript& a, std::size_t slot);

}  // namespace stutterfuzz
