#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "stutterfuzz/audio.hpp"
#include "stutterfuzz/lexicon.hpp"

namespace stutterfuzz {

struct TimedSyllable {
  std::vector<std::string> phones;  // empty for an out-of-vocabulary pseudo-syllable
  Ms start_ms = 0;
  Ms end_ms = 0;
  bool is_filler_candidate = false;

  friend bool operator==(const TimedSyllable&, const TimedSyllable&) = default;
};

struct TimedWord {
  std::string text;
  Ms start_ms = 0;
  Ms end_ms = 0;
  std::vector<TimedSyllable> syllables;
  bool out_of_vocabulary = false;

  friend bool operator==(const TimedWord&, const TimedWord&) = default;
};

struct AlignedTranscript {
  std::vector<TimedWord> words;
  std::string transcript_text;
  std::string audio_ref;

  friend bool operator==(const AlignedTranscript&, const AlignedTranscript&) = default;
};

struct Interval {
  Ms start_ms = 0;
  Ms end_ms = 0;

  Ms length() const { return end_ms - start_ms; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct SegmentationParams {
  Ms frame_ms = 25;
  Ms hop_ms = 10;
  double silence_threshold = 0.02;
  Ms min_gap_ms = 120;
};

/// Spelling -> stress-free phones of one-syllable filler words.
using FillerSet = std::map<std::string, std::vector<std::string>>;

/// uh=[AH], um=[AH M], er=[ER], ah=[AA], eh=[EH].
const FillerSet& default_fillers();

/// Voiced runs of the energy track, with runs separated by less than
/// min_gap_ms merged. Throws NoSpeech when nothing is voiced.
std::vector<Interval> detect_voiced_runs(const Waveform& w, const SegmentationParams& params = {});

/// Exactly expected_count word intervals: voiced runs, then merging across
/// the smallest gaps or splitting the longest runs at energy minima.
std::vector<Interval> detect_word_intervals(const Waveform& w, std::size_t expected_count,
                                            const SegmentationParams& params = {});

/// Splits [interval] into one sub-interval per weight, proportionally; the
/// last piece absorbs rounding. Weights must be positive.
std::vector<Interval> proportional_split(Interval interval, const std::vector<std::size_t>& weights);

AlignedTranscript align(const Waveform& w, const std::string& transcript,
                        const PronunciationDict& dict, const SegmentationParams& params = {},
                        const FillerSet& fillers = default_fillers());

struct FillerCandidate {
  std::size_t word_index = 0;
  std::size_t syllable_index = 0;
  std::string spelling;
  TimedSyllable syllable;
};

std::vector<FillerCandidate> find_filler_candidates(const AlignedTranscript& a,
                                                    const FillerSet& fillers = default_fillers());

/// Spelling of the filler matching these phones, or empty.
std::string match_filler(const std::vector<std::string>& phones, const FillerSet& fillers);

/// Throws InvalidAlignment describing the first broken invariant.
void validate(const AlignedTranscript& a);

}  // namespace stutterfuzz
