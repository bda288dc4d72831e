#include "stutterfuzz/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stutterfuzz/error.hpp"
#include "stutterfuzz/text.hpp"

namespace stutterfuzz {

namespace {

struct FrameRun {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive

  std::size_t frames() const { return last - first + 1; }
};

Interval run_interval(const FrameRun& run, const SegmentationParams& p, Ms duration) {
  // Frame i is centred at i*hop + frame/2 and owns +/- hop/2 around it.
  const double half_hop = static_cast<double>(p.hop_ms) / 2.0;
  const double start = static_cast<double>(run.first * p.hop_ms) + p.frame_ms / 2.0 - half_hop;
  const double end = static_cast<double>(run.last * p.hop_ms) + p.frame_ms / 2.0 + half_hop;
  return {std::clamp<Ms>(static_cast<Ms>(std::floor(start + 0.5)), 0, duration),
          std::clamp<Ms>(static_cast<Ms>(std::floor(end + 0.5)), 0, duration)};
}

std::vector<FrameRun> voiced_frame_runs(const EnergyTrack& track, const SegmentationParams& p) {
  std::vector<FrameRun> runs;
  const auto& e = track.values;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] <= p.silence_threshold) continue;
    if (!runs.empty() && runs.back().last + 1 == i) {
      runs.back().last = i;
    } else {
      runs.push_back({i, i});
    }
  }
  // Gap between run k and k+1 in ms, measured between their intervals.
  std::vector<FrameRun> merged;
  for (const auto& run : runs) {
    if (!merged.empty()) {
      const Ms gap = static_cast<Ms>((run.first - merged.back().last - 1) * p.hop_ms);
      if (gap < p.min_gap_ms) {
        merged.back().last = run.last;
        continue;
      }
    }
    merged.push_back(run);
  }
  return merged;
}

void validate_params(const SegmentationParams& p) {
  if (p.hop_ms < 1 || p.frame_ms < p.hop_ms || p.min_gap_ms < 0 || p.silence_threshold < 0) {
    throw Error(ErrorCode::InvalidParams, "invalid segmentation parameters");
  }
}

std::vector<FrameRun> segment(const Waveform& w, const SegmentationParams& p,
                              EnergyTrack& track) {
  validate_params(p);
  if (w.duration_ms() < 100) {
    throw Error(ErrorCode::TooShort, "waveform of " + std::to_string(w.duration_ms()) +
                                         " ms is shorter than 100 ms");
  }
  track = rms_energy(w, p.frame_ms, p.hop_ms);
  auto runs = voiced_frame_runs(track, p);
  if (runs.empty()) throw Error(ErrorCode::NoSpeech, "no speech detected");
  return runs;
}

}  // namespace

const FillerSet& default_fillers() {
  static const FillerSet fillers = {
      {"uh", {"AH"}}, {"um", {"AH", "M"}}, {"er", {"ER"}}, {"ah", {"AA"}}, {"eh", {"EH"}},
  };
  return fillers;
}

std::vector<Interval> detect_voiced_runs(const Waveform& w, const SegmentationParams& params) {
  EnergyTrack track;
  const auto runs = segment(w, params, track);
  std::vector<Interval> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(run_interval(r, params, w.duration_ms()));
  return out;
}

std::vector<Interval> detect_word_intervals(const Waveform& w, std::size_t expected_count,
                                            const SegmentationParams& params) {
  if (expected_count < 1) throw Error(ErrorCode::InvalidParams, "expected_count must be >= 1");
  EnergyTrack track;
  auto runs = segment(w, params, track);
  const auto& energy = track.values;

  while (runs.size() > expected_count) {
    std::size_t best = 0;
    std::size_t best_gap = std::numeric_limits<std::size_t>::max();
    for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
      const std::size_t gap = runs[k + 1].first - runs[k].last;
      if (gap < best_gap) {
        best_gap = gap;
        best = k;
      }
    }
    runs[best].last = runs[best + 1].last;
    runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(best) + 1);
  }

  while (runs.size() < expected_count) {
    std::size_t longest = 0;
    for (std::size_t k = 1; k < runs.size(); ++k) {
      if (runs[k].frames() > runs[longest].frames()) longest = k;
    }
    const FrameRun run = runs[longest];
    if (run.frames() < 4) {
      throw Error(ErrorCode::UnsplittableAudio,
                  "cannot split speech into " + std::to_string(expected_count) +
                      " words: longest run has only " + std::to_string(run.frames()) + " frames");
    }
    // Split point m starts the right piece; both pieces keep >= 2 frames.
    const double mid = (static_cast<double>(run.first) + static_cast<double>(run.last) + 1.0) / 2.0;
    std::size_t split = run.first + 2;
    for (std::size_t m = run.first + 2; m + 1 <= run.last; ++m) {
      const bool lower = energy[m] < energy[split];
      const bool tie_closer = energy[m] == energy[split] &&
                              std::abs(static_cast<double>(m) - mid) <
                                  std::abs(static_cast<double>(split) - mid);
      if (lower || tie_closer) split = m;
    }
    runs[longest].last = split - 1;
    runs.insert(runs.begin() + static_cast<std::ptrdiff_t>(longest) + 1, FrameRun{split, run.last});
  }

  std::vector<Interval> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(run_interval(r, params, w.duration_ms()));
  return out;
}

std::vector<Interval> proportional_split(Interval interval, const std::vector<std::size_t>& weights) {
  if (weights.empty()) throw Error(ErrorCode::InvalidParams, "proportional_split: no weights");
  const Ms len = interval.length();
  const auto pieces = static_cast<Ms>(weights.size());
  if (len < pieces) {
    throw Error(ErrorCode::InvalidParams, "proportional_split: interval shorter than piece count");
  }
  std::size_t total = 0;
  for (const auto wgt : weights) {
    if (wgt == 0) throw Error(ErrorCode::InvalidParams, "proportional_split: zero weight");
    total += wgt;
  }
  std::vector<Interval> out;
  out.reserve(weights.size());
  std::size_t cumulative = 0;
  Ms prev = interval.start_ms;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    cumulative += weights[k];
    Ms boundary = interval.end_ms;
    if (k + 1 < weights.size()) {
      const auto scaled = (2 * static_cast<std::uint64_t>(len) * cumulative + total) / (2 * total);
      boundary = interval.start_ms + static_cast<Ms>(scaled);
      const Ms remaining = pieces - static_cast<Ms>(k) - 1;
      boundary = std::clamp(boundary, prev + 1, interval.end_ms - remaining);
    }
    out.push_back({prev, boundary});
    prev = boundary;
  }
  return out;
}

std::string match_filler(const std::vector<std::string>& phones, const FillerSet& fillers) {
  if (phones.empty()) return {};
  std::vector<std::string> bare;
  bare.reserve(phones.size());
  for (const auto& ph : phones) bare.push_back(strip_stress(ph));
  for (const auto& [spelling, filler] : fillers) {
    if (filler == bare) return spelling;
  }
  return {};
}

AlignedTranscript align(const Waveform& w, const std::string& transcript,
                        const PronunciationDict& dict, const SegmentationParams& params,
                        const FillerSet& fillers) {
  const auto tokens = text::tokenize(transcript);
  if (tokens.empty()) throw Error(ErrorCode::EmptyTranscript, "transcript is empty");
  const auto intervals = detect_word_intervals(w, tokens.size(), params);

  AlignedTranscript out;
  out.transcript_text = transcript;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    TimedWord word;
    word.text = tokens[k];
    word.start_ms = intervals[k].start_ms;
    word.end_ms = intervals[k].end_ms;
    const auto* prons = dict.find(tokens[k]);
    std::vector<SyllableSpan> spans;
    if (prons != nullptr) spans = syllabify(prons->front()).spans;
    if (spans.empty() || static_cast<Ms>(spans.size()) > word.end_ms - word.start_ms) {
      // OOV, or too short to host every syllable: one syllable spanning the word.
      word.out_of_vocabulary = prons == nullptr;
      TimedSyllable s;
      if (prons != nullptr) s.phones = prons->front().phones;
      s.start_ms = word.start_ms;
      s.end_ms = word.end_ms;
      s.is_filler_candidate = !match_filler(s.phones, fillers).empty();
      word.syllables.push_back(std::move(s));
    } else {
      std::vector<std::size_t> weights;
      for (const auto& span : spans) weights.push_back(span.phones.size());
      const auto pieces = proportional_split({word.start_ms, word.end_ms}, weights);
      for (std::size_t j = 0; j < spans.size(); ++j) {
        TimedSyllable s;
        s.phones = spans[j].phones;
        s.start_ms = pieces[j].start_ms;
        s.end_ms = pieces[j].end_ms;
        s.is_filler_candidate = !match_filler(s.phones, fillers).empty();
        word.syllables.push_back(std::move(s));
      }
    }
    out.words.push_back(std::move(word));
  }
  validate(out);
  return out;
}

std::vector<FillerCandidate> find_filler_candidates(const AlignedTranscript& a,
                                                    const FillerSet& fillers) {
  std::vector<FillerCandidate> out;
  for (std::size_t wi = 0; wi < a.words.size(); ++wi) {
    const auto& syllables = a.words[wi].syllables;
    for (std::size_t si = 0; si < syllables.size(); ++si) {
      auto spelling = match_filler(syllables[si].phones, fillers);
      if (!spelling.empty()) out.push_back({wi, si, std::move(spelling), syllables[si]});
    }
  }
  return out;
}

void validate(const AlignedTranscript& a) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidAlignment, why); };
  if (a.words.empty()) fail("alignment has no words");
  Ms prev_end = 0;
  for (std::size_t k = 0; k < a.words.size(); ++k) {
    const auto& w = a.words[k];
    const std::string where = "word " + std::to_string(k) + " ('" + w.text + "')";
    if (w.start_ms < 0 || w.start_ms >= w.end_ms) fail(where + " has an empty or negative interval");
    if (w.start_ms < prev_end) fail(where + " overlaps the previous word");
    prev_end = w.end_ms;
    if (w.syllables.empty()) fail(where + " has no syllables");
    Ms cursor = w.start_ms;
    for (const auto& s : w.syllables) {
      if (s.start_ms != cursor || s.start_ms >= s.end_ms) fail(where + " syllables do not partition it");
      cursor = s.end_ms;
    }
    if (cursor != w.end_ms) fail(where + " syllables do not reach its end");
  }
}

}  // namespace stutterfuzz
