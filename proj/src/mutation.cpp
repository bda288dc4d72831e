#include "stutterfuzz/mutation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

#include "stutterfuzz/error.hpp"
#include "stutterfuzz/serialization.hpp"
#include "stutterfuzz/text.hpp"

namespace stutterfuzz {

namespace {

std::int64_t draw(Rng& rng, std::int64_t lo, std::int64_t hi, std::vector<std::int64_t>& log) {
  std::uniform_int_distribution<std::int64_t> dist(lo, hi);
  const auto v = dist(rng);
  log.push_back(v);
  return v;
}

[[noreturn]] void not_applicable(MutatorKind kind, const std::string& why) {
  throw Error(ErrorCode::NotApplicable, std::string(to_string(kind)) + ": " + why);
}

[[noreturn]] void invalid(const std::string& why) { throw Error(ErrorCode::InvalidChain, why); }

// Innermost edits go first when two records share a timeline position.
int priority(MutatorKind kind) {
  switch (kind) {
    case MutatorKind::Prolongation: return 0;
    case MutatorKind::SoundRepetition: return 1;
    case MutatorKind::WordRepetition: return 2;
    case MutatorKind::Block: return 3;
    case MutatorKind::Interjection: return 4;
  }
  return 5;
}

/// One primitive audio edit derived from a record. Interjections yield one
/// edit per slot.
struct Edit {
  Ms position = 0;  // original timeline
  Ms seg_start = 0;
  Ms seg_end = 0;
  const MutationRecord* record = nullptr;
  std::size_t slot = 0;

  auto order_key() const {
    const auto& r = *record;
    return std::make_tuple(-position, priority(r.kind), r.anchor.word,
                           r.anchor.syllable.value_or(0), r.pause_ms, r.factor, r.copies, r.slots,
                           slot);
  }
};

std::vector<Edit> canonical_edits(const AlignedTranscript& a, const MutationChain& chain) {
  std::vector<Edit> edits;
  for (const auto& r : chain.records) {
    const auto& word = a.words[r.anchor.word];
    switch (r.kind) {
      case MutatorKind::Block: {
        const Ms at = word.syllables[*r.anchor.syllable].end_ms;
        edits.push_back({at, at, at, &r, 0});
        break;
      }
      case MutatorKind::Prolongation:
      case MutatorKind::SoundRepetition: {
        const auto& syl = word.syllables[*r.anchor.syllable];
        edits.push_back({syl.start_ms, syl.start_ms, syl.end_ms, &r, 0});
        break;
      }
      case MutatorKind::WordRepetition:
        edits.push_back({word.start_ms, word.start_ms, word.end_ms, &r, 0});
        break;
      case MutatorKind::Interjection:
        for (const auto slot : r.slots) {
          const Ms at = slot_position(a, slot);
          edits.push_back({at, at, at, &r, slot});
        }
        break;
    }
  }
  std::stable_sort(edits.begin(), edits.end(),
                   [](const Edit& x, const Edit& y) { return x.order_key() < y.order_key(); });
  return edits;
}

struct Growth {
  std::size_t position = 0;  // original sample index
  std::size_t amount = 0;
};

std::size_t map_index(std::size_t original, const std::vector<Growth>& applied) {
  std::size_t out = original;
  for (const auto& g : applied) {
    if (g.position < original) out += g.amount;
  }
  return out;
}

}  // namespace

std::string_view to_string(MutatorKind kind) {
  switch (kind) {
    case MutatorKind::Block: return "block";
    case MutatorKind::Prolongation: return "prolongation";
    case MutatorKind::SoundRepetition: return "sound-repetition";
    case MutatorKind::WordRepetition: return "word-repetition";
    case MutatorKind::Interjection: return "interjection";
  }
  return "unknown";
}

MutatorKind parse_mutator_kind(std::string_view name) {
  for (const auto kind : kAllMutators) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::InvalidParams, "unknown mutator kind '" + std::string(name) + "'");
}

Ms slot_position(const AlignedTranscript& a, std::size_t slot) {
  if (slot == 0 || slot >= a.words.size()) {
    invalid("interjection slot " + std::to_string(slot) + " is not between two words");
  }
  const Ms left = a.words[slot - 1].end_ms;
  const Ms right = a.words[slot].start_ms;
  return left + (right - left) / 2;
}

MutationRecord plan_mutation(const AlignedTranscript& a, MutatorKind kind, Rng& rng,
                             const FillerSet& fillers) {
  if (a.words.empty()) not_applicable(kind, "transcript has no words");
  MutationRecord r;
  r.kind = kind;
  auto& log = r.rng_draws;
  const auto n_words = static_cast<std::int64_t>(a.words.size());
  switch (kind) {
    case MutatorKind::Block: {
      std::vector<std::size_t> multi;
      for (std::size_t k = 0; k < a.words.size(); ++k) {
        if (a.words[k].syllables.size() >= 2) multi.push_back(k);
      }
      if (multi.empty()) not_applicable(kind, "no multi-syllable word");
      r.anchor.word = multi[static_cast<std::size_t>(draw(rng, 0, static_cast<std::int64_t>(multi.size()) - 1, log))];
      const auto boundaries = static_cast<std::int64_t>(a.words[r.anchor.word].syllables.size()) - 1;
      r.anchor.syllable = static_cast<std::size_t>(draw(rng, 0, boundaries - 1, log));
      r.pause_ms = static_cast<int>(draw(rng, 50, 200, log));
      break;
    }
    case MutatorKind::Prolongation:
    case MutatorKind::SoundRepetition: {
      r.anchor.word = static_cast<std::size_t>(draw(rng, 0, n_words - 1, log));
      const auto syllables = static_cast<std::int64_t>(a.words[r.anchor.word].syllables.size());
      r.anchor.syllable = static_cast<std::size_t>(draw(rng, 0, syllables - 1, log));
      const int v = static_cast<int>(draw(rng, 2, 4, log));
      (kind == MutatorKind::Prolongation ? r.factor : r.copies) = v;
      break;
    }
    case MutatorKind::WordRepetition:
      r.anchor.word = static_cast<std::size_t>(draw(rng, 0, n_words - 1, log));
      r.copies = static_cast<int>(draw(rng, 2, 4, log));
      break;
    case MutatorKind::Interjection: {
      const auto candidates = find_filler_candidates(a, fillers);
      if (candidates.empty()) not_applicable(kind, "no filler syllable in this recording");
      if (n_words < 2) not_applicable(kind, "no gap between words");
      const auto& src = candidates[static_cast<std::size_t>(
          draw(rng, 0, static_cast<std::int64_t>(candidates.size()) - 1, log))];
      r.anchor.word = src.word_index;
      r.anchor.syllable = src.syllable_index;
      const auto count = draw(rng, 1, std::min<std::int64_t>(3, n_words - 1), log);
      std::vector<std::size_t> free_slots;
      for (std::size_t s = 1; s < a.words.size(); ++s) free_slots.push_back(s);
      for (std::int64_t i = 0; i < count; ++i) {
        const auto pick = static_cast<std::size_t>(
            draw(rng, 0, static_cast<std::int64_t>(free_slots.size()) - 1, log));
        r.slots.push_back(free_slots[pick]);
        free_slots.erase(free_slots.begin() + static_cast<std::ptrdiff_t>(pick));
      }
      std::sort(r.slots.begin(), r.slots.end());
      break;
    }
  }
  return r;
}

void validate(const MutationRecord& r, const AlignedTranscript& a, const FillerSet& fillers) {
  const std::string what = std::string(to_string(r.kind)) + " record";
  if (r.anchor.word >= a.words.size()) {
    invalid(what + ": word " + std::to_string(r.anchor.word) + " out of range");
  }
  const auto& word = a.words[r.anchor.word];
  const auto n_syl = word.syllables.size();
  auto need_syllable = [&](std::size_t limit) {
    if (!r.anchor.syllable || *r.anchor.syllable >= limit) invalid(what + ": invalid syllable anchor");
  };
  auto in_range = [&](int v, int lo, int hi, const char* name) {
    if (v < lo || v > hi) invalid(what + ": " + name + " " + std::to_string(v) + " outside range");
  };
  switch (r.kind) {
    case MutatorKind::Block:
      if (n_syl < 2) invalid(what + ": anchored on a single-syllable word");
      need_syllable(n_syl - 1);
      in_range(r.pause_ms, 50, 200, "pause_ms");
      break;
    case MutatorKind::Prolongation:
      need_syllable(n_syl);
      in_range(r.factor, 2, 4, "factor");
      break;
    case MutatorKind::SoundRepetition:
      need_syllable(n_syl);
      in_range(r.copies, 2, 4, "copies");
      break;
    case MutatorKind::WordRepetition:
      if (r.anchor.syllable) invalid(what + ": unexpected syllable anchor");
      in_range(r.copies, 2, 4, "copies");
      break;
    case MutatorKind::Interjection: {
      need_syllable(n_syl);
      if (match_filler(word.syllables[*r.anchor.syllable].phones, fillers).empty()) {
        invalid(what + ": source syllable is not a filler candidate");
      }
      if (r.slots.empty() || r.slots.size() > 3) invalid(what + ": needs 1-3 slots");
      std::set<std::size_t> seen;
      for (const auto s : r.slots) {
        if (s == 0 || s >= a.words.size() || !seen.insert(s).second) {
          invalid(what + ": bad slot " + std::to_string(s));
        }
      }
      break;
    }
  }
}

void validate(const MutationChain& chain, const AlignedTranscript& a, std::size_t max_length,
              const FillerSet& fillers) {
  if (chain.records.size() > max_length) {
    invalid("chain of " + std::to_string(chain.records.size()) + " records exceeds cap " +
            std::to_string(max_length));
  }
  for (const auto& r : chain.records) validate(r, a, fillers);
}

Waveform render(const Waveform& benign, const AlignedTranscript& a, const MutationChain& chain) {
  validate(chain, a, std::max(chain.records.size(), kDefaultMaxChainLength));
  if (!a.words.empty() && a.words.back().end_ms > benign.duration_ms()) {
    invalid("alignment extends past the end of the benign audio");
  }
  Waveform out = benign;
  std::vector<Growth> applied;
  for (const auto& e : canonical_edits(a, chain)) {
    const auto& r = *e.record;
    const std::size_t pos = benign.to_index(e.position);
    const std::size_t begin = map_index(benign.to_index(e.seg_start), applied);
    const std::size_t end = map_index(benign.to_index(e.seg_end), applied);
    const std::size_t before = out.size();
    switch (r.kind) {
      case MutatorKind::Block:
        out = insert_silence_samples(out, begin, benign.to_samples(r.pause_ms));
        break;
      case MutatorKind::Prolongation:
        out = stretch_samples(out, begin, end, static_cast<double>(r.factor));
        break;
      case MutatorKind::SoundRepetition:
      case MutatorKind::WordRepetition: {
        const std::size_t fade =
            std::min(benign.to_samples(kRepetitionCrossfadeMs), (end - begin - 1) / 2);
        out = duplicate_samples(out, begin, end, r.copies, fade);
        break;
      }
      case MutatorKind::Interjection: {
        const auto& syl = a.words[r.anchor.word].syllables[*r.anchor.syllable];
        const auto src = benign.samples();
        const auto from = benign.to_index(syl.start_ms);
        const auto to = benign.to_index(syl.end_ms);
        out = insert_samples(out, begin, src.subspan(from, to - from),
                             benign.to_samples(kInterjectionFadeMs));
        break;
      }
    }
    applied.push_back({pos, out.size() - before});
  }
  return out;
}

std::string expected_text(const AlignedTranscript& a, const MutationChain& chain,
                          const FillerSet& fillers) {
  validate(chain, a, std::max(chain.records.size(), kDefaultMaxChainLength), fillers);
  std::vector<std::size_t> repeats(a.words.size(), 1);
  std::map<std::size_t, std::vector<std::string>> inserted;
  for (const auto& e : canonical_edits(a, chain)) {
    const auto& r = *e.record;
    if (r.kind == MutatorKind::WordRepetition) {
      repeats[r.anchor.word] *= static_cast<std::size_t>(r.copies);
    } else if (r.kind == MutatorKind::Interjection) {
      // A later-applied insertion at the same point lands in front.
      const auto& syl = a.words[r.anchor.word].syllables[*r.anchor.syllable];
      auto& at = inserted[e.slot];
      at.insert(at.begin(), match_filler(syl.phones, fillers));
    }
  }
  std::vector<std::string> tokens;
  for (std::size_t k = 0; k < a.words.size(); ++k) {
    if (const auto it = inserted.find(k); it != inserted.end()) {
      tokens.insert(tokens.end(), it->second.begin(), it->second.end());
    }
    const std::string token = text::normalize(a.words[k].text);
    for (std::size_t c = 0; c < repeats[k]; ++c) tokens.push_back(token);
  }
  return text::join(tokens);
}

std::string chain_id(const MutationChain& chain) {
  const std::string canonical = chain_to_json(chain).dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

TestCase make_test_case(const Waveform& benign, const AlignedTranscript& a, MutationChain chain) {
  TestCase tc;
  tc.rendered = render(benign, a, chain);
  tc.expected_text = expected_text(a, chain);
  tc.id = chain_id(chain);
  tc.chain = std::move(chain);
  return tc;
}

}  // namespace stutterfuzz
