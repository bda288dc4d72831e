#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stutterfuzz/alignment.hpp"
#include "stutterfuzz/audio.hpp"
#include "stutterfuzz/lexicon.hpp"

namespace sftest {

using stutterfuzz::Ms;
using stutterfuzz::Waveform;

std::filesystem::path data_dir();
std::filesystem::path fixture_dict_path();
const stutterfuzz::PronunciationDict& fixture_dict();

Waveform silence(Ms ms, std::uint32_t rate = 16000);
Waveform tone(double hz, Ms ms, std::uint32_t rate = 16000, double amplitude = 0.5);
Waveform concat(const std::vector<Waveform>& parts);

struct Utterance {
  Waveform audio;
  std::vector<stutterfuzz::Interval> words;  // where each word's bursts sit
};

// One tone burst per syllable (contiguous within a word), min_gap to
// min_gap + 99 ms of silence between words and 250 ms at both ends.
Utterance synth_utterance(const std::string& transcript, std::uint32_t rate = 16000, Ms min_gap = 200,
                          const stutterfuzz::PronunciationDict& dict = fixture_dict());

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p);

struct SeedSpec {
  std::string ref;
  std::string transcript;
};

// The three benign seeds used by campaign-level tests.
const std::vector<SeedSpec>& fixture_seeds();

struct SutSpec {
  std::string name;
  std::string kind;
};

// Writes <dir>/seeds/<ref>.wav for every fixture seed and returns a campaign
// config that uses them, with output under <dir>/out.
nlohmann::json campaign_config(const std::filesystem::path& dir, const std::vector<SutSpec>& suts,
                               int budget = 50, std::uint64_t rng_seed = 42);

}  // namespace sftest
