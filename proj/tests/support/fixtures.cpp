#include "fixtures.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <numbers>
#include <stdexcept>

#include "stutterfuzz/text.hpp"

namespace sftest {

std::filesystem::path data_dir() { return STUTTERFUZZ_TEST_DATA_DIR; }

std::filesystem::path fixture_dict_path() { return data_dir() / "fixture.dict"; }

const stutterfuzz::PronunciationDict& fixture_dict() {
  static const auto dict = stutterfuzz::load_dictionary(fixture_dict_path().string());
  return dict;
}

Waveform silence(Ms ms, std::uint32_t rate) {
  return Waveform(std::vector<std::int16_t>(static_cast<std::size_t>(ms) * rate / 1000, 0), rate);
}

Waveform tone(double hz, Ms ms, std::uint32_t rate, double amplitude) {
  const auto n = static_cast<std::size_t>(ms) * rate / 1000;
  std::vector<std::int16_t> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = amplitude * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / rate);
    s[i] = static_cast<std::int16_t>(std::lround(v * 32767.0));
  }
  return Waveform(std::move(s), rate);
}

Waveform concat(const std::vector<Waveform>& parts) {
  std::vector<std::int16_t> out;
  const std::uint32_t rate = parts.empty() ? 16000 : parts.front().sample_rate_hz();
  for (const auto& p : parts) out.insert(out.end(), p.samples().begin(), p.samples().end());
  return Waveform(std::move(out), rate);
}

Utterance synth_utterance(const std::string& transcript, std::uint32_t rate, Ms min_gap,
                          const stutterfuzz::PronunciationDict& dict) {
  static constexpr double kTones[] = {220.0, 330.0, 440.0, 550.0, 660.0};
  Utterance u;
  std::vector<Waveform> parts{silence(250, rate)};
  Ms cursor = 250;
  const auto tokens = stutterfuzz::text::tokenize(transcript);
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    if (k > 0) {
      const Ms gap = min_gap + static_cast<Ms>((k * 37) % 100);
      parts.push_back(silence(gap, rate));
      cursor += gap;
    }
    std::size_t syllables = 1;
    std::size_t phones = tokens[k].size();
    if (const auto* prons = dict.find(tokens[k])) {
      const auto syl = stutterfuzz::syllabify(prons->front());
      syllables = syl.spans.size();
      phones = prons->front().phones.size();
    }
    const Ms per_syllable = 100 + static_cast<Ms>(20 * phones / syllables);
    const Ms start = cursor;
    for (std::size_t s = 0; s < syllables; ++s) {
      parts.push_back(tone(kTones[(k + s) % 5], per_syllable, rate));
      cursor += per_syllable;
    }
    u.words.push_back({start, cursor});
  }
  parts.push_back(silence(250, rate));
  u.audio = concat(parts);
  return u;
}

TempDir::TempDir() {
  std::string tmpl = (std::filesystem::temp_directory_path() / "stutterfuzz-test-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const std::vector<SeedSpec>& fixture_seeds() {
  static const std::vector<SeedSpec> seeds{
      {"pisa", "he plays for pisa"},
      {"convert", "we can convert a type"},
      {"sons", "together they had five sons"},
  };
  return seeds;
}

nlohmann::json campaign_config(const std::filesystem::path& dir, const std::vector<SutSpec>& suts, int budget,
                               std::uint64_t rng_seed) {
  std::filesystem::create_directories(dir / "seeds");
  nlohmann::json benign = nlohmann::json::array();
  for (const auto& s : fixture_seeds()) {
    const auto wav = dir / "seeds" / (s.ref + ".wav");
    stutterfuzz::save_wav(synth_utterance(s.transcript).audio, wav);
    benign.push_back({{"ref", s.ref}, {"audio", wav.string()}, {"transcript", s.transcript}});
  }
  nlohmann::json sut_list = nlohmann::json::array();
  for (const auto& s : suts) sut_list.push_back({{"name", s.name}, {"kind", s.kind}});
  return {{"budget_per_seed", budget},
          {"theta", 0.8},
          {"rng_seed", rng_seed},
          {"suts", sut_list},
          {"dictionary_path", fixture_dict_path().string()},
          {"output_dir", (dir / "out").string()},
          {"benign", benign}};
}

}  // namespace sftest
