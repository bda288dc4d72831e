#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace stutterfuzz {

/// Milliseconds on an audio timeline.
using Ms = std::int64_t;

/// Mono PCM16 buffer. Immutable once built; every edit returns a new value.
class Waveform {
 public:
  static constexpr std::uint32_t kMinRate = 8000;
  static constexpr std::uint32_t kMaxRate = 48000;

  Waveform() = default;
  /// Throws InvalidParams when the rate is outside [8000, 48000].
  Waveform(std::vector<std::int16_t> samples, std::uint32_t sample_rate_hz);

  std::span<const std::int16_t> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  std::uint32_t sample_rate_hz() const noexcept { return rate_; }
  static constexpr int channels() noexcept { return 1; }

  /// round(1000 * size / rate), half-up.
  Ms duration_ms() const noexcept;

  /// Sample index for a timeline position, rounding half-up.
  std::size_t to_samples(Ms ms) const noexcept;
  /// Same as to_samples but clamped to size(); duration_ms() maps to size().
  std::size_t to_index(Ms ms) const noexcept;

  friend bool operator==(const Waveform&, const Waveform&) = default;

 private:
  std::vector<std::int16_t> samples_;
  std::uint32_t rate_ = 16000;
};

/// Frame-wise RMS energy on a [-1, 1] normalized scale.
struct EnergyTrack {
  Ms frame_ms = 0;
  Ms hop_ms = 0;
  std::vector<double> values;
};

Waveform load_wav(const std::filesystem::path& path);
void save_wav(const Waveform& w, const std::filesystem::path& path);

/// Canonical 44-byte-header encoding used by save_wav.
std::vector<std::uint8_t> encode_wav(const Waveform& w);
Waveform decode_wav(std::span<const std::uint8_t> bytes);

Waveform insert_silence(const Waveform& w, Ms at_ms, Ms dur_ms);

/// Repeats [start_ms, end_ms) `copies` times; adjacent instances overlap by
/// crossfade_ms with a linear fade.
Waveform duplicate_segment(const Waveform& w, Ms start_ms, Ms end_ms, int copies,
                           Ms crossfade_ms = 10);

/// Pitch-preserving overlap-add (WSOLA) stretch of [start_ms, end_ms) by `factor`
/// (25 ms Hann window, 50% synthesis hop).
Waveform time_stretch_segment(const Waveform& w, Ms start_ms, Ms end_ms, double factor);

Waveform extract_segment(const Waveform& w, Ms start_ms, Ms end_ms);

/// Splices `seg` in at `at_ms`. The first and last fade_ms of the inserted
/// material are ramped linearly from/to silence.
Waveform insert_segment(const Waveform& w, Ms at_ms, const Waveform& seg, Ms fade_ms = 5);

EnergyTrack rms_energy(const Waveform& w, Ms frame_ms, Ms hop_ms);

// Sample-index forms of the edits above. Indices must already be valid for
// the waveform; the millisecond wrappers do the range checking.
Waveform insert_silence_samples(const Waveform& w, std::size_t at, std::size_t count);
Waveform duplicate_samples(const Waveform& w, std::size_t begin, std::size_t end, int copies,
                           std::size_t crossfade);
Waveform stretch_samples(const Waveform& w, std::size_t begin, std::size_t end, double factor);
Waveform insert_samples(const Waveform& w, std::size_t at, std::span<const std::int16_t> seg,
                        std::size_t fade);

/// Synthesis window length and hop (in samples) used by time_stretch_segment.
std::size_t stretch_window_samples(std::uint32_t sample_rate_hz);
std::size_t stretch_hop_samples(std::uint32_t sample_rate_hz);

}  // namespace stutterfuzz
