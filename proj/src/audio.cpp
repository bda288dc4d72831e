#include "stutterfuzz/audio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>

#include "stutterfuzz/error.hpp"

namespace stutterfuzz {

namespace {

constexpr std::size_t kHeaderSize = 44;

std::int16_t clamp_sample(double v) {
  const double r = std::round(v);
  return static_cast<std::int16_t>(std::clamp(r, -32768.0, 32767.0));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::equal(b.begin() + static_cast<std::ptrdiff_t>(at),
                    b.begin() + static_cast<std::ptrdiff_t>(at + 4), tag);
}

void check_range(const Waveform& w, Ms start_ms, Ms end_ms, const char* op) {
  if (start_ms < 0 || end_ms <= start_ms || end_ms > w.duration_ms()) {
    std::ostringstream msg;
    msg << op << ": segment [" << start_ms << ", " << end_ms << ") outside [0, "
        << w.duration_ms() << "] ms";
    throw Error(ErrorCode::OutOfRange, msg.str());
  }
}

}  // namespace

Waveform::Waveform(std::vector<std::int16_t> samples, std::uint32_t sample_rate_hz)
    : samples_(std::move(samples)), rate_(sample_rate_hz) {
  if (rate_ < kMinRate || rate_ > kMaxRate) {
    throw Error(ErrorCode::InvalidParams,
                "sample rate " + std::to_string(rate_) + " Hz outside [8000, 48000]");
  }
}

Ms Waveform::duration_ms() const noexcept {
  return static_cast<Ms>((1000ULL * samples_.size() + rate_ / 2) / rate_);
}

std::size_t Waveform::to_samples(Ms ms) const noexcept {
  if (ms <= 0) return 0;
  return static_cast<std::size_t>((static_cast<std::uint64_t>(ms) * rate_ + 500) / 1000);
}

std::size_t Waveform::to_index(Ms ms) const noexcept {
  if (ms >= duration_ms()) return samples_.size();
  return std::min(to_samples(ms), samples_.size());
}

std::vector<std::uint8_t> encode_wav(const Waveform& w) {
  const auto data_bytes = static_cast<std::uint32_t>(w.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, w.sample_rate_hz());
  put_u32(out, w.sample_rate_hz() * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_bytes);
  for (const auto s : w.samples()) put_u16(out, static_cast<std::uint16_t>(s));
  return out;
}

Waveform decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) throw Error(ErrorCode::CorruptFile, "file shorter than RIFF header");
  if (!tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    throw Error(ErrorCode::UnsupportedFormat, "not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos < bytes.size()) {
    if (pos + 8 > bytes.size()) throw Error(ErrorCode::CorruptFile, "truncated chunk header");
    const std::uint32_t chunk_size = get_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (chunk_size > bytes.size() - body) {
      throw Error(ErrorCode::CorruptFile, "chunk extends past end of file");
    }
    if (tag_is(bytes, pos, "fmt ")) {
      if (chunk_size < 16) throw Error(ErrorCode::CorruptFile, "fmt chunk too small");
      const auto format = get_u16(bytes, body);
      const auto channels = get_u16(bytes, body + 2);
      rate = get_u32(bytes, body + 4);
      const auto bits = get_u16(bytes, body + 14);
      if (format != 1) {
        throw Error(ErrorCode::UnsupportedFormat,
                    "audio format " + std::to_string(format) + " is not integer PCM");
      }
      if (channels != 1) {
        throw Error(ErrorCode::UnsupportedFormat,
                    std::to_string(channels) + " channels; only mono is supported");
      }
      if (bits != 16) {
        throw Error(ErrorCode::UnsupportedFormat,
                    std::to_string(bits) + "-bit samples; only 16-bit is supported");
      }
      if (rate < Waveform::kMinRate || rate > Waveform::kMaxRate) {
        throw Error(ErrorCode::UnsupportedFormat, "sample rate " + std::to_string(rate));
      }
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      if (!have_fmt) throw Error(ErrorCode::CorruptFile, "data chunk before fmt chunk");
      if (chunk_size % 2 != 0) throw Error(ErrorCode::CorruptFile, "odd PCM16 data size");
      std::vector<std::int16_t> samples(chunk_size / 2);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i] = static_cast<std::int16_t>(get_u16(bytes, body + 2 * i));
      }
      return Waveform(std::move(samples), rate);
    }
    pos = body + chunk_size + (chunk_size % 2);
  }
  throw Error(ErrorCode::CorruptFile, have_fmt ? "missing data chunk" : "missing fmt chunk");
}

Waveform load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                        std::istreambuf_iterator<char>()};
  try {
    return decode_wav(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void save_wav(const Waveform& w, const std::filesystem::path& path) {
  const auto bytes = encode_wav(w);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

Waveform insert_silence(const Waveform& w, Ms at_ms, Ms dur_ms) {
  if (at_ms < 0 || at_ms > w.duration_ms()) {
    throw Error(ErrorCode::OutOfRange, "insert_silence: position " + std::to_string(at_ms) +
                                           " ms beyond " + std::to_string(w.duration_ms()) + " ms");
  }
  if (dur_ms <= 0) throw Error(ErrorCode::InvalidParams, "insert_silence: duration must be > 0");
  return insert_silence_samples(w, w.to_index(at_ms), w.to_samples(dur_ms));
}

Waveform insert_silence_samples(const Waveform& w, std::size_t at, std::size_t count) {
  const auto src = w.samples();
  std::vector<std::int16_t> out;
  out.reserve(src.size() + count);
  out.insert(out.end(), src.begin(), src.begin() + static_cast<std::ptrdiff_t>(at));
  out.insert(out.end(), count, 0);
  out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(at), src.end());
  return Waveform(std::move(out), w.sample_rate_hz());
}

Waveform duplicate_segment(const Waveform& w, Ms start_ms, Ms end_ms, int copies,
                           Ms crossfade_ms) {
  check_range(w, start_ms, end_ms, "duplicate_segment");
  if (copies < 2) throw Error(ErrorCode::InvalidParams, "duplicate_segment: copies must be >= 2");
  if (crossfade_ms < 0 || 2 * crossfade_ms >= end_ms - start_ms) {
    throw Error(ErrorCode::InvalidParams,
                "duplicate_segment: crossfade must be shorter than half the segment");
  }
  return duplicate_samples(w, w.to_index(start_ms), w.to_index(end_ms), copies,
                           w.to_samples(crossfade_ms));
}

Waveform duplicate_samples(const Waveform& w, std::size_t a, std::size_t b, int copies,
                           std::size_t crossfade) {
  const auto src = w.samples();
  const auto seg = src.subspan(a, b - a);
  const auto fade = std::min(crossfade, seg.size() / 2);

  std::vector<std::int16_t> out;
  out.reserve(src.size() + (copies - 1) * seg.size());
  out.insert(out.end(), src.begin(), src.begin() + static_cast<std::ptrdiff_t>(a));
  out.insert(out.end(), seg.begin(), seg.end());
  for (int c = 1; c < copies; ++c) {
    const std::size_t join = out.size() - fade;
    for (std::size_t i = 0; i < fade; ++i) {
      const double t = static_cast<double>(i + 1) / static_cast<double>(fade + 1);
      out[join + i] = clamp_sample(out[join + i] * (1.0 - t) + seg[i] * t);
    }
    out.insert(out.end(), seg.begin() + static_cast<std::ptrdiff_t>(fade), seg.end());
  }
  out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(b), src.end());
  return Waveform(std::move(out), w.sample_rate_hz());
}

std::size_t stretch_window_samples(std::uint32_t sample_rate_hz) {
  const auto n = (25ULL * sample_rate_hz + 500) / 1000;
  return static_cast<std::size_t>(n - n % 2);
}

std::size_t stretch_hop_samples(std::uint32_t sample_rate_hz) {
  return stretch_window_samples(sample_rate_hz) / 2;
}

Waveform time_stretch_segment(const Waveform& w, Ms start_ms, Ms end_ms, double factor) {
  check_range(w, start_ms, end_ms, "time_stretch_segment");
  if (!(factor >= 1.0) || !std::isfinite(factor)) {
    throw Error(ErrorCode::InvalidParams, "time_stretch_segment: factor must be >= 1");
  }
  return stretch_samples(w, w.to_index(start_ms), w.to_index(end_ms), factor);
}

Waveform stretch_samples(const Waveform& w, std::size_t a, std::size_t b, double factor) {
  const auto src = w.samples();
  const auto seg = src.subspan(a, b - a);
  const std::size_t len = seg.size();
  const auto target = static_cast<std::size_t>(std::llround(static_cast<double>(len) * factor));

  std::vector<std::int16_t> stretched;
  if (factor == 1.0) {
    stretched.assign(seg.begin(), seg.end());
  } else {
    std::size_t window = std::min(stretch_window_samples(w.sample_rate_hz()), len - len % 2);
    std::vector<double> acc(target, 0.0);
    std::vector<double> weight(target, 0.0);
    if (window >= 4) {
      const std::size_t hop = window / 2;
      const double analysis_hop = static_cast<double>(hop) / factor;
      std::vector<double> hann(window);
      for (std::size_t n = 0; n < window; ++n) {
        hann[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                       static_cast<double>(window));
      }
      const std::size_t last = len - window;
      const auto tolerance = static_cast<std::ptrdiff_t>(window / 4);
      std::size_t prev_in = 0;
      for (std::size_t k = 0; k * hop < target; ++k) {
        const std::size_t out_pos = k * hop;
        auto in_pos = std::min<std::size_t>(
            static_cast<std::size_t>(std::llround(static_cast<double>(k) * analysis_hop)), last);
        if (k > 0) {
          // WSOLA: pick the frame near the nominal position that best continues the previous one.
          const std::size_t natural = std::min(prev_in + hop, last);
          double best = -2.0;
          std::size_t best_pos = in_pos;
          for (std::ptrdiff_t d = -tolerance; d <= tolerance; ++d) {
            const auto cand = static_cast<std::ptrdiff_t>(in_pos) + d;
            if (cand < 0 || cand > static_cast<std::ptrdiff_t>(last)) continue;
            double xy = 0.0, xx = 0.0, yy = 0.0;
            for (std::size_t n = 0; n < window; ++n) {
              const double x = seg[static_cast<std::size_t>(cand) + n];
              const double y = seg[natural + n];
              xy += x * y;
              xx += x * x;
              yy += y * y;
            }
            const double score = xx > 0.0 && yy > 0.0 ? xy / std::sqrt(xx * yy) : 0.0;
            if (score > best + 1e-12) {
              best = score;
              best_pos = static_cast<std::size_t>(cand);
            }
          }
          in_pos = best_pos;
        }
        prev_in = in_pos;
        for (std::size_t n = 0; n < window && out_pos + n < target; ++n) {
          acc[out_pos + n] += hann[n] * seg[in_pos + n];
          weight[out_pos + n] += hann[n];
        }
      }
    }
    stretched.resize(target);
    for (std::size_t i = 0; i < target; ++i) {
      if (weight[i] > 1e-6) {
        stretched[i] = clamp_sample(acc[i] / weight[i]);
      } else {
        const auto j = std::min<std::size_t>(
            static_cast<std::size_t>(static_cast<double>(i) / factor), len - 1);
        stretched[i] = seg[j];
      }
    }
  }

  std::vector<std::int16_t> out;
  out.reserve(src.size() - len + target);
  out.insert(out.end(), src.begin(), src.begin() + static_cast<std::ptrdiff_t>(a));
  out.insert(out.end(), stretched.begin(), stretched.end());
  out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(b), src.end());
  return Waveform(std::move(out), w.sample_rate_hz());
}

Waveform extract_segment(const Waveform& w, Ms start_ms, Ms end_ms) {
  check_range(w, start_ms, end_ms, "extract_segment");
  const auto src = w.samples();
  const auto a = w.to_index(start_ms);
  const auto b = w.to_index(end_ms);
  return Waveform(std::vector<std::int16_t>(src.begin() + static_cast<std::ptrdiff_t>(a),
                                            src.begin() + static_cast<std::ptrdiff_t>(b)),
                  w.sample_rate_hz());
}

Waveform insert_segment(const Waveform& w, Ms at_ms, const Waveform& seg, Ms fade_ms) {
  if (seg.sample_rate_hz() != w.sample_rate_hz()) {
    throw Error(ErrorCode::RateMismatch, "insert_segment: segment rate " +
                                             std::to_string(seg.sample_rate_hz()) + " Hz vs " +
                                             std::to_string(w.sample_rate_hz()) + " Hz");
  }
  if (at_ms < 0 || at_ms > w.duration_ms()) {
    throw Error(ErrorCode::OutOfRange, "insert_segment: position " + std::to_string(at_ms) +
                                           " ms beyond " + std::to_string(w.duration_ms()) + " ms");
  }
  if (fade_ms < 0) throw Error(ErrorCode::InvalidParams, "insert_segment: negative fade");
  return insert_samples(w, w.to_index(at_ms), seg.samples(), w.to_samples(fade_ms));
}

Waveform insert_samples(const Waveform& w, std::size_t at, std::span<const std::int16_t> seg,
                        std::size_t fade_len) {
  std::vector<std::int16_t> piece(seg.begin(), seg.end());
  const auto fade = std::min(fade_len, piece.size() / 2);
  for (std::size_t i = 0; i < fade; ++i) {
    const double g = static_cast<double>(i) / static_cast<double>(fade);
    piece[i] = clamp_sample(piece[i] * g);
    piece[piece.size() - 1 - i] = clamp_sample(piece[piece.size() - 1 - i] * g);
  }
  const auto src = w.samples();
  std::vector<std::int16_t> out;
  out.reserve(src.size() + piece.size());
  out.insert(out.end(), src.begin(), src.begin() + static_cast<std::ptrdiff_t>(at));
  out.insert(out.end(), piece.begin(), piece.end());
  out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(at), src.end());
  return Waveform(std::move(out), w.sample_rate_hz());
}

EnergyTrack rms_energy(const Waveform& w, Ms frame_ms, Ms hop_ms) {
  if (hop_ms < 1 || frame_ms < hop_ms) {
    throw Error(ErrorCode::InvalidParams, "rms_energy: need frame_ms >= hop_ms >= 1");
  }
  const Ms duration = w.duration_ms();
  if (duration < frame_ms) {
    throw Error(ErrorCode::TooShort, "rms_energy: " + std::to_string(duration) +
                                         " ms is shorter than one " + std::to_string(frame_ms) +
                                         " ms frame");
  }
  EnergyTrack track{frame_ms, hop_ms, {}};
  const auto count = static_cast<std::size_t>((duration - frame_ms) / hop_ms + 1);
  track.values.reserve(count);
  const auto src = w.samples();
  const auto frame_len = w.to_samples(frame_ms);
  for (std::size_t i = 0; i < count; ++i) {
    const auto begin = std::min(w.to_samples(static_cast<Ms>(i) * hop_ms), src.size());
    const auto end = std::min(begin + frame_len, src.size());
    double sum = 0.0;
    for (std::size_t j = begin; j < end; ++j) {
      const double x = src[j] / 32768.0;
      sum += x * x;
    }
    track.values.push_back(end > begin ? std::sqrt(sum / static_cast<double>(end - begin)) : 0.0);
  }
  return track;
}

}  // namespace stutterfuzz
