#include "stutterfuzz/sut.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <regex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "stutterfuzz/error.hpp"
#include "stutterfuzz/text.hpp"

namespace stutterfuzz {

namespace {

using Clock = std::chrono::steady_clock;

struct SemaphoreGuard {
  explicit SemaphoreGuard(std::counting_semaphore<64>& s) : sem(s) { sem.acquire(); }
  ~SemaphoreGuard() { sem.release(); }
  SemaphoreGuard(const SemaphoreGuard&) = delete;
  SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;
  std::counting_semaphore<64>& sem;
};

struct Endpoint {
  std::string scheme_host_port;
  std::string path;
};

Endpoint parse_endpoint(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) {
    throw Error(ErrorCode::ConfigError, "endpoint '" + url + "' is not an http(s) URL");
  }
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

class HttpRecognizer final : public Recognizer {
 public:
  explicit HttpRecognizer(SutDescriptor d) : Recognizer(std::move(d)) {
    endpoint_ = parse_endpoint(descriptor().endpoint);
  }

 protected:
  std::string attempt(const TranscriptionRequest& request) const override {
    httplib::Client client(endpoint_.scheme_host_port);
    const auto timeout = std::chrono::milliseconds(descriptor().timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    const auto bytes = encode_wav(request.audio);
    const std::string body(bytes.begin(), bytes.end());
    const auto res = client.Post(endpoint_.path, body, "audio/wav");
    if (!res) throw std::runtime_error("request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw std::runtime_error("HTTP status " + std::to_string(res->status));
    const auto doc = nlohmann::json::parse(res->body);
    return doc.at("text").get<std::string>();
  }

 private:
  Endpoint endpoint_;
};

class TempWav {
 public:
  explicit TempWav(const Waveform& w) {
    std::string pattern = (std::filesystem::temp_directory_path() / "stutterfuzz-XXXXXX.wav").string();
    const int fd = ::mkstemps(pattern.data(), 4);
    if (fd < 0) throw std::runtime_error("cannot create temporary WAV");
    ::close(fd);
    path_ = pattern;
    save_wav(w, path_);
  }
  ~TempWav() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempWav(const TempWav&) = delete;
  TempWav& operator=(const TempWav&) = delete;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class SubprocessRecognizer final : public Recognizer {
 public:
  using Recognizer::Recognizer;

 protected:
  std::string attempt(const TranscriptionRequest& request) const override {
    const TempWav wav(request.audio);
    std::vector<std::string> args = descriptor().command;
    args.push_back(wav.path());
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);

    int pipe_fds[2];
    if (::pipe2(pipe_fds, O_CLOEXEC) != 0) throw std::runtime_error("pipe failed");
    const pid_t pid = ::fork();
    if (pid < 0) {
      ::close(pipe_fds[0]);
      ::close(pipe_fds[1]);
      throw std::runtime_error("fork failed");
    }
    if (pid == 0) {
      ::dup2(pipe_fds[1], STDOUT_FILENO);
      const int devnull = ::open("/dev/null", O_WRONLY);
      if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
      ::execvp(argv[0], argv.data());
      ::_exit(127);
    }
    ::close(pipe_fds[1]);

    std::string out;
    const auto deadline = Clock::now() + std::chrono::milliseconds(descriptor().timeout_ms);
    bool timed_out = false;
    char buf[4096];
    while (true) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
      if (left.count() <= 0) {
        timed_out = true;
        break;
      }
      pollfd pfd{pipe_fds[0], POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (ready == 0) {
        timed_out = true;
        break;
      }
      if (ready < 0) {
        if (errno == EINTR) continue;
        break;
      }
      const ssize_t n = ::read(pipe_fds[0], buf, sizeof(buf));
      if (n <= 0) break;
      out.append(buf, static_cast<std::size_t>(n));
    }
    ::close(pipe_fds[0]);
    if (timed_out) ::kill(pid, SIGKILL);
    int status = 0;
    ::waitpid(pid, &status, 0);
    if (timed_out) {
      throw std::runtime_error("timed out after " + std::to_string(descriptor().timeout_ms) + " ms");
    }
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      throw std::runtime_error("command exited with status " +
                               std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
    }
    return out;
  }
};

GroundTruthRegistry::Entry registry_entry(const SutDescriptor& d, const std::string& ref) {
  auto entry = d.registry ? d.registry->find(ref) : std::nullopt;
  if (!entry) throw std::runtime_error("no ground truth registered for '" + ref + "'");
  return *entry;
}

class MockOracle final : public Recognizer {
 public:
  using Recognizer::Recognizer;

 protected:
  std::string attempt(const TranscriptionRequest& request) const override {
    return registry_entry(descriptor(), request.benign_ref).transcript;
  }
};

class MockFragile final : public Recognizer {
 public:
  using Recognizer::Recognizer;

 protected:
  std::string attempt(const TranscriptionRequest& request) const override {
    const auto entry = registry_entry(descriptor(), request.benign_ref);
    const auto tokens = text::tokenize(entry.transcript);
    std::vector<Ms> durations = entry.word_durations_ms;
    if (durations.size() != tokens.size()) durations = estimate_durations(request.audio, tokens);
    return text::join(fragile_decode(request.audio, tokens, durations));
  }

 private:
  // Shares of the voiced time weighted by phone count (letters when OOV).
  std::vector<Ms> estimate_durations(const Waveform& w, const std::vector<std::string>& tokens) const {
    Ms voiced = 0;
    try {
      for (const auto& run : detect_voiced_runs(w)) voiced += run.length();
    } catch (const Error&) {
    }
    std::vector<double> weights;
    double total = 0;
    for (const auto& t : tokens) {
      const auto* prons = descriptor().dict ? descriptor().dict->find(t) : nullptr;
      const double wgt = prons != nullptr ? static_cast<double>(prons->front().phones.size())
                                          : static_cast<double>(t.size());
      weights.push_back(wgt);
      total += wgt;
    }
    std::vector<Ms> out;
    for (const auto wgt : weights) {
      out.push_back(std::max<Ms>(1, static_cast<Ms>(std::llround(static_cast<double>(voiced) * wgt / total))));
    }
    return out;
  }
};

}  // namespace

std::string_view to_string(SutKind kind) {
  switch (kind) {
    case SutKind::Http: return "http";
    case SutKind::Subprocess: return "subprocess";
    case SutKind::MockOracle: return "mock_oracle";
    case SutKind::MockFragile: return "mock_fragile";
  }
  return "unknown";
}

SutKind parse_sut_kind(std::string_view name) {
  for (const auto kind : {SutKind::Http, SutKind::Subprocess, SutKind::MockOracle, SutKind::MockFragile}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::ConfigError, "unknown SUT kind '" + std::string(name) + "'");
}

void GroundTruthRegistry::add(const std::string& benign_ref, std::string transcript,
                              std::vector<Ms> word_durations_ms) {
  std::unique_lock lock(mutex_);
  entries_[benign_ref] = {std::move(transcript), std::move(word_durations_ms)};
}

void GroundTruthRegistry::add(const std::string& benign_ref, const AlignedTranscript& a) {
  std::vector<Ms> durations;
  for (const auto& w : a.words) durations.push_back(w.end_ms - w.start_ms);
  add(benign_ref, a.transcript_text, std::move(durations));
}

std::optional<GroundTruthRegistry::Entry> GroundTruthRegistry::find(const std::string& benign_ref) const {
  std::shared_lock lock(mutex_);
  const auto it = entries_.find(benign_ref);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void validate(const SutDescriptor& d) {
  const std::string who = "SUT '" + d.name + "'";
  if (d.name.empty()) throw Error(ErrorCode::ConfigError, "SUT name must not be empty");
  if (d.timeout_ms <= 0) throw Error(ErrorCode::ConfigError, who + ": timeout_ms must be > 0");
  if (d.retries < 0) throw Error(ErrorCode::ConfigError, who + ": retries must be >= 0");
  if (d.max_in_flight < 1 || d.max_in_flight > 64) {
    throw Error(ErrorCode::ConfigError, who + ": max_in_flight must be in [1, 64]");
  }
  switch (d.kind) {
    case SutKind::Http: parse_endpoint(d.endpoint); break;
    case SutKind::Subprocess:
      if (d.command.empty()) throw Error(ErrorCode::ConfigError, who + ": command is empty");
      break;
    case SutKind::MockOracle:
    case SutKind::MockFragile:
      if (!d.registry) throw Error(ErrorCode::ConfigError, who + ": mock needs a ground-truth registry");
      break;
  }
}

Recognizer::Recognizer(SutDescriptor d)
    : descriptor_(std::move(d)), in_flight_(std::clamp(descriptor_.max_in_flight, 1, 64)) {}

TranscriptionResult Recognizer::transcribe(const TranscriptionRequest& request) const {
  TranscriptionResult result;
  result.sut_name = descriptor_.name;
  const auto start = Clock::now();
  const SemaphoreGuard guard(in_flight_);
  for (int attempt_no = 0; attempt_no <= descriptor_.retries; ++attempt_no) {
    try {
      result.text = text::normalize(attempt(request));
      result.status = TranscriptionStatus::Ok;
      result.error_detail.clear();
      break;
    } catch (const std::exception& e) {
      result.text.clear();
      result.status = TranscriptionStatus::Error;
      result.error_detail = e.what();
    }
  }
  result.latency_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return result;
}

std::unique_ptr<Recognizer> make_recognizer(const SutDescriptor& d) {
  validate(d);
  switch (d.kind) {
    case SutKind::Http: return std::make_unique<HttpRecognizer>(d);
    case SutKind::Subprocess: return std::make_unique<SubprocessRecognizer>(d);
    case SutKind::MockOracle: return std::make_unique<MockOracle>(d);
    case SutKind::MockFragile: return std::make_unique<MockFragile>(d);
  }
  throw Error(ErrorCode::ConfigError, "unknown SUT kind");
}

TranscriptionResult transcribe(const Recognizer& sut, const Waveform& w, const std::string& benign_ref) {
  return sut.transcribe({w, benign_ref});
}

SutDescriptor mock_oracle(std::string name, std::shared_ptr<const GroundTruthRegistry> registry) {
  SutDescriptor d;
  d.name = std::move(name);
  d.kind = SutKind::MockOracle;
  d.registry = std::move(registry);
  return d;
}

SutDescriptor mock_fragile(std::string name, std::shared_ptr<const GroundTruthRegistry> registry,
                           std::shared_ptr<const PronunciationDict> dict) {
  SutDescriptor d;
  d.name = std::move(name);
  d.kind = SutKind::MockFragile;
  d.registry = std::move(registry);
  d.dict = std::move(dict);
  return d;
}

std::vector<std::string> fragile_decode(const Waveform& w, const std::vector<std::string>& tokens,
                                        const std::vector<Ms>& reference_durations_ms) {
  std::vector<std::string> out;
  if (tokens.empty() || reference_durations_ms.size() != tokens.size()) return out;
  std::vector<Interval> bursts;
  try {
    bursts = detect_voiced_runs(w);
  } catch (const Error&) {
    return out;  // silence or too short: nothing recognized
  }
  std::size_t next = 0;
  double consumed = 0.0;
  for (const auto& burst : bursts) {
    if (next >= tokens.size()) {
      out.push_back(tokens.back());  // trailing extra burst repeats the nearest token
      continue;
    }
    const double ratio = static_cast<double>(burst.length()) /
                         static_cast<double>(std::max<Ms>(1, reference_durations_ms[next]));
    // Bursts far longer than expected read as the word said several times.
    const auto reps = ratio >= 1.75 ? static_cast<std::size_t>(std::llround(ratio)) : std::size_t{1};
    out.insert(out.end(), reps, tokens[next]);
    consumed += ratio;
    if (consumed >= 0.75) {
      ++next;
      consumed = 0.0;
    }
  }
  return out;
}

}  // namespace stutterfuzz
