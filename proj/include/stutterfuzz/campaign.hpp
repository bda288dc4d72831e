#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stutterfuzz/analysis.hpp"
#include "stutterfuzz/mutation.hpp"
#include "stutterfuzz/selection.hpp"
#include "stutterfuzz/sut.hpp"

namespace stutterfuzz {

struct BenignSeed {
  std::string ref;  // defaults to the audio file stem
  std::filesystem::path audio;
  std::string transcript;
};

struct CampaignConfig {
  int budget_per_seed = 50;
  double theta = 0.8;
  /// Indexed like kAllMutators.
  std::array<double, 5> mutator_weights{1, 1, 1, 1, 1};
  std::uint64_t rng_seed = 0;
  std::vector<SutDescriptor> suts;
  std::filesystem::path dictionary_path;
  std::string embedding_provider;  // empty: trigram default; otherwise a service URL
  std::filesystem::path output_dir;
  std::size_t max_chain_len = kDefaultMaxChainLength;
  std::size_t pool_capacity = SeedPool::kDefaultCapacity;
  std::size_t workers = 0;  // 0: one per benign seed, capped at 8
  bool export_cases = false;
  std::vector<BenignSeed> benign;
};

/// Relative paths resolve against base_dir. Applies every default.
CampaignConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
CampaignConfig load_config(const std::filesystem::path& path);
/// Throws ConfigError.
void validate(const CampaignConfig& cfg);
nlohmann::json config_to_json(const CampaignConfig& cfg);

enum class TriageLabel {
  Unlabeled,
  WordInjection,
  IncorrectWord,
  WordRepetition,
  WordOmission,
  SyllableRepetition,
  FalsePositive,
};

std::string_view to_string(TriageLabel label);
/// Throws InvalidParams.
TriageLabel parse_triage_label(std::string_view name);

struct SuspiciousFailure {
  std::string test_case_id;
  std::string benign_ref;
  std::string sut_name;
  std::string recognized_text;
  std::string ground_truth_text;
  double similarity = 0.0;
  MutationChain chain;
  TriageLabel triage_label = TriageLabel::Unlabeled;
};

/// "word-repetition(w0 x3) + block(w2.s0 60ms)"; "benign" for an empty chain.
std::string summarize(const MutationChain& chain);

/// One failure per result whose similarity to the benign ground truth is
/// below theta; error results count as similarity 0.
std::vector<SuspiciousFailure> detect_failure(const TestCase& tc, const std::string& ground_truth,
                                              const std::vector<TranscriptionResult>& results,
                                              double theta,
                                              const EmbeddingProvider& embedder = default_embedder());

struct SeedStats {
  std::string benign_ref;
  std::string audio;
  std::string transcript;
  std::size_t cases_generated = 0;  // includes skipped iterations
  std::size_t skipped_iterations = 0;
  std::size_t frontier_size = 0;
  std::size_t suspicious_count = 0;
  std::string error;  // non-empty when the seed could not be processed
  std::optional<SeedPool> pool;
};

struct SutTiming {
  std::size_t calls = 0;
  double total_ms = 0.0;
  double max_ms = 0.0;
};

struct CampaignReport {
  nlohmann::json config;
  std::vector<SeedStats> per_seed;
  std::vector<SuspiciousFailure> failures;
  std::vector<std::string> sut_names;
  std::map<std::string, AlignmentCounts> metrics;  // per SUT, pooled over cases vs expected text
  double wall_clock_ms = 0.0;
  std::map<std::string, SutTiming> latency;

  std::size_t total_cases() const;
  /// Deterministic report document (no timing).
  nlohmann::json to_json() const;
  /// Wall clock and latency summary.
  nlohmann::json timing_json() const;
};

/// Runs the generate-execute-select loop over every benign seed. When
/// cfg.output_dir is set, writes report.json, failures.csv, timing.json,
/// audio/<id>.wav and chains/<id>.json for suspicious cases (and every case
/// under cases/ with corpus manifests when export_cases is on).
CampaignReport run_campaign(const CampaignConfig& cfg);

void write_report(const CampaignReport& report, const std::filesystem::path& dir);
std::string failures_csv(const nlohmann::json& report);

/// Sets the triage label of every failure of `test_case_id` (optionally only
/// for one SUT) in report.json and rewrites failures.csv next to it.
/// Returns the number of failures relabelled.
std::size_t label_failures(const std::filesystem::path& report_path, const std::string& test_case_id,
                           TriageLabel label, const std::string& sut = {});

struct CorpusItem {
  Waveform audio;
  std::string reference;
  std::string benign_ref;
};

struct CorpusManifestItem {
  std::filesystem::path audio;
  std::string reference;
  std::string benign_ref;
  std::filesystem::path benign_audio;
};

std::vector<CorpusManifestItem> load_corpus_manifest(const std::filesystem::path& path);
void write_corpus_manifest(const std::filesystem::path& path, const std::vector<CorpusManifestItem>& items);

struct SutScore {
  std::string sut_name;
  AlignmentCounts counts;
  double wer = 0.0;
  double mer = 0.0;
  double wil = 0.0;
};

/// Pooled (micro-averaged) metrics of each SUT over the corpus. Throws EmptyCorpus.
std::vector<SutScore> score_benchmark(const std::vector<std::shared_ptr<const Recognizer>>& suts,
                                      const std::vector<CorpusItem>& corpus);

std::string format_score_table(const std::vector<SutScore>& scores);
std::string score_csv(const std::vector<SutScore>& scores);

/// Builds recognizers for a config, wiring mocks to `registry` and the
/// config's dictionary.
std::vector<std::shared_ptr<const Recognizer>> make_recognizers(
    const CampaignConfig& cfg, std::shared_ptr<GroundTruthRegistry> registry,
    std::shared_ptr<const PronunciationDict> dict);

}  // namespace stutterfuzz
