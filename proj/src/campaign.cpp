#include "stutterfuzz/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "stutterfuzz/error.hpp"
#include "stutterfuzz/serialization.hpp"
#include "stutterfuzz/text.hpp"

namespace stutterfuzz {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kPlanAttempts = 10;

[[noreturn]] void config_error(const std::string& why) { throw Error(ErrorCode::ConfigError, why); }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

SutDescriptor parse_sut(const json& j) {
  SutDescriptor d;
  d.name = j.at("name").get<std::string>();
  d.kind = parse_sut_kind(j.at("kind").get<std::string>());
  d.endpoint = j.value("endpoint", std::string{});
  if (j.contains("command")) {
    const auto& c = j.at("command");
    if (c.is_string()) {
      d.command = {c.get<std::string>()};
    } else {
      d.command = c.get<std::vector<std::string>>();
    }
  }
  d.timeout_ms = j.value("timeout_ms", 30000);
  d.retries = j.value("retries", 2);
  d.max_in_flight = j.value("max_in_flight", 4);
  return d;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed(double v, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

json counts_json(const AlignmentCounts& c) {
  json j{{"hits", c.hits},         {"substitutions", c.substitutions}, {"deletions", c.deletions},
         {"insertions", c.insertions}, {"ref_len", c.ref_len},        {"hyp_len", c.hyp_len}};
  if (c.ref_len > 0) {
    j["wer"] = wer(c);
    j["mer"] = mer(c);
    j["wil"] = wil(c);
  }
  return j;
}

json failure_json(const SuspiciousFailure& f) {
  return {{"test_case_id", f.test_case_id},
          {"benign_ref", f.benign_ref},
          {"sut", f.sut_name},
          {"similarity", f.similarity},
          {"truth", f.ground_truth_text},
          {"hypothesis", f.recognized_text},
          {"label", to_string(f.triage_label)},
          {"chain_summary", summarize(f.chain)},
          {"chain", chain_to_json(f.chain)}};
}

struct SeedOutcome {
  SeedStats stats;
  std::vector<SuspiciousFailure> failures;
  std::map<std::string, AlignmentCounts> counts;
  std::map<std::string, SutTiming> latency;
  std::vector<CorpusManifestItem> mutated_items;
  std::optional<CorpusManifestItem> benign_item;
};

class CampaignRunner {
 public:
  explicit CampaignRunner(const CampaignConfig& cfg) : cfg_(cfg) {
    validate(cfg_);
    auto dict = std::make_shared<PronunciationDict>(load_dictionary(cfg_.dictionary_path.string()));
    dict_ = dict;
    registry_ = std::make_shared<GroundTruthRegistry>();
    suts_ = make_recognizers(cfg_, registry_, dict_);
    embedder_ = make_embedder(cfg_.embedding_provider);
    kind_dist_ = std::discrete_distribution<std::size_t>(cfg_.mutator_weights.begin(),
                                                         cfg_.mutator_weights.end());
    if (!cfg_.output_dir.empty()) {
      std::filesystem::create_directories(cfg_.output_dir / "audio");
      std::filesystem::create_directories(cfg_.output_dir / "chains");
      if (cfg_.export_cases) std::filesystem::create_directories(cfg_.output_dir / "cases");
    }
  }

  CampaignReport run() {
    const auto started = Clock::now();
    std::vector<SeedOutcome> outcomes(cfg_.benign.size());
    std::size_t workers = cfg_.workers == 0 ? std::min<std::size_t>(cfg_.benign.size(), 8) : cfg_.workers;
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(cfg_.benign.size(), 1));
    std::atomic<std::size_t> next{0};
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < outcomes.size(); i = next++) outcomes[i] = run_seed(i);
        });
      }
    }

    CampaignReport report;
    report.config = config_to_json(cfg_);
    for (const auto& s : suts_) report.sut_names.push_back(s->descriptor().name);
    std::vector<CorpusManifestItem> mutated;
    std::vector<CorpusManifestItem> benign;
    for (auto& o : outcomes) {
      report.per_seed.push_back(std::move(o.stats));
      report.failures.insert(report.failures.end(), o.failures.begin(), o.failures.end());
      for (const auto& [name, c] : o.counts) report.metrics[name] += c;
      for (const auto& [name, t] : o.latency) {
        auto& total = report.latency[name];
        total.calls += t.calls;
        total.total_ms += t.total_ms;
        total.max_ms = std::max(total.max_ms, t.max_ms);
      }
      mutated.insert(mutated.end(), o.mutated_items.begin(), o.mutated_items.end());
      if (o.benign_item) benign.push_back(*o.benign_item);
    }
    report.wall_clock_ms = std::chrono::duration<double, std::milli>(Clock::now() - started).count();
    if (!cfg_.output_dir.empty()) {
      write_report(report, cfg_.output_dir);
      if (cfg_.export_cases) {
        write_corpus_manifest(cfg_.output_dir / "corpus_mutated.json", mutated);
        write_corpus_manifest(cfg_.output_dir / "corpus_benign.json", benign);
      }
    }
    return report;
  }

 private:
  std::vector<TranscriptionResult> execute(const Waveform& w, const std::string& ref,
                                           std::map<std::string, SutTiming>& latency) const {
    std::vector<std::future<TranscriptionResult>> pending;
    pending.reserve(suts_.size());
    for (const auto& sut : suts_) {
      pending.push_back(std::async(std::launch::async, [&sut, &w, &ref] { return transcribe(*sut, w, ref); }));
    }
    std::vector<TranscriptionResult> results;
    for (auto& f : pending) {
      results.push_back(f.get());
      auto& t = latency[results.back().sut_name];
      ++t.calls;
      t.total_ms += results.back().latency_ms;
      t.max_ms = std::max(t.max_ms, results.back().latency_ms);
    }
    return results;
  }

  SeedOutcome run_seed(std::size_t index) const {
    const BenignSeed& seed = cfg_.benign[index];
    SeedOutcome out;
    out.stats.benign_ref = seed.ref;
    out.stats.audio = seed.audio.string();
    out.stats.transcript = seed.transcript;

    Waveform benign;
    AlignedTranscript aligned;
    try {
      benign = load_wav(seed.audio);
      aligned = align(benign, seed.transcript, *dict_);
      aligned.audio_ref = seed.ref;
    } catch (const Error& e) {
      out.stats.error = std::string(to_string(e.code())) + ": " + e.what();
      return out;
    }
    registry_->add(seed.ref, aligned);
    const std::string truth = text::normalize(seed.transcript);
    if (cfg_.export_cases) out.benign_item = CorpusManifestItem{seed.audio, truth, seed.ref, seed.audio};

    std::seed_seq seq{static_cast<std::uint32_t>(cfg_.rng_seed),
                      static_cast<std::uint32_t>(cfg_.rng_seed >> 32),
                      static_cast<std::uint32_t>(index)};
    Rng rng(seq);
    auto kinds = kind_dist_;

    const auto benign_results = execute(benign, seed.ref, out.latency);
    SeedPool pool(seed.ref, m1(benign_results, *embedder_), cfg_.pool_capacity);

    for (int iteration = 0; iteration < cfg_.budget_per_seed; ++iteration) {
      ++out.stats.cases_generated;
      std::optional<MutationChain> chain;
      for (int attempt = 0; attempt < kPlanAttempts && !chain; ++attempt) {
        const ScoredSeed& parent = select_seed(pool, rng);
        const MutatorKind kind = kAllMutators[kinds(rng)];
        if (parent.chain.records.size() >= cfg_.max_chain_len) continue;
        try {
          auto record = plan_mutation(aligned, kind, rng);
          chain = parent.chain;
          chain->records.push_back(std::move(record));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NotApplicable) throw;
        }
      }
      if (!chain) {
        ++out.stats.skipped_iterations;
        continue;
      }
      const TestCase tc = make_test_case(benign, aligned, std::move(*chain));
      const auto results = execute(tc.rendered, seed.ref, out.latency);
      const double f1 = m1(results, *embedder_);
      const double quality = m2(tc.expected_text, truth, *embedder_);
      pool.update({tc.id, tc.chain, f1, -quality});

      auto failures = detect_failure(tc, truth, results, cfg_.theta, *embedder_);
      for (const auto& r : results) out.counts[r.sut_name] += align_words(tc.expected_text, r.text);
      if (!failures.empty() && !cfg_.output_dir.empty()) {
        save_wav(tc.rendered, cfg_.output_dir / "audio" / (tc.id + ".wav"));
        auto doc = chain_to_json(tc.chain);
        doc["alignment"] = alignment_to_json(aligned);
        write_json_file(cfg_.output_dir / "chains" / (tc.id + ".json"), doc);
      }
      if (cfg_.export_cases) {
        const auto path = cfg_.output_dir / "cases" / (tc.id + ".wav");
        save_wav(tc.rendered, path);
        out.mutated_items.push_back({path, truth, seed.ref, seed.audio});
      }
      out.stats.suspicious_count += failures.size();
      out.failures.insert(out.failures.end(), std::make_move_iterator(failures.begin()),
                          std::make_move_iterator(failures.end()));
    }
    out.stats.frontier_size = pool.members().size();
    out.stats.pool = std::move(pool);
    return out;
  }

  const CampaignConfig& cfg_;
  std::shared_ptr<const PronunciationDict> dict_;
  std::shared_ptr<GroundTruthRegistry> registry_;
  std::vector<std::shared_ptr<const Recognizer>> suts_;
  std::shared_ptr<const EmbeddingProvider> embedder_;
  std::discrete_distribution<std::size_t> kind_dist_;
};

}  // namespace

CampaignConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  CampaignConfig cfg;
  try {
    cfg.budget_per_seed = j.value("budget_per_seed", cfg.budget_per_seed);
    cfg.theta = j.value("theta", cfg.theta);
    if (j.contains("mutator_weights")) {
      const auto& w = j.at("mutator_weights");
      if (w.is_array()) {
        if (w.size() != 5) config_error("mutator_weights needs 5 values");
        for (std::size_t i = 0; i < 5; ++i) cfg.mutator_weights[i] = w[i].get<double>();
      } else {
        cfg.mutator_weights.fill(0.0);
        for (const auto& [name, value] : w.items()) {
          const auto kind = parse_mutator_kind(name);
          cfg.mutator_weights[static_cast<std::size_t>(kind)] = value.get<double>();
        }
      }
    }
    cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
    if (j.contains("suts")) {
      for (const auto& s : j.at("suts")) cfg.suts.push_back(parse_sut(s));
    }
    cfg.dictionary_path = resolve(base_dir, j.value("dictionary_path", std::string{}));
    cfg.embedding_provider = j.value("embedding_provider", std::string{});
    cfg.output_dir = resolve(base_dir, j.value("output_dir", std::string{}));
    cfg.max_chain_len = j.value("max_chain_len", cfg.max_chain_len);
    cfg.pool_capacity = j.value("pool_capacity", cfg.pool_capacity);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.export_cases = j.value("export_cases", cfg.export_cases);
    if (j.contains("benign")) {
      for (const auto& b : j.at("benign")) {
        BenignSeed seed;
        seed.audio = resolve(base_dir, b.at("audio").get<std::string>());
        seed.transcript = b.at("transcript").get<std::string>();
        seed.ref = b.value("ref", seed.audio.stem().string());
        cfg.benign.push_back(std::move(seed));
      }
    }
  } catch (const json::exception& e) {
    config_error(std::string("invalid config: ") + e.what());
  } catch (const Error& e) {
    config_error(e.what());
  }
  return cfg;
}

CampaignConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_json_file(path), path.parent_path());
}

void validate(const CampaignConfig& cfg) {
  if (cfg.budget_per_seed < 1) config_error("budget_per_seed must be >= 1");
  if (!(cfg.theta > 0.0 && cfg.theta <= 1.0)) config_error("theta must be in (0, 1]");
  if (cfg.suts.size() < 2) config_error("at least 2 SUTs are required (M1 compares pairs of results)");
  std::set<std::string> names;
  for (const auto& s : cfg.suts) {
    if (!names.insert(s.name).second) config_error("duplicate SUT name '" + s.name + "'");
  }
  double total = 0.0;
  for (const double w : cfg.mutator_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) config_error("mutator weights must be non-negative");
    total += w;
  }
  if (total <= 0.0) config_error("mutator weights must not all be zero");
  if (cfg.max_chain_len < 1) config_error("max_chain_len must be >= 1");
  if (cfg.pool_capacity < 1) config_error("pool_capacity must be >= 1");
  if (cfg.dictionary_path.empty()) config_error("dictionary_path is required");
  if (cfg.export_cases && cfg.output_dir.empty()) config_error("export_cases needs output_dir");
  std::set<std::string> refs;
  for (const auto& b : cfg.benign) {
    if (!refs.insert(b.ref).second) config_error("duplicate benign ref '" + b.ref + "'");
  }
}

json config_to_json(const CampaignConfig& cfg) {
  json suts = json::array();
  for (const auto& s : cfg.suts) {
    json d{{"name", s.name}, {"kind", to_string(s.kind)}, {"timeout_ms", s.timeout_ms}, {"retries", s.retries}};
    if (!s.endpoint.empty()) d["endpoint"] = s.endpoint;
    if (!s.command.empty()) d["command"] = s.command;
    suts.push_back(std::move(d));
  }
  json weights = json::object();
  for (std::size_t i = 0; i < kAllMutators.size(); ++i) {
    weights[std::string(to_string(kAllMutators[i]))] = cfg.mutator_weights[i];
  }
  json benign = json::array();
  for (const auto& b : cfg.benign) {
    benign.push_back({{"ref", b.ref}, {"audio", b.audio.string()}, {"transcript", b.transcript}});
  }
  return {{"budget_per_seed", cfg.budget_per_seed},
          {"theta", cfg.theta},
          {"mutator_weights", std::move(weights)},
          {"rng_seed", cfg.rng_seed},
          {"suts", std::move(suts)},
          {"dictionary_path", cfg.dictionary_path.string()},
          {"embedding_provider", cfg.embedding_provider},
          {"output_dir", cfg.output_dir.string()},
          {"max_chain_len", cfg.max_chain_len},
          {"pool_capacity", cfg.pool_capacity},
          {"export_cases", cfg.export_cases},
          {"benign", std::move(benign)}};
}

std::string_view to_string(TriageLabel label) {
  switch (label) {
    case TriageLabel::Unlabeled: return "unlabeled";
    case TriageLabel::WordInjection: return "word_injection";
    case TriageLabel::IncorrectWord: return "incorrect_word";
    case TriageLabel::WordRepetition: return "word_repetition";
    case TriageLabel::WordOmission: return "word_omission";
    case TriageLabel::SyllableRepetition: return "syllable_repetition";
    case TriageLabel::FalsePositive: return "false_positive";
  }
  return "unlabeled";
}

TriageLabel parse_triage_label(std::string_view name) {
  for (const auto l : {TriageLabel::Unlabeled, TriageLabel::WordInjection, TriageLabel::IncorrectWord,
                       TriageLabel::WordRepetition, TriageLabel::WordOmission,
                       TriageLabel::SyllableRepetition, TriageLabel::FalsePositive}) {
    if (to_string(l) == name) return l;
  }
  throw Error(ErrorCode::InvalidParams, "unknown triage label '" + std::string(name) + "'");
}

std::string summarize(const MutationChain& chain) {
  if (chain.records.empty()) return "benign";
  std::ostringstream out;
  for (std::size_t i = 0; i < chain.records.size(); ++i) {
    const auto& r = chain.records[i];
    if (i > 0) out << " + ";
    out << to_string(r.kind) << "(w" << r.anchor.word;
    if (r.anchor.syllable) out << ".s" << *r.anchor.syllable;
    switch (r.kind) {
      case MutatorKind::Block: out << ' ' << r.pause_ms << "ms"; break;
      case MutatorKind::Prolongation: out << " x" << r.factor; break;
      case MutatorKind::SoundRepetition:
      case MutatorKind::WordRepetition: out << " x" << r.copies; break;
      case MutatorKind::Interjection:
        out << " ->";
        for (const auto s : r.slots) out << ' ' << s;
        break;
    }
    out << ')';
  }
  return out.str();
}

std::vector<SuspiciousFailure> detect_failure(const TestCase& tc, const std::string& ground_truth,
                                              const std::vector<TranscriptionResult>& results,
                                              double theta, const EmbeddingProvider& embedder) {
  std::vector<SuspiciousFailure> out;
  const auto truth = embedder.embed(ground_truth);
  for (const auto& r : results) {
    const double similarity = r.ok() ? cosine(embedder.embed(r.text), truth) : 0.0;
    if (r.ok() && similarity >= theta) continue;
    SuspiciousFailure f;
    f.test_case_id = tc.id;
    f.benign_ref = tc.chain.benign_ref;
    f.sut_name = r.sut_name;
    f.recognized_text = r.text;
    f.ground_truth_text = text::normalize(ground_truth);
    f.similarity = similarity;
    f.chain = tc.chain;
    out.push_back(std::move(f));
  }
  return out;
}

std::size_t CampaignReport::total_cases() const {
  std::size_t n = 0;
  for (const auto& s : per_seed) n += s.cases_generated;
  return n;
}

json CampaignReport::to_json() const {
  json seeds = json::array();
  for (const auto& s : per_seed) {
    json j{{"benign_ref", s.benign_ref},
           {"audio", s.audio},
           {"transcript", s.transcript},
           {"cases_generated", s.cases_generated},
           {"skipped_iterations", s.skipped_iterations},
           {"frontier_size", s.frontier_size},
           {"suspicious_count", s.suspicious_count}};
    if (!s.error.empty()) j["error"] = s.error;
    if (s.pool) j["pool"] = s.pool->to_json();
    seeds.push_back(std::move(j));
  }
  json failures_doc = json::array();
  for (const auto& f : failures) failures_doc.push_back(failure_json(f));
  json metrics_doc = json::object();
  for (const auto& [name, c] : metrics) metrics_doc[name] = counts_json(c);
  return {{"schema_version", kSchemaVersion},
          {"config", config},
          {"per_seed", std::move(seeds)},
          {"failures", std::move(failures_doc)},
          {"metrics", std::move(metrics_doc)},
          {"totals", {{"cases_generated", total_cases()}, {"suspicious", failures.size()}}}};
}

json CampaignReport::timing_json() const {
  json suts_doc = json::object();
  for (const auto& [name, t] : latency) {
    suts_doc[name] = {{"calls", t.calls},
                      {"mean_ms", t.calls > 0 ? t.total_ms / static_cast<double>(t.calls) : 0.0},
                      {"max_ms", t.max_ms}};
  }
  return {{"wall_clock_ms", wall_clock_ms}, {"latency", std::move(suts_doc)}};
}

std::string failures_csv(const json& report) {
  std::ostringstream out;
  out << "test_case_id,sut,similarity,truth,hypothesis,label\n";
  for (const auto& f : report.at("failures")) {
    out << csv_field(f.at("test_case_id").get<std::string>()) << ','
        << csv_field(f.at("sut").get<std::string>()) << ',' << fixed(f.at("similarity").get<double>(), 6)
        << ',' << csv_field(f.at("truth").get<std::string>()) << ','
        << csv_field(f.at("hypothesis").get<std::string>()) << ','
        << csv_field(f.at("label").get<std::string>()) << '\n';
  }
  return out.str();
}

void write_report(const CampaignReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto doc = report.to_json();
  write_json_file(dir / "report.json", doc);
  write_json_file(dir / "timing.json", report.timing_json());
  std::ofstream csv(dir / "failures.csv", std::ios::trunc);
  if (!csv) throw Error(ErrorCode::IoFailure, "cannot write " + (dir / "failures.csv").string());
  csv << failures_csv(doc);
}

std::size_t label_failures(const std::filesystem::path& report_path, const std::string& test_case_id,
                           TriageLabel label, const std::string& sut) {
  json doc = read_json_file(report_path);
  std::size_t changed = 0;
  try {
    for (auto& f : doc.at("failures")) {
      if (f.at("test_case_id") != test_case_id) continue;
      if (!sut.empty() && f.at("sut") != sut) continue;
      f["label"] = to_string(label);
      ++changed;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed report: ") + e.what());
  }
  if (changed == 0) {
    throw Error(ErrorCode::InvalidParams, "no failure with test_case_id '" + test_case_id + "'" +
                                              (sut.empty() ? "" : " for SUT '" + sut + "'"));
  }
  write_json_file(report_path, doc);
  const auto csv_path = report_path.parent_path() / "failures.csv";
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw Error(ErrorCode::IoFailure, "cannot write " + csv_path.string());
  csv << failures_csv(doc);
  return changed;
}

std::vector<CorpusManifestItem> load_corpus_manifest(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  const auto base = path.parent_path();
  std::vector<CorpusManifestItem> items;
  try {
    for (const auto& j : doc.at("items")) {
      CorpusManifestItem item;
      item.audio = resolve(base, j.at("audio").get<std::string>());
      item.reference = j.at("reference").get<std::string>();
      item.benign_ref = j.value("benign_ref", item.audio.stem().string());
      item.benign_audio = resolve(base, j.value("benign_audio", std::string{}));
      items.push_back(std::move(item));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return items;
}

void write_corpus_manifest(const std::filesystem::path& path, const std::vector<CorpusManifestItem>& items) {
  const auto base = path.parent_path();
  auto rel = [&](const std::filesystem::path& p) {
    return p.empty() ? std::string{} : std::filesystem::relative(p, base).string();
  };
  json arr = json::array();
  for (const auto& i : items) {
    json j{{"audio", rel(i.audio)}, {"reference", i.reference}, {"benign_ref", i.benign_ref}};
    if (!i.benign_audio.empty()) j["benign_audio"] = rel(i.benign_audio);
    arr.push_back(std::move(j));
  }
  write_json_file(path, {{"items", std::move(arr)}});
}

std::vector<SutScore> score_benchmark(const std::vector<std::shared_ptr<const Recognizer>>& suts,
                                      const std::vector<CorpusItem>& corpus) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "benchmark corpus is empty");
  std::vector<SutScore> scores;
  for (const auto& sut : suts) {
    SutScore s;
    s.sut_name = sut->descriptor().name;
    for (const auto& item : corpus) {
      const auto result = transcribe(*sut, item.audio, item.benign_ref);
      s.counts += align_words(item.reference, result.ok() ? result.text : std::string{});
    }
    s.wer = wer(s.counts);
    s.mer = mer(s.counts);
    s.wil = wil(s.counts);
    scores.push_back(std::move(s));
  }
  return scores;
}

std::string format_score_table(const std::vector<SutScore>& scores) {
  std::size_t width = 6;
  for (const auto& s : scores) width = std::max(width, s.sut_name.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "System" << std::right << std::setw(10) << "WER"
      << std::setw(10) << "MER" << std::setw(10) << "WIL" << '\n';
  for (const auto& s : scores) {
    out << std::left << std::setw(static_cast<int>(width)) << s.sut_name << std::right << std::setw(10)
        << (fixed(100.0 * s.wer, 2) + "%") << std::setw(10) << (fixed(100.0 * s.mer, 2) + "%")
        << std::setw(10) << (fixed(100.0 * s.wil, 2) + "%") << '\n';
  }
  return out.str();
}

std::string score_csv(const std::vector<SutScore>& scores) {
  std::ostringstream out;
  out << "sut,wer,mer,wil,hits,substitutions,deletions,insertions,ref_len,hyp_len\n";
  for (const auto& s : scores) {
    out << csv_field(s.sut_name) << ',' << fixed(s.wer, 6) << ',' << fixed(s.mer, 6) << ','
        << fixed(s.wil, 6) << ',' << s.counts.hits << ',' << s.counts.substitutions << ','
        << s.counts.deletions << ',' << s.counts.insertions << ',' << s.counts.ref_len << ','
        << s.counts.hyp_len << '\n';
  }
  return out.str();
}

std::vector<std::shared_ptr<const Recognizer>> make_recognizers(
    const CampaignConfig& cfg, std::shared_ptr<GroundTruthRegistry> registry,
    std::shared_ptr<const PronunciationDict> dict) {
  std::vector<std::shared_ptr<const Recognizer>> out;
  for (auto d : cfg.suts) {
    if (d.kind == SutKind::MockOracle || d.kind == SutKind::MockFragile) {
      d.registry = registry;
      d.dict = dict;
    }
    out.push_back(make_recognizer(d));
  }
  return out;
}

CampaignReport run_campaign(const CampaignConfig& cfg) { return CampaignRunner(cfg).run(); }

}  // namespace stutterfuzz
