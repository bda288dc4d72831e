#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "stutterfuzz/campaign.hpp"
#include "stutterfuzz/error.hpp"
#include "stutterfuzz/serialization.hpp"
#include "stutterfuzz/text.hpp"

using namespace stutterfuzz;
using sftest::SutSpec;
using sftest::TempDir;

namespace {

const std::vector<SutSpec> kOracles{{"oracle_a", "mock_oracle"}, {"oracle_b", "mock_oracle"}};
const std::vector<SutSpec> kMixed{{"oracle", "mock_oracle"}, {"fragile", "mock_fragile"}};

std::optional<ErrorCode> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TestCase dummy_case() {
  TestCase tc;
  tc.chain.benign_ref = "sons";
  tc.id = chain_id(tc.chain);
  tc.expected_text = "together they had five sons";
  return tc;
}

TranscriptionResult ok(std::string sut, std::string text) {
  TranscriptionResult r;
  r.sut_name = std::move(sut);
  r.text = std::move(text);
  return r;
}

}  // namespace

TEST(Config, DefaultsAndParsing) {
  const auto cfg = parse_config(nlohmann::json::parse(R"({
    "suts": [{"name": "a", "kind": "mock_oracle"},
             {"name": "b", "kind": "subprocess", "command": ["/bin/echo", "x"], "timeout_ms": 500}],
    "dictionary_path": "dict.txt",
    "mutator_weights": {"block": 2, "word-repetition": 1},
    "benign": [{"audio": "audio/clip1.wav", "transcript": "hello"}]
  })"),
                                "/base");
  EXPECT_EQ(cfg.budget_per_seed, 50);
  EXPECT_EQ(cfg.theta, 0.8);
  EXPECT_EQ(cfg.max_chain_len, 8u);
  EXPECT_EQ(cfg.dictionary_path, std::filesystem::path("/base/dict.txt"));
  EXPECT_EQ(cfg.benign.at(0).audio, std::filesystem::path("/base/audio/clip1.wav"));
  EXPECT_EQ(cfg.benign.at(0).ref, "clip1");
  EXPECT_EQ(cfg.suts.at(1).kind, SutKind::Subprocess);
  EXPECT_EQ(cfg.suts.at(1).command, (std::vector<std::string>{"/bin/echo", "x"}));
  EXPECT_EQ(cfg.suts.at(1).timeout_ms, 500);
  EXPECT_EQ(cfg.mutator_weights[static_cast<std::size_t>(MutatorKind::Block)], 2.0);
  EXPECT_EQ(cfg.mutator_weights[static_cast<std::size_t>(MutatorKind::Prolongation)], 0.0);
  EXPECT_NO_THROW(validate(cfg));

  const auto echo = parse_config(config_to_json(cfg));
  EXPECT_EQ(config_to_json(echo), config_to_json(cfg));
}

TEST(Config, ValidationRejects) {
  TempDir dir;
  const auto good = sftest::campaign_config(dir.path(), kOracles, 5);
  EXPECT_NO_THROW(validate(parse_config(good)));

  auto with = [&](const std::function<void(nlohmann::json&)>& edit) {
    auto j = good;
    edit(j);
    return code_of([&] { validate(parse_config(j)); });
  };
  EXPECT_EQ(with([](auto& j) { j["suts"].erase(1); }), ErrorCode::ConfigError);
  EXPECT_EQ(with([](auto& j) { j["budget_per_seed"] = 0; }), ErrorCode::ConfigError);
  EXPECT_EQ(with([](auto& j) { j["theta"] = 0.0; }), ErrorCode::ConfigError);
  EXPECT_EQ(with([](auto& j) { j["theta"] = 1.5; }), ErrorCode::ConfigError);
  EXPECT_EQ(with([](auto& j) { j["mutator_weights"] = {0, 0, 0, 0, 0}; }), ErrorCode::ConfigError);
  EXPECT_EQ(with([](auto& j) { j["mutator_weights"] = {1, -1, 0, 0, 0}; }), ErrorCode::ConfigError);
  EXPECT_EQ(with([](auto& j) { j["mutator_weights"] = {1, 1}; }), ErrorCode::ConfigError);
  EXPECT_EQ(with([](auto& j) { j["suts"][1]["name"] = "oracle_a"; }), ErrorCode::ConfigError);
  EXPECT_EQ(with([](auto& j) { j["suts"][1]["kind"] = "quantum"; }), ErrorCode::ConfigError);
  EXPECT_EQ(with([](auto& j) { j.erase("dictionary_path"); }), ErrorCode::ConfigError);
  EXPECT_EQ(with([](auto& j) { j["benign"][1]["ref"] = "pisa"; }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { run_campaign(parse_config(nlohmann::json{{"suts", {}}})); }), ErrorCode::ConfigError);
}

TEST(TriageLabels, RoundTrip) {
  for (const auto label : {TriageLabel::Unlabeled, TriageLabel::WordInjection, TriageLabel::IncorrectWord,
                           TriageLabel::WordRepetition, TriageLabel::WordOmission,
                           TriageLabel::SyllableRepetition, TriageLabel::FalsePositive}) {
    EXPECT_EQ(parse_triage_label(to_string(label)), label);
  }
  EXPECT_EQ(to_string(TriageLabel::WordInjection), "word_injection");
  EXPECT_EQ(code_of([] { parse_triage_label("bogus"); }), ErrorCode::InvalidParams);
}

TEST(DetectFailure, Examples) {
  const auto tc = dummy_case();
  const std::string truth = "Together they had five sons.";
  EXPECT_TRUE(detect_failure(tc, truth, {ok("a", "together they had five sons")}, 0.8).empty());

  TranscriptionResult err;
  err.sut_name = "down";
  err.status = TranscriptionStatus::Error;
  const auto f = detect_failure(tc, truth, {ok("a", "together they had five sons"), err}, 0.8);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].sut_name, "down");
  EXPECT_EQ(f[0].similarity, 0.0);
  EXPECT_EQ(f[0].ground_truth_text, "together they had five sons");
  EXPECT_EQ(f[0].test_case_id, tc.id);
  EXPECT_EQ(f[0].triage_label, TriageLabel::Unlabeled);
}

TEST(DetectFailure, FrozenTrigramGolden) {
  // Computed once with the trigram embedder and frozen.
  constexpr double kGolden = 0.9492889050691345;
  const double sim = cosine(embed("together they had fiive sons"), embed("together they had five sons"));
  EXPECT_NEAR(sim, kGolden, 1e-9);
  const auto f = detect_failure(dummy_case(), "together they had five sons",
                                {ok("a", "together they had fiive sons")}, 0.8);
  EXPECT_EQ(f.empty(), kGolden >= 0.8);
  EXPECT_TRUE(f.empty());
  const auto strict = detect_failure(dummy_case(), "together they had five sons",
                                     {ok("a", "together they had fiive sons")}, 0.95);
  ASSERT_EQ(strict.size(), 1u);
  EXPECT_NEAR(strict[0].similarity, kGolden, 1e-9);
}

TEST(Summary, Format) {
  MutationChain chain;
  chain.benign_ref = "x";
  MutationRecord rep;
  rep.kind = MutatorKind::WordRepetition;
  rep.anchor.word = 0;
  rep.copies = 3;
  MutationRecord block;
  block.kind = MutatorKind::Block;
  block.anchor.word = 2;
  block.anchor.syllable = 0;
  block.pause_ms = 60;
  chain.records = {rep, block};
  EXPECT_EQ(summarize(chain), "word-repetition(w0 x3) + block(w2.s0 60ms)");
  EXPECT_EQ(summarize(MutationChain{}), "benign");
}

TEST(Campaign, BudgetAccountingAndOracleHasNoFailures) {
  TempDir dir;
  auto j = sftest::campaign_config(dir.path(), kOracles, 20);
  j["benign"].erase(2);
  const auto report = run_campaign(parse_config(j));
  ASSERT_EQ(report.per_seed.size(), 2u);
  for (const auto& s : report.per_seed) {
    EXPECT_TRUE(s.error.empty()) << s.error;
    EXPECT_EQ(s.cases_generated, 20u);
    ASSERT_TRUE(s.pool.has_value());
    EXPECT_EQ(s.frontier_size, s.pool->members().size());
    EXPECT_GE(s.frontier_size, 1u);
  }
  EXPECT_EQ(report.total_cases(), 40u);
  EXPECT_TRUE(report.failures.empty());
  // Oracles return the benign transcript, so against expected_text they only miss stutter words.
  for (const auto& name : {"oracle_a", "oracle_b"}) {
    const auto& m = report.metrics.at(name);
    EXPECT_EQ(m.hits, m.hyp_len);
    EXPECT_EQ(m.insertions, 0u);
    EXPECT_EQ(m.substitutions, 0u);
  }

  const auto doc = read_json_file(dir / "out/report.json");
  EXPECT_EQ(doc.at("failures").size(), 0u);
  EXPECT_EQ(doc.at("per_seed").size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(dir / "out/timing.json"));
  EXPECT_EQ(slurp(dir / "out/failures.csv"), "test_case_id,sut,similarity,truth,hypothesis,label\n");
}

TEST(Campaign, FragileFailuresAreAttributedAndReplay) {
  TempDir dir;
  const auto cfg = parse_config(sftest::campaign_config(dir.path(), kMixed, 30));
  const auto report = run_campaign(cfg);
  EXPECT_EQ(report.total_cases(), 90u);
  ASSERT_FALSE(report.failures.empty());

  auto registry = std::make_shared<GroundTruthRegistry>();
  auto dict = std::make_shared<const PronunciationDict>(load_dictionary(cfg.dictionary_path.string()));
  const auto suts = make_recognizers(cfg, registry, dict);
  const auto& fragile = *suts.at(1);

  std::size_t per_seed_total = 0;
  for (const auto& s : report.per_seed) per_seed_total += s.suspicious_count;
  EXPECT_EQ(per_seed_total, report.failures.size());
  EXPECT_LE(report.failures.size(), report.total_cases() * 2);

  for (const auto& f : report.failures) {
    EXPECT_EQ(f.sut_name, "fragile");
    EXPECT_LT(f.similarity, cfg.theta);
    ASSERT_TRUE(std::filesystem::exists(dir / "out/audio" / (f.test_case_id + ".wav")));

    const auto doc = read_json_file(dir / "out/chains" / (f.test_case_id + ".json"));
    const auto chain = chain_from_json(doc);
    EXPECT_EQ(chain, f.chain);
    EXPECT_EQ(chain_id(chain), f.test_case_id);
    const auto aligned = alignment_from_json(doc.at("alignment"));
    registry->add(chain.benign_ref, aligned);
    const auto seed = std::find_if(cfg.benign.begin(), cfg.benign.end(),
                                   [&](const BenignSeed& b) { return b.ref == chain.benign_ref; });
    ASSERT_NE(seed, cfg.benign.end());
    const auto rendered = render(load_wav(seed->audio), aligned, chain);
    EXPECT_EQ(encode_wav(rendered), sftest::read_bytes(dir / "out/audio" / (f.test_case_id + ".wav")));
    EXPECT_EQ(transcribe(fragile, rendered, chain.benign_ref).text, f.recognized_text);
  }
  EXPECT_EQ(report.metrics.at("oracle").insertions, 0u);
  EXPECT_EQ(report.metrics.at("oracle").hits, report.metrics.at("oracle").hyp_len);
}

TEST(Campaign, DeterministicReport) {
  TempDir a, b;
  auto ja = sftest::campaign_config(a.path(), kMixed, 15, 7);
  auto jb = sftest::campaign_config(b.path(), kMixed, 15, 7);
  ja["workers"] = 3;
  jb["workers"] = 1;
  run_campaign(parse_config(ja));
  run_campaign(parse_config(jb));
  // Paths differ between the two directories; compare everything but the config echo.
  auto ra = read_json_file(a / "out/report.json");
  auto rb = read_json_file(b / "out/report.json");
  ra.erase("config");
  rb.erase("config");
  for (auto* r : {&ra, &rb}) {
    for (auto& s : (*r)["per_seed"]) s.erase("audio");
  }
  EXPECT_EQ(ra.dump(), rb.dump());
  EXPECT_EQ(slurp(a / "out/failures.csv"), slurp(b / "out/failures.csv"));
  for (const auto& e : std::filesystem::directory_iterator(a / "out/audio")) {
    EXPECT_EQ(sftest::read_bytes(e.path()), sftest::read_bytes(b / "out/audio" / e.path().filename()));
  }

  auto jc = sftest::campaign_config(a.path(), kMixed, 15, 8);
  jc["output_dir"] = (a / "other").string();
  run_campaign(parse_config(jc));
  auto rc = read_json_file(a / "other/report.json");
  EXPECT_NE(rc.at("per_seed").dump(), read_json_file(a / "out/report.json").at("per_seed").dump());
}

TEST(Campaign, SingleMutatorAblation) {
  TempDir dir;
  auto j = sftest::campaign_config(dir.path(), kOracles, 10);
  j["mutator_weights"] = {{"block", 1}};
  const auto report = run_campaign(parse_config(j));
  for (const auto& s : report.per_seed) {
    for (const auto& m : s.pool->members()) {
      for (const auto& r : m.chain.records) EXPECT_EQ(r.kind, MutatorKind::Block);
    }
  }
}

TEST(Campaign, InapplicableMutatorsSkipButConsumeBudget) {
  TempDir dir;
  auto j = sftest::campaign_config(dir.path(), kOracles, 6);
  j["mutator_weights"] = {{"interjection", 1}};
  j["benign"].erase(1);  // "a" is a filler; the other seeds have none
  const auto report = run_campaign(parse_config(j));
  for (const auto& s : report.per_seed) {
    EXPECT_EQ(s.cases_generated, 6u);
    EXPECT_EQ(s.skipped_iterations, 6u);
    EXPECT_EQ(s.pool->members().size(), 1u);
  }
}

TEST(Campaign, BadSeedIsAnnotatedAndSkipped) {
  TempDir dir;
  auto j = sftest::campaign_config(dir.path(), kOracles, 3);
  stutterfuzz::save_wav(sftest::silence(1000), dir / "quiet.wav");
  j["benign"].push_back({{"ref", "quiet"}, {"audio", (dir / "quiet.wav").string()}, {"transcript", "hello"}});
  j["benign"].push_back({{"ref", "gone"}, {"audio", (dir / "missing.wav").string()}, {"transcript", "hello"}});
  const auto report = run_campaign(parse_config(j));
  ASSERT_EQ(report.per_seed.size(), 5u);
  EXPECT_FALSE(report.per_seed[3].error.empty());
  EXPECT_FALSE(report.per_seed[4].error.empty());
  EXPECT_EQ(report.per_seed[3].cases_generated, 0u);
  EXPECT_EQ(report.per_seed[0].cases_generated, 3u);
  EXPECT_EQ(report.to_json().at("per_seed")[3].at("error"), report.per_seed[3].error);
}

TEST(Report, LabelFailuresRewritesReportAndCsv) {
  TempDir dir;
  run_campaign(parse_config(sftest::campaign_config(dir.path(), kMixed, 20)));
  const auto path = dir / "out/report.json";
  const auto before = read_json_file(path);
  ASSERT_FALSE(before.at("failures").empty());
  const auto id = before.at("failures")[0].at("test_case_id").get<std::string>();

  EXPECT_GE(label_failures(path, id, TriageLabel::WordRepetition), 1u);
  const auto after = read_json_file(path);
  for (const auto& f : after.at("failures")) {
    EXPECT_EQ(f.at("label"), f.at("test_case_id") == id ? "word_repetition" : "unlabeled");
  }
  const auto csv = slurp(dir / "out/failures.csv");
  EXPECT_NE(csv.find(id + ",fragile,"), std::string::npos);
  EXPECT_NE(csv.find(",word_repetition\n"), std::string::npos);
  EXPECT_EQ(failures_csv(after), csv);

  EXPECT_EQ(code_of([&] { label_failures(path, "nope", TriageLabel::FalsePositive); }), ErrorCode::InvalidParams);
  EXPECT_EQ(code_of([&] { label_failures(path, id, TriageLabel::FalsePositive, "oracle"); }),
            ErrorCode::InvalidParams);
}

TEST(Report, CsvQuotesFields) {
  nlohmann::json report{{"failures",
                         {{{"test_case_id", "abc"},
                           {"sut", "s"},
                           {"similarity", 0.25},
                           {"truth", "a, b"},
                           {"hypothesis", "say \"hi\""},
                           {"label", "unlabeled"}}}}};
  EXPECT_EQ(failures_csv(report),
            "test_case_id,sut,similarity,truth,hypothesis,label\nabc,s,0.250000,\"a, b\",\"say \"\"hi\"\"\",unlabeled\n");
}

TEST(Corpus, ManifestRoundTrip) {
  TempDir dir;
  const std::vector<CorpusManifestItem> items{{dir / "cases/a.wav", "hello world", "h", dir / "seeds/h.wav"},
                                              {dir / "cases/b.wav", "x", "b", {}}};
  write_corpus_manifest(dir / "corpus.json", items);
  const auto doc = read_json_file(dir / "corpus.json");
  EXPECT_EQ(doc.at("items")[0].at("audio"), "cases/a.wav");
  EXPECT_EQ(load_corpus_manifest(dir / "corpus.json")[0].audio, items[0].audio);
  EXPECT_EQ(load_corpus_manifest(dir / "corpus.json")[1].benign_audio, std::filesystem::path{});
  EXPECT_EQ(load_corpus_manifest(dir / "corpus.json")[0].reference, "hello world");
}

TEST(Score, OracleIsPerfectAndFragileDegradesOnMutations) {
  TempDir dir;
  auto j = sftest::campaign_config(dir.path(), kMixed, 15);
  j["export_cases"] = true;
  const auto cfg = parse_config(j);
  run_campaign(cfg);

  auto registry = std::make_shared<GroundTruthRegistry>();
  auto dict = std::make_shared<const PronunciationDict>(load_dictionary(cfg.dictionary_path.string()));
  const auto suts = make_recognizers(cfg, registry, dict);
  auto corpus_of = [&](const std::string& name) {
    std::vector<CorpusItem> out;
    for (const auto& m : load_corpus_manifest(dir / "out" / name)) {
      const auto benign_audio = load_wav(m.benign_audio.empty() ? m.audio : m.benign_audio);
      const auto seed = std::find_if(cfg.benign.begin(), cfg.benign.end(),
                                     [&](const BenignSeed& b) { return b.ref == m.benign_ref; });
      registry->add(m.benign_ref, align(benign_audio, seed->transcript, *dict));
      out.push_back({load_wav(m.audio), m.reference, m.benign_ref});
    }
    return out;
  };
  const auto mutated = corpus_of("corpus_mutated.json");
  const auto benign = corpus_of("corpus_benign.json");
  EXPECT_EQ(mutated.size(), 45u);
  EXPECT_EQ(benign.size(), 3u);

  const auto sm = score_benchmark(suts, mutated);
  const auto sb = score_benchmark(suts, benign);
  for (const auto* s : {&sm[0], &sb[0]}) {
    EXPECT_EQ(s->sut_name, "oracle");
    EXPECT_EQ(s->wer, 0.0);
    EXPECT_EQ(s->mer, 0.0);
    EXPECT_EQ(s->wil, 0.0);
  }
  EXPECT_GT(sm[1].wer, sb[1].wer);
  EXPECT_GT(sm[1].mer, sb[1].mer);
  EXPECT_GT(sm[1].wil, sb[1].wil);

  const auto table = format_score_table(sm);
  EXPECT_NE(table.find("System"), std::string::npos);
  EXPECT_NE(table.find("fragile"), std::string::npos);
  EXPECT_EQ(score_csv(sm).rfind("sut,wer,mer,wil,hits,substitutions,deletions,insertions,ref_len,hyp_len\n", 0), 0u);
}

TEST(Score, SingleItemPoolingAndEmptyCorpus) {
  auto registry = std::make_shared<GroundTruthRegistry>();
  const auto u = sftest::synth_utterance("she never spoke");
  registry->add("s", align(u.audio, "she never spoke", sftest::fixture_dict()));
  const std::vector<std::shared_ptr<const Recognizer>> suts{make_recognizer(mock_oracle("o", registry))};

  // Reference differs from what the oracle returns, so metrics are non-trivial.
  const auto scores = score_benchmark(suts, {{u.audio, "she never spoke again", "s"}});
  const auto c = align_words("she never spoke again", "she never spoke");
  EXPECT_EQ(scores[0].counts, c);
  EXPECT_EQ(scores[0].wer, wer(c));
  EXPECT_EQ(scores[0].mer, mer(c));
  EXPECT_EQ(scores[0].wil, wil(c));
  EXPECT_EQ(code_of([&] { score_benchmark(suts, {}); }), ErrorCode::EmptyCorpus);
}
