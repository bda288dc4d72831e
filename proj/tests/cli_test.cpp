#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "stutterfuzz/audio.hpp"
#include "stutterfuzz/campaign.hpp"
#include "stutterfuzz/serialization.hpp"

using namespace stutterfuzz;
using sftest::TempDir;

namespace {

struct CliRun {
  int code = -1;
  std::string output;  // stdout and stderr
};

std::string quote(const std::string& s) {
  std::string out = "'";
  for (const char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  CliRun cli(const std::vector<std::string>& args) const {
    std::string cmd = quote(STUTTERFUZZ_CLI);
    for (const auto& a : args) cmd += " " + quote(a);
    const auto log = dir_ / "cli.log";
    const int status = std::system((cmd + " > " + quote(log.string()) + " 2>&1").c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
  }

  std::string wav(const std::string& name, const Waveform& w) const {
    const auto p = dir_ / (name + ".wav");
    save_wav(w, p);
    return p.string();
  }

  std::string dict() const { return sftest::fixture_dict_path().string(); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string config(const std::vector<sftest::SutSpec>& suts, int budget, const std::string& name) const {
    const auto sub = dir_ / name;
    auto j = sftest::campaign_config(sub, suts, budget);
    const auto p = sub / "config.json";
    write_json_file(p, j);
    return p.string();
  }

  TempDir dir_;
};

const std::vector<sftest::SutSpec> kMixed{{"oracle", "mock_oracle"}, {"fragile", "mock_fragile"}};

}  // namespace

TEST_F(Cli, AlignWritesTwoWords) {
  const auto audio = wav("hw", sftest::synth_utterance("hello world").audio);
  const auto r = cli({"align", "--audio", audio, "--transcript", "hello world", "--dict", dict(), "--out", path("a.json")});
  ASSERT_EQ(r.code, 0) << r.output;
  const auto j = read_json_file(path("a.json"));
  ASSERT_EQ(j.at("words").size(), 2u);
  EXPECT_EQ(j["words"][0]["text"], "hello");
  EXPECT_EQ(j["words"][1]["text"], "world");
  EXPECT_NE(r.output.find("aligned 2 words"), std::string::npos);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  const auto audio = wav("hw", sftest::synth_utterance("hello world").audio);
  auto r = cli({"align", "--audio", audio, "--transcript", "hello world", "--out", path("a.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("--dict"), std::string::npos);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"align", "--audio", audio, "--transcript", "x", "--dict", dict(), "--out", "o", "--bogus"}).code, 2);
  EXPECT_EQ(cli({"mutate", "--audio", audio, "--transcript", "hello world", "--dict", dict(), "--kind", "explode",
                 "--out", path("m.wav")})
                .code,
            2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(Cli, SilentAudioIsDomainError) {
  const auto audio = wav("quiet", sftest::silence(1500));
  const auto r = cli({"align", "--audio", audio, "--transcript", "hello world", "--dict", dict(), "--out", path("a.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("no speech detected"), std::string::npos) << r.output;
  EXPECT_FALSE(std::filesystem::exists(path("a.json")));
}

TEST_F(Cli, MutateIsDeterministic) {
  const auto audio = wav("pisa", sftest::synth_utterance("he plays for pisa").audio);
  const std::vector<std::string> base{"mutate", "--audio", audio, "--transcript", "he plays for pisa",
                                      "--dict", dict(),  "--kind",     "block", "--seed", "7"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", path("a.wav")});
  b.insert(b.end(), {"--out", path("b.wav")});
  const auto ra = cli(a);
  const auto rb = cli(b);
  ASSERT_EQ(ra.code, 0) << ra.output;
  ASSERT_EQ(rb.code, 0) << rb.output;
  EXPECT_EQ(sftest::read_bytes(path("a.wav")), sftest::read_bytes(path("b.wav")));
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  const auto chain = chain_from_json(read_json_file(path("a.json")));
  ASSERT_EQ(chain.records.size(), 1u);
  EXPECT_EQ(chain.records[0].kind, MutatorKind::Block);
  EXPECT_GT(load_wav(path("a.wav")).samples().size(), load_wav(audio).samples().size());
}

TEST_F(Cli, InterjectionWithoutFillerIsNotApplicable) {
  const auto audio = wav("pisa", sftest::synth_utterance("he plays pisa").audio);
  const auto r = cli({"mutate", "--audio", audio, "--transcript", "he plays pisa", "--dict", dict(), "--kind",
                      "interjection", "--out", path("m.wav")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("NotApplicable"), std::string::npos) << r.output;
}

TEST_F(Cli, WordRepetitionLengthensAudio) {
  const auto audio = wav("pisa", sftest::synth_utterance("he plays for pisa").audio);
  for (const auto* seed : {"1", "2", "3"}) {
    const auto r = cli({"mutate", "--audio", audio, "--transcript", "he plays for pisa", "--dict", dict(), "--kind",
                        "word-repetition", "--seed", seed, "--out", path("m.wav")});
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_GT(load_wav(path("m.wav")).samples().size(), load_wav(audio).samples().size());
  }
}

TEST_F(Cli, RunIsDeterministicAndRejectsOneSut) {
  const auto oracles = config({{"a", "mock_oracle"}, {"b", "mock_oracle"}}, 8, "oracles");
  auto r = cli({"run", "--config", oracles});
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("total: 24 cases, 0 suspicious failures"), std::string::npos) << r.output;
  EXPECT_EQ(read_json_file(dir_ / "oracles/out/report.json").at("failures").size(), 0u);

  const auto mixed = config(kMixed, 12, "mixed");
  ASSERT_EQ(cli({"run", "--config", mixed}).code, 0);
  const auto first = slurp(dir_ / "mixed/out/report.json");
  const auto first_csv = slurp(dir_ / "mixed/out/failures.csv");
  ASSERT_EQ(cli({"run", "--config", mixed, "--workers", "1"}).code, 0);
  EXPECT_EQ(slurp(dir_ / "mixed/out/report.json"), first);
  EXPECT_EQ(slurp(dir_ / "mixed/out/failures.csv"), first_csv);

  auto j = read_json_file(oracles);
  j["suts"].erase(1);
  write_json_file(path("one.json"), j);
  r = cli({"run", "--config", path("one.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("at least 2 SUTs"), std::string::npos) << r.output;
}

TEST_F(Cli, LabelAndReplay) {
  const auto mixed = config(kMixed, 20, "mixed");
  ASSERT_EQ(cli({"run", "--config", mixed}).code, 0);
  const auto report_path = dir_ / "mixed/out/report.json";
  const auto report = read_json_file(report_path);
  ASSERT_FALSE(report.at("failures").empty());
  const auto& failure = report["failures"][0];
  const auto id = failure.at("test_case_id").get<std::string>();
  const auto ref = failure.at("benign_ref").get<std::string>();

  auto r = cli({"label", "--report", report_path.string(), "--case", id, "--label", "word_injection"});
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(read_json_file(report_path)["failures"][0]["label"], "word_injection");
  EXPECT_NE(slurp(dir_ / "mixed/out/failures.csv").find("word_injection"), std::string::npos);
  EXPECT_EQ(cli({"label", "--report", report_path.string(), "--case", id, "--label", "nonsense"}).code, 1);
  EXPECT_EQ(cli({"label", "--report", report_path.string(), "--case", "missing", "--label", "false_positive"}).code, 1);

  const auto benign = (dir_ / "mixed/seeds" / (ref + ".wav")).string();
  r = cli({"replay", "--chain", (dir_ / "mixed/out/chains" / (id + ".json")).string(), "--benign", benign, "--out",
           path("replayed.wav")});
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(sftest::read_bytes(path("replayed.wav")), sftest::read_bytes(dir_ / "mixed/out/audio" / (id + ".wav")));
  EXPECT_NE(r.output.find("case " + id), std::string::npos);

  // A bare chain (no embedded alignment) needs the transcript to re-align.
  auto bare = read_json_file(dir_ / "mixed/out/chains" / (id + ".json"));
  bare.erase("alignment");
  write_json_file(path("bare.json"), bare);
  EXPECT_EQ(cli({"replay", "--chain", path("bare.json"), "--benign", benign, "--out", path("r2.wav")}).code, 1);
}

TEST_F(Cli, ScoreWritesTableAndCsv) {
  const auto sub = dir_ / "score";
  auto j = sftest::campaign_config(sub, kMixed, 6);
  j["export_cases"] = true;
  write_json_file(sub / "config.json", j);
  ASSERT_EQ(cli({"run", "--config", (sub / "config.json").string()}).code, 0);

  const auto corpus = sub / "out/corpus_benign.json";
  const auto r = cli({"score", "--config", (sub / "config.json").string(), "--corpus", corpus.string()});
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("System"), std::string::npos);
  EXPECT_NE(r.output.find("oracle"), std::string::npos);
  const auto csv = slurp(sub / "out/corpus_benign.scores.csv");
  EXPECT_EQ(csv.rfind("sut,wer,mer,wil,", 0), 0u);
  EXPECT_NE(csv.find("\noracle,0.000000,0.000000,0.000000,"), std::string::npos) << csv;

  const auto mutated = sub / "out/corpus_mutated.json";
  const auto rm = cli({"score", "--config", (sub / "config.json").string(), "--corpus", mutated.string(), "--csv",
                       path("m.csv")});
  ASSERT_EQ(rm.code, 0) << rm.output;
  EXPECT_TRUE(std::filesystem::exists(path("m.csv")));

  write_json_file(path("empty.json"), {{"items", nlohmann::json::array()}});
  const auto re = cli({"score", "--config", (sub / "config.json").string(), "--corpus", path("empty.json")});
  EXPECT_EQ(re.code, 1);
}
