// stutterfuzz command-line driver.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "stutterfuzz/alignment.hpp"
#include "stutterfuzz/audio.hpp"
#include "stutterfuzz/campaign.hpp"
#include "stutterfuzz/error.hpp"
#include "stutterfuzz/lexicon.hpp"
#include "stutterfuzz/mutation.hpp"
#include "stutterfuzz/serialization.hpp"
#include "stutterfuzz/text.hpp"

namespace fs = std::filesystem;
using namespace stutterfuzz;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct AlignArgs {
  std::string audio, transcript, dict, out;
};

struct MutateArgs {
  std::string audio, transcript, dict, kind, out;
  std::uint64_t seed = 0;
};

struct RunArgs {
  std::string config;
  std::size_t workers = 0;
};

struct ScoreArgs {
  std::string config, corpus, csv;
};

struct LabelArgs {
  std::string report, test_case, label, sut;
};

struct ReplayArgs {
  std::string chain, benign, out, transcript, dict;
};

AlignedTranscript align_file(const Waveform& w, const std::string& transcript, const std::string& dict_path,
                             const std::string& ref) {
  const auto dict = load_dictionary(dict_path);
  auto a = align(w, transcript, dict);
  a.audio_ref = ref;
  return a;
}

int cmd_align(const AlignArgs& args) {
  const auto w = load_wav(args.audio);
  const auto a = align_file(w, args.transcript, args.dict, fs::path(args.audio).stem().string());
  write_json_file(args.out, alignment_to_json(a));
  std::cout << "aligned " << a.words.size() << " words -> " << args.out << '\n';
  return kExitOk;
}

int cmd_mutate(const MutateArgs& args) {
  const auto w = load_wav(args.audio);
  const auto a = align_file(w, args.transcript, args.dict, fs::path(args.audio).stem().string());
  Rng rng(args.seed);
  MutationChain chain{a.audio_ref, {plan_mutation(a, parse_mutator_kind(args.kind), rng)}};
  const auto tc = make_test_case(w, a, std::move(chain));
  save_wav(tc.rendered, args.out);
  auto doc = chain_to_json(tc.chain);
  doc["alignment"] = alignment_to_json(a);
  const auto chain_path = fs::path(args.out).replace_extension(".json");
  write_json_file(chain_path, doc);
  std::cout << "case " << tc.id << ": " << summarize(tc.chain) << '\n'
            << "expected: " << tc.expected_text << '\n'
            << "wrote " << args.out << " and " << chain_path.string() << '\n';
  return kExitOk;
}

int cmd_run(const RunArgs& args) {
  auto cfg = load_config(args.config);
  if (args.workers > 0) cfg.workers = args.workers;
  const auto report = run_campaign(cfg);
  for (const auto& s : report.per_seed) {
    std::cout << s.benign_ref << ": " << s.cases_generated << " cases, " << s.suspicious_count
              << " suspicious, frontier " << s.frontier_size;
    if (!s.error.empty()) std::cout << " (" << s.error << ")";
    std::cout << '\n';
  }
  std::cout << "total: " << report.total_cases() << " cases, " << report.failures.size()
            << " suspicious failures\n";
  if (!cfg.output_dir.empty()) std::cout << "report: " << (cfg.output_dir / "report.json").string() << '\n';
  return kExitOk;
}

int cmd_score(const ScoreArgs& args) {
  const auto cfg = load_config(args.config);
  const auto manifest = load_corpus_manifest(args.corpus);
  auto dict = std::make_shared<const PronunciationDict>(load_dictionary(cfg.dictionary_path.string()));
  auto registry = std::make_shared<GroundTruthRegistry>();
  std::vector<CorpusItem> corpus;
  for (const auto& item : manifest) {
    auto audio = load_wav(item.audio);
    if (!registry->find(item.benign_ref)) {
      const auto benign = item.benign_audio.empty() ? audio : load_wav(item.benign_audio);
      auto a = align(benign, item.reference, *dict);
      a.audio_ref = item.benign_ref;
      registry->add(item.benign_ref, a);
    }
    corpus.push_back({std::move(audio), item.reference, item.benign_ref});
  }
  const auto scores = score_benchmark(make_recognizers(cfg, registry, dict), corpus);
  std::cout << format_score_table(scores);
  const fs::path csv_path =
      args.csv.empty() ? fs::path(args.corpus).replace_extension(".scores.csv") : fs::path(args.csv);
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw Error(ErrorCode::IoFailure, "cannot write " + csv_path.string());
  csv << score_csv(scores);
  return kExitOk;
}

int cmd_label(const LabelArgs& args) {
  const auto n = label_failures(args.report, args.test_case, parse_triage_label(args.label), args.sut);
  std::cout << "labelled " << n << " failure(s) of " << args.test_case << " as " << args.label << '\n';
  return kExitOk;
}

int cmd_replay(const ReplayArgs& args) {
  const auto doc = read_json_file(args.chain);
  auto chain = chain_from_json(doc);
  const auto w = load_wav(args.benign);
  AlignedTranscript a;
  if (doc.contains("alignment")) {
    a = alignment_from_json(doc.at("alignment"));
  } else if (!args.transcript.empty() && !args.dict.empty()) {
    a = align_file(w, args.transcript, args.dict, chain.benign_ref);
  } else {
    throw Error(ErrorCode::InvalidChain, "chain has no alignment; pass --transcript and --dict");
  }
  a.audio_ref = chain.benign_ref;
  validate(chain, a, std::max(kDefaultMaxChainLength, chain.records.size()));
  const auto tc = make_test_case(w, a, std::move(chain));
  save_wav(tc.rendered, args.out);
  std::cout << "case " << tc.id << ": " << summarize(tc.chain) << '\n'
            << "expected: " << tc.expected_text << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stutter-based metamorphic testing for speech recognizers", "stutterfuzz"};
  app.require_subcommand(1, 1);
  app.failure_message(CLI::FailureMessage::help);

  AlignArgs align_args;
  auto* align_cmd = app.add_subcommand("align", "Align a transcript to its recording");
  align_cmd->add_option("--audio", align_args.audio, "PCM16 mono WAV")->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--transcript", align_args.transcript, "Transcript text")->required();
  align_cmd->add_option("--dict", align_args.dict, "Pronunciation dictionary")->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--out", align_args.out, "Alignment JSON output")->required();

  MutateArgs mutate_args;
  auto* mutate_cmd = app.add_subcommand("mutate", "Apply one mutator to a recording");
  mutate_cmd->add_option("--audio", mutate_args.audio)->required()->check(CLI::ExistingFile);
  mutate_cmd->add_option("--transcript", mutate_args.transcript)->required();
  mutate_cmd->add_option("--dict", mutate_args.dict)->required()->check(CLI::ExistingFile);
  mutate_cmd->add_option("--kind", mutate_args.kind)
      ->required()
      ->check(CLI::IsMember({"block", "prolongation", "sound-repetition", "word-repetition", "interjection"}));
  mutate_cmd->add_option("--seed", mutate_args.seed, "RNG seed")->default_val(0);
  mutate_cmd->add_option("--out", mutate_args.out, "Output WAV; the chain goes next to it as .json")->required();

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run a fuzzing campaign");
  run_cmd->add_option("--config", run_args.config)->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--workers", run_args.workers, "Parallel seeds (0: one per seed, max 8)");

  ScoreArgs score_args;
  auto* score_cmd = app.add_subcommand("score", "Score the configured systems on a corpus");
  score_cmd->add_option("--config", score_args.config)->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--corpus", score_args.corpus, "Corpus manifest JSON")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--csv", score_args.csv, "CSV output (default: <corpus>.scores.csv)");

  LabelArgs label_args;
  auto* label_cmd = app.add_subcommand("label", "Set the triage label of a suspicious failure");
  label_cmd->add_option("--report", label_args.report)->required()->check(CLI::ExistingFile);
  label_cmd->add_option("--case", label_args.test_case)->required();
  label_cmd->add_option("--label", label_args.label)->required();
  label_cmd->add_option("--sut", label_args.sut, "Only this system's failure");

  ReplayArgs replay_args;
  auto* replay_cmd = app.add_subcommand("replay", "Re-render a chain onto its benign recording");
  replay_cmd->add_option("--chain", replay_args.chain)->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--benign", replay_args.benign)->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--out", replay_args.out)->required();
  replay_cmd->add_option("--transcript", replay_args.transcript);
  replay_cmd->add_option("--dict", replay_args.dict);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*align_cmd) return cmd_align(align_args);
    if (*mutate_cmd) return cmd_mutate(mutate_args);
    if (*run_cmd) return cmd_run(run_args);
    if (*score_cmd) return cmd_score(score_args);
    if (*label_cmd) return cmd_label(label_args);
    if (*replay_cmd) return cmd_replay(replay_args);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}
