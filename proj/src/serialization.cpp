#include "stutterfuzz/serialization.hpp"

#include <fstream>

#include "stutterfuzz/error.hpp"

namespace stutterfuzz {

using nlohmann::json;

json alignment_to_json(const AlignedTranscript& a) {
  json words = json::array();
  for (const auto& w : a.words) {
    json syllables = json::array();
    for (const auto& s : w.syllables) {
      syllables.push_back({{"phones", s.phones}, {"start_ms", s.start_ms}, {"end_ms", s.end_ms}});
    }
    words.push_back({{"text", w.text},
                     {"start_ms", w.start_ms},
                     {"end_ms", w.end_ms},
                     {"syllables", std::move(syllables)}});
  }
  json out{{"words", std::move(words)}};
  if (!a.transcript_text.empty()) out["transcript"] = a.transcript_text;
  if (!a.audio_ref.empty()) out["audio_ref"] = a.audio_ref;
  return out;
}

AlignedTranscript alignment_from_json(const json& j, const FillerSet& fillers) {
  AlignedTranscript a;
  try {
    for (const auto& jw : j.at("words")) {
      TimedWord w;
      w.text = jw.at("text").get<std::string>();
      w.start_ms = jw.at("start_ms").get<Ms>();
      w.end_ms = jw.at("end_ms").get<Ms>();
      for (const auto& js : jw.at("syllables")) {
        TimedSyllable s;
        s.phones = js.at("phones").get<std::vector<std::string>>();
        s.start_ms = js.at("start_ms").get<Ms>();
        s.end_ms = js.at("end_ms").get<Ms>();
        s.is_filler_candidate = !match_filler(s.phones, fillers).empty();
        w.syllables.push_back(std::move(s));
      }
      w.out_of_vocabulary = w.syllables.size() == 1 && w.syllables.front().phones.empty();
      a.words.push_back(std::move(w));
    }
    a.transcript_text = j.value("transcript", std::string{});
    a.audio_ref = j.value("audio_ref", std::string{});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidAlignment, std::string("malformed alignment JSON: ") + e.what());
  }
  if (a.transcript_text.empty()) {
    for (std::size_t k = 0; k < a.words.size(); ++k) {
      if (k > 0) a.transcript_text += ' ';
      a.transcript_text += a.words[k].text;
    }
  }
  validate(a);
  return a;
}

json record_to_json(const MutationRecord& r) {
  json anchor{{"word", r.anchor.word}};
  if (r.anchor.syllable) anchor["syllable"] = *r.anchor.syllable;
  json params = json::object();
  switch (r.kind) {
    case MutatorKind::Block: params["pause_ms"] = r.pause_ms; break;
    case MutatorKind::Prolongation: params["factor"] = r.factor; break;
    case MutatorKind::SoundRepetition:
    case MutatorKind::WordRepetition: params["copies"] = r.copies; break;
    case MutatorKind::Interjection: params["slots"] = r.slots; break;
  }
  return {{"kind", to_string(r.kind)},
          {"anchor", std::move(anchor)},
          {"params", std::move(params)},
          {"rng_draws", r.rng_draws}};
}

MutationRecord record_from_json(const json& j) {
  try {
    MutationRecord r;
    r.kind = parse_mutator_kind(j.at("kind").get<std::string>());
    const auto& anchor = j.at("anchor");
    r.anchor.word = anchor.at("word").get<std::size_t>();
    if (anchor.contains("syllable")) r.anchor.syllable = anchor.at("syllable").get<std::size_t>();
    const auto& params = j.at("params");
    switch (r.kind) {
      case MutatorKind::Block: r.pause_ms = params.at("pause_ms").get<int>(); break;
      case MutatorKind::Prolongation: r.factor = params.at("factor").get<int>(); break;
      case MutatorKind::SoundRepetition:
      case MutatorKind::WordRepetition: r.copies = params.at("copies").get<int>(); break;
      case MutatorKind::Interjection:
        r.slots = params.at("slots").get<std::vector<std::size_t>>();
        break;
    }
    r.rng_draws = j.value("rng_draws", std::vector<std::int64_t>{});
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidChain, std::string("malformed mutation record: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidChain, e.what());
  }
}

json chain_to_json(const MutationChain& c) {
  json records = json::array();
  for (const auto& r : c.records) records.push_back(record_to_json(r));
  return {{"schema_version", kSchemaVersion},
          {"benign_ref", c.benign_ref},
          {"records", std::move(records)}};
}

MutationChain chain_from_json(const json& j) {
  try {
    const int version = j.value("schema_version", kSchemaVersion);
    if (version != kSchemaVersion) {
      throw Error(ErrorCode::InvalidChain, "unsupported chain schema_version " + std::to_string(version));
    }
    MutationChain c;
    c.benign_ref = j.at("benign_ref").get<std::string>();
    for (const auto& r : j.at("records")) c.records.push_back(record_from_json(r));
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidChain, std::string("malformed chain JSON: ") + e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

}  // namespace stutterfuzz
