#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "stutterfuzz/alignment.hpp"
#include "stutterfuzz/mutation.hpp"

namespace stutterfuzz {

inline constexpr int kSchemaVersion = 1;

// Alignment exchange format:
// {"words":[{"text","start_ms","end_ms","syllables":[{"phones","start_ms","end_ms"}]}]}
nlohmann::json alignment_to_json(const AlignedTranscript& a);
/// Validates the result; filler flags are recomputed from phones.
AlignedTranscript alignment_from_json(const nlohmann::json& j,
                                      const FillerSet& fillers = default_fillers());

nlohmann::json record_to_json(const MutationRecord& r);
MutationRecord record_from_json(const nlohmann::json& j);

// {"schema_version":1,"benign_ref":...,"records":[...]}; an optional
// "alignment" member makes the document replayable without a dictionary.
nlohmann::json chain_to_json(const MutationChain& c);
MutationChain chain_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace stutterfuzz
