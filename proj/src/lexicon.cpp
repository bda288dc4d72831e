#include "stutterfuzz/lexicon.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include <set>
#include <span>
#include <sstream>

#include "stutterfuzz/error.hpp"
#include "stutterfuzz/text.hpp"

namespace stutterfuzz {

namespace {

// English onsets in ARPAbet. Any single consonant except NG is also legal.
const std::set<std::vector<std::string>>& legal_onsets() {
  static const std::set<std::vector<std::string>> onsets = {
      {"P", "R"},  {"P", "L"},  {"P", "Y"},  {"B", "R"},  {"B", "L"},  {"B", "Y"},
      {"T", "R"},  {"T", "W"},  {"D", "R"},  {"D", "W"},  {"K", "R"},  {"K", "L"},
      {"K", "W"},  {"K", "Y"},  {"G", "R"},  {"G", "L"},  {"G", "W"},  {"G", "Y"},
      {"F", "R"},  {"F", "L"},  {"F", "Y"},  {"V", "Y"},  {"TH", "R"}, {"TH", "W"},
      {"SH", "R"}, {"M", "Y"},  {"N", "Y"},  {"HH", "Y"}, {"HH", "W"}, {"S", "P"},
      {"S", "T"},  {"S", "K"},  {"S", "M"},  {"S", "N"},  {"S", "L"},  {"S", "W"},
      {"S", "F"},  {"S", "P", "R"}, {"S", "P", "L"}, {"S", "P", "Y"}, {"S", "T", "R"},
      {"S", "K", "R"}, {"S", "K", "W"}, {"S", "K", "Y"}, {"S", "K", "L"},
  };
  return onsets;
}

bool is_legal_onset(std::span<const std::string> cluster) {
  if (cluster.empty()) return true;
  if (cluster.size() == 1) return cluster[0] != "NG";
  return legal_onsets().contains(std::vector<std::string>(cluster.begin(), cluster.end()));
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// "WORD(2)" -> "WORD"; anything else unchanged.
std::string_view strip_variant(std::string_view word) {
  if (word.size() >= 3 && word.back() == ')') {
    const auto open = word.rfind('(');
    if (open != std::string_view::npos && open > 0 && open + 2 < word.size()) {
      const auto digits = word.substr(open + 1, word.size() - open - 2);
      if (std::all_of(digits.begin(), digits.end(),
                      [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; })) {
        return word.substr(0, open);
      }
    }
  }
  return word;
}

}  // namespace

bool is_vowel_phone(std::string_view phone) {
  return !phone.empty() && (phone.back() == '0' || phone.back() == '1' || phone.back() == '2');
}

std::string strip_stress(std::string_view phone) {
  if (is_vowel_phone(phone)) phone.remove_suffix(1);
  return std::string(phone);
}

bool is_valid_phone(std::string_view phone) {
  std::size_t letters = 0;
  while (letters < phone.size() && phone[letters] >= 'A' && phone[letters] <= 'Z') ++letters;
  if (letters == 0) return false;
  if (letters == phone.size()) return true;
  return letters + 1 == phone.size() && is_vowel_phone(phone);
}

void PronunciationDict::add(std::string_view word, Pronunciation p) {
  entries_[text::normalize(word)].push_back(std::move(p));
}

const std::vector<Pronunciation>* PronunciationDict::find(std::string_view word) const {
  const auto it = entries_.find(text::normalize(word));
  return it == entries_.end() ? nullptr : &it->second;
}

PronunciationDict parse_dictionary(std::istream& in, std::string source_name) {
  PronunciationDict dict(std::move(source_name));
  std::string line;
  std::size_t line_number = 0;
  std::size_t parsed = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.starts_with(";;;")) continue;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;  // blank
    Pronunciation p;
    std::string phone;
    bool ok = true;
    while (fields >> phone) {
      if (!is_valid_phone(phone)) {
        ok = false;
        break;
      }
      p.phones.push_back(phone);
    }
    const std::string key = text::normalize(strip_variant(word));
    if (!ok || p.phones.empty() || key.empty()) {
      dict.malformed_.push_back({line_number, line});
      continue;
    }
    dict.entries_[key].push_back(std::move(p));
    ++parsed;
  }
  if (parsed == 0) {
    throw Error(ErrorCode::EmptyDictionary, "dictionary " + dict.source_name_ + " has no entries");
  }
  return dict;
}

PronunciationDict parse_dictionary(std::string_view text, std::string source_name) {
  std::istringstream in{std::string(text)};
  return parse_dictionary(in, std::move(source_name));
}

PronunciationDict load_dictionary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open dictionary " + path);
  return parse_dictionary(in, path);
}

std::string serialize_dictionary(const PronunciationDict& d) {
  std::ostringstream out;
  for (const auto& [word, prons] : d.entries()) {
    for (std::size_t i = 0; i < prons.size(); ++i) {
      out << upper(word);
      if (i > 0) out << '(' << (i + 1) << ')';
      out << ' ';
      for (const auto& ph : prons[i].phones) out << ' ' << ph;
      out << '\n';
    }
  }
  return out.str();
}

const Pronunciation& lookup(const PronunciationDict& d, std::string_view word) {
  const auto* prons = d.find(word);
  if (prons == nullptr || prons->empty()) {
    throw Error(ErrorCode::OutOfVocabulary, "word not in dictionary: '" + std::string(word) + "'");
  }
  return prons->front();
}

Syllabification syllabify(const Pronunciation& p) {
  const auto& phones = p.phones;
  std::vector<std::size_t> nuclei;
  for (std::size_t i = 0; i < phones.size(); ++i) {
    if (is_vowel_phone(phones[i])) nuclei.push_back(i);
  }
  Syllabification result;
  if (nuclei.empty()) {
    result.spans.push_back({phones, 0});
    result.no_vowel_fallback = true;
    return result;
  }
  // Boundary k is the first phone of syllable k + 1.
  std::vector<std::size_t> starts{0};
  for (std::size_t k = 0; k + 1 < nuclei.size(); ++k) {
    const std::size_t first = nuclei[k] + 1;
    const std::size_t last = nuclei[k + 1];  // exclusive
    std::size_t onset = last;
    const std::span<const std::string> all(phones);
    while (onset > first && is_legal_onset(all.subspan(onset - 1, last - onset + 1))) --onset;
    starts.push_back(onset);
  }
  starts.push_back(phones.size());
  for (std::size_t k = 0; k + 1 < starts.size(); ++k) {
    result.spans.push_back(
        {std::vector<std::string>(phones.begin() + static_cast<std::ptrdiff_t>(starts[k]),
                                  phones.begin() + static_cast<std::ptrdiff_t>(starts[k + 1])),
         k});
  }
  return result;
}

}  // namespace stutterfuzz
