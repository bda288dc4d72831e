#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace stutterfuzz {

/// ARPAbet-style phone sequence; vowels carry a trailing stress digit.
struct Pronunciation {
  std::vector<std::string> phones;

  friend bool operator==(const Pronunciation&, const Pronunciation&) = default;
};

bool is_vowel_phone(std::string_view phone);
/// Phone symbol with any trailing stress digit removed ("EH1" -> "EH").
std::string strip_stress(std::string_view phone);
bool is_valid_phone(std::string_view phone);

struct MalformedLine {
  std::size_t line_number = 0;
  std::string text;
};

class PronunciationDict {
 public:
  PronunciationDict() = default;
  explicit PronunciationDict(std::string source_name) : source_name_(std::move(source_name)) {}

  /// Appends an alternate pronunciation; the first one added is preferred.
  void add(std::string_view word, Pronunciation p);

  /// All pronunciations for a word, preferred first; nullptr when absent.
  /// The lookup key is normalized the same way transcripts are.
  const std::vector<Pronunciation>* find(std::string_view word) const;

  const std::map<std::string, std::vector<Pronunciation>>& entries() const { return entries_; }
  const std::string& source_name() const { return source_name_; }
  const std::vector<MalformedLine>& malformed() const { return malformed_; }
  std::size_t size() const { return entries_.size(); }

  friend bool operator==(const PronunciationDict& a, const PronunciationDict& b) {
    return a.entries_ == b.entries_;
  }

 private:
  friend PronunciationDict parse_dictionary(std::istream&, std::string);

  std::map<std::string, std::vector<Pronunciation>> entries_;
  std::string source_name_;
  std::vector<MalformedLine> malformed_;
};

/// CMU-dict style text: "WORD  PH1 PH2 ...", ";;;" comments, "WORD(n)"
/// alternates. Malformed lines are collected in malformed(); throws
/// EmptyDictionary if no line parses.
PronunciationDict parse_dictionary(std::istream& in, std::string source_name = "<stream>");
PronunciationDict parse_dictionary(std::string_view text, std::string source_name = "<string>");
PronunciationDict load_dictionary(const std::string& path);

/// Canonical text form accepted by parse_dictionary.
std::string serialize_dictionary(const PronunciationDict& d);

/// Preferred pronunciation; throws OutOfVocabulary.
const Pronunciation& lookup(const PronunciationDict& d, std::string_view word);

struct SyllableSpan {
  std::vector<std::string> phones;
  std::size_t index = 0;

  friend bool operator==(const SyllableSpan&, const SyllableSpan&) = default;
};

struct Syllabification {
  std::vector<SyllableSpan> spans;
  /// Set when the pronunciation had no vowel and was kept as one span.
  bool no_vowel_fallback = false;
};

/// Vowel-nucleus syllabification with maximal legal onsets.
Syllabification syllabify(const Pronunciation& p);

}  // namespace stutterfuzz
