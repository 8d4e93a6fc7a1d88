#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tarc/corpus.hpp"

namespace tarc {

enum class NormFlag {
  code_switch,
  loanword,
  glottal_exception,
  negation_circumfix,
};

struct CollapsedRun {
  std::size_t position = 0;  // code-point offset in the original token
  std::size_t length = 0;    // run length before collapsing

  bool operator==(const CollapsedRun&) const = default;
};

struct NormalizationReport {
  std::string original;
  std::string normalized;
  std::vector<CollapsedRun> collapsed_runs;
  std::set<NormFlag> flags;
};

/// Word lists consulted by the normalizer. Loanwords and code-switch words are
/// disjoint: a word is either acclimatized or foreign.
class ExceptionLexicon {
 public:
  ExceptionLexicon() = default;
  // Throws Error(invalid_argument) if a word is both loanword and codeswitch.
  ExceptionLexicon(std::set<std::string> glottal_words, std::set<std::string> loanwords,
                   std::set<std::string> code_switch_vocab);

  static ExceptionLexicon parse(std::string_view text);
  static ExceptionLexicon load(const std::string& path);
  static const ExceptionLexicon& builtin();

  std::string to_text() const;

  const std::set<std::string>& glottal_words() const { return glottal_; }
  const std::set<std::string>& loanwords() const { return loanwords_; }
  const std::set<std::string>& code_switch_vocab() const { return code_switch_; }

  bool is_loanword(std::string_view token) const;

  // Copy-on-update: each returns a new snapshot.
  ExceptionLexicon with_glottal(std::string word) const;
  ExceptionLexicon with_loanword(std::string word) const;
  ExceptionLexicon with_code_switch(std::string word) const;

 private:
  std::set<std::string> glottal_;
  std::set<std::string> loanwords_;
  std::set<std::string> code_switch_;
};

/// Collapses every run of three or more identical letters (or Arabish
/// digits) to one character; doubles are kept.
NormalizationReport collapse_prosody(std::string_view token);

// Inverse of collapse_prosody.
std::string restore(const NormalizationReport& report);

/// Lowercase + prosody collapse: the key form used everywhere downstream.
std::string normalize_token(std::string_view token);

/// Full report with flags set from the lexicon.
NormalizationReport normalize(std::string_view token, const ExceptionLexicon& lex);

bool detect_code_switch(std::string_view token, const ExceptionLexicon& lex);

struct FilterResult {
  std::vector<Sentence> kept;
  std::vector<Sentence> removed;
};

FilterResult filter_code_switch_sentences(const std::vector<Sentence>& sentences,
                                          const ExceptionLexicon& lex);

struct CircumfixSplit {
  std::string prefix;
  std::string stem;
  std::string suffix;

  bool operator==(const CircumfixSplit&) const = default;
};

inline const std::vector<std::string>& negation_prefixes() {
  static const std::vector<std::string> v = {"ma", "me", "m"};
  return v;
}
inline const std::vector<std::string>& negation_suffixes() {
  static const std::vector<std::string> v = {"ch", "ech", "ich"};
  return v;
}
inline constexpr std::size_t kMinNegatedStem = 2;

/// ma/me/m + stem + ch/ech/ich with a stem of at least two characters.
/// Longest prefix wins, then the shortest suffix.
std::optional<CircumfixSplit> detect_negation_circumfix(std::string_view token);

/// Drops word-initial and word-final glottal stops unless the word is listed
/// as an exception. Word-medial hamza is untouched.
std::string apply_glottal_policy(std::string_view arabic, const ExceptionLexicon& lex);

}  // namespace tarc
