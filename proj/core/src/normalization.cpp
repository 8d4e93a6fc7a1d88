#include "tarc/normalization.hpp"

#include <fstream>
#include <sstream>

#include "detail/builtin_data.hpp"
#include "tarc/error.hpp"
#include "tarc/utf8.hpp"

namespace tarc {

namespace {

bool is_prosodic(char32_t cp) {
  return utf8::is_latin_letter(cp) || (cp >= U'0' && cp <= U'9');
}

bool is_hamza(char32_t cp) { return cp == U'ء'; }

std::u32string glottal_word(std::u32string w) {
  std::size_t start = 0;
  while (start < w.size() && is_hamza(w[start])) ++start;
  w.erase(0, start);
  while (!w.empty() && is_hamza(w.back())) w.pop_back();
  if (w.empty()) return w;
  if (w.front() == U'أ' || w.front() == U'إ' || w.front() == U'آ') w.front() = U'ا';
  switch (w.back()) {
    case U'أ': w.back() = U'ا'; break;
    case U'ؤ': w.back() = U'و'; break;
    case U'ئ': w.back() = U'ي'; break;
    default: break;
  }
  return w;
}

}  // namespace

ExceptionLexicon::ExceptionLexicon(std::set<std::string> glottal_words,
                                   std::set<std::string> loanwords,
                                   std::set<std::string> code_switch_vocab)
    : glottal_(std::move(glottal_words)) {
  for (const auto& w : loanwords) loanwords_.insert(normalize_token(w));
  for (const auto& w : code_switch_vocab) code_switch_.insert(normalize_token(w));
  for (const auto& w : loanwords_) {
    if (code_switch_.count(w)) {
      throw Error(ErrorCode::invalid_argument,
                  "lexicon: '" + w + "' is listed both as loanword and as code-switch");
    }
  }
}

ExceptionLexicon ExceptionLexicon::parse(std::string_view text) {
  std::set<std::string> glottal, loans, cs;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw Error(ErrorCode::parse, "lexicon line " + std::to_string(line_no) + ": expected word<TAB>category");
    }
    std::string word = line.substr(0, tab);
    std::string category = line.substr(tab + 1);
    if (category == "glottal") {
      glottal.insert(word);
    } else if (category == "loanword") {
      loans.insert(word);
    } else if (category == "codeswitch") {
      cs.insert(word);
    } else {
      throw Error(ErrorCode::parse,
                  "lexicon line " + std::to_string(line_no) + ": unknown category '" + category + "'");
    }
  }
  try {
    return ExceptionLexicon(std::move(glottal), std::move(loans), std::move(cs));
  } catch (const Error& e) {
    throw Error(ErrorCode::parse, e.what());
  }
}

ExceptionLexicon ExceptionLexicon::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const ExceptionLexicon& ExceptionLexicon::builtin() {
  static const ExceptionLexicon lex = parse(detail::builtin_lexicon_text());
  return lex;
}

std::string ExceptionLexicon::to_text() const {
  std::string out;
  for (const auto& w : glottal_) out += w + "\tglottal\n";
  for (const auto& w : loanwords_) out += w + "\tloanword\n";
  for (const auto& w : code_switch_) out += w + "\tcodeswitch\n";
  return out;
}

bool ExceptionLexicon::is_loanword(std::string_view token) const {
  return loanwords_.count(normalize_token(token)) > 0;
}

ExceptionLexicon ExceptionLexicon::with_glottal(std::string word) const {
  auto g = glottal_;
  g.insert(std::move(word));
  return ExceptionLexicon(std::move(g), loanwords_, code_switch_);
}

ExceptionLexicon ExceptionLexicon::with_loanword(std::string word) const {
  auto l = loanwords_;
  l.insert(std::move(word));
  return ExceptionLexicon(glottal_, std::move(l), code_switch_);
}

ExceptionLexicon ExceptionLexicon::with_code_switch(std::string word) const {
  auto c = code_switch_;
  c.insert(std::move(word));
  return ExceptionLexicon(glottal_, loanwords_, std::move(c));
}

NormalizationReport collapse_prosody(std::string_view token) {
  NormalizationReport report;
  report.original = std::string(token);
  const std::u32string cps = utf8::decode(token);
  std::u32string out;
  std::size_t i = 0;
  while (i < cps.size()) {
    std::size_t j = i;
    while (j < cps.size() && cps[j] == cps[i]) ++j;
    const std::size_t run = j - i;
    if (run >= 3 && is_prosodic(cps[i])) {
      out.push_back(cps[i]);
      report.collapsed_runs.push_back({i, run});
    } else {
      out.append(cps, i, run);
    }
    i = j;
  }
  report.normalized = utf8::encode(out);
  return report;
}

std::string restore(const NormalizationReport& report) {
  const std::u32string cps = utf8::decode(report.normalized);
  std::u32string out;
  std::size_t orig = 0;
  std::size_t next_run = 0;
  for (char32_t cp : cps) {
    if (next_run < report.collapsed_runs.size() && report.collapsed_runs[next_run].position == orig) {
      const std::size_t len = report.collapsed_runs[next_run].length;
      out.append(len, cp);
      orig += len;
      ++next_run;
    } else {
      out.push_back(cp);
      ++orig;
    }
  }
  return utf8::encode(out);
}

std::string normalize_token(std::string_view token) {
  return collapse_prosody(utf8::to_lower(token)).normalized;
}

NormalizationReport normalize(std::string_view token, const ExceptionLexicon& lex) {
  NormalizationReport report = collapse_prosody(utf8::to_lower(token));
  report.original = std::string(token);
  const std::string& n = report.normalized;
  if (lex.code_switch_vocab().count(n)) report.flags.insert(NormFlag::code_switch);
  if (lex.loanwords().count(n)) report.flags.insert(NormFlag::loanword);
  if (detect_negation_circumfix(n)) report.flags.insert(NormFlag::negation_circumfix);
  if (!n.empty() && (n.front() == '2' || n.back() == '2')) report.flags.insert(NormFlag::glottal_exception);
  return report;
}

bool detect_code_switch(std::string_view token, const ExceptionLexicon& lex) {
  return lex.code_switch_vocab().count(normalize_token(token)) > 0;
}

FilterResult filter_code_switch_sentences(const std::vector<Sentence>& sentences,
                                          const ExceptionLexicon& lex) {
  FilterResult result;
  for (const auto& s : sentences) {
    bool contaminated = false;
    for (const auto& t : s.surface()) {
      if (detect_code_switch(t.arabish, lex)) {
        contaminated = true;
        break;
      }
    }
    (contaminated ? result.removed : result.kept).push_back(s);
  }
  return result;
}

std::optional<CircumfixSplit> detect_negation_circumfix(std::string_view token) {
  for (const auto& prefix : negation_prefixes()) {
    if (token.substr(0, prefix.size()) != prefix) continue;
    for (const auto& suffix : negation_suffixes()) {
      if (token.size() < prefix.size() + suffix.size() + kMinNegatedStem) continue;
      if (token.substr(token.size() - suffix.size()) != suffix) continue;
      std::string_view stem = token.substr(prefix.size(), token.size() - prefix.size() - suffix.size());
      if (utf8::length(stem) < kMinNegatedStem) continue;
      return CircumfixSplit{prefix, std::string(stem), suffix};
    }
  }
  return std::nullopt;
}

std::string apply_glottal_policy(std::string_view arabic, const ExceptionLexicon& lex) {
  std::string out;
  std::size_t start = 0;
  while (true) {
    auto space = arabic.find(' ', start);
    std::string_view word =
        arabic.substr(start, space == std::string_view::npos ? std::string_view::npos : space - start);
    if (lex.glottal_words().count(std::string(word))) {
      out += word;
    } else {
      out += utf8::encode(glottal_word(utf8::decode(word)));
    }
    if (space == std::string_view::npos) break;
    out.push_back(' ');
    start = space + 1;
  }
  return out;
}

}  // namespace tarc
