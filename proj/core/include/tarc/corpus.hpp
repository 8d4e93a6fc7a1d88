#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace tarc {

/// Column W of a corpus row: a single index (lo == hi) or an inclusive range
/// lo-hi with lo < hi that announces a segmented token.
struct TokenIndex {
  int lo = 1;
  int hi = 1;

  static TokenIndex single(int w) { return {w, w}; }
  static TokenIndex range(int lo, int hi) { return {lo, hi}; }

  bool is_range() const { return hi > lo; }
  int width() const { return hi - lo + 1; }
  std::string str() const;

  // Throws Error(parse) on anything that is not a canonical positive integer
  // or "lo-hi" with lo < hi.
  static TokenIndex parse(std::string_view text);

  auto operator<=>(const TokenIndex&) const = default;
};

inline constexpr std::string_view kMissing = "-";

/// One corpus row (columns A-L).
struct TokenRecord {
  std::string cor;
  std::string textco;  // YYMMDD
  int par = 1;
  TokenIndex w;
  std::string arabish;
  std::string tra;
  std::string ita;
  std::string lem;
  std::string pos;
  std::string var;
  std::string age;
  std::string gen;

  bool operator==(const TokenRecord&) const = default;
};

struct SentenceKey {
  std::string cor;
  std::string textco;
  int par = 1;

  auto operator<=>(const SentenceKey&) const = default;
};

SentenceKey key_of(const TokenRecord& r);

// "cor:textco:par:w", used to address a row inside a block.
std::string row_key(const TokenRecord& r);

/// A reconstructed sentence. `tokens` holds the index-level rows in strictly
/// increasing w (components replace their range parent); `ranges` holds the
/// range parents.
struct Sentence {
  SentenceKey key;
  std::vector<TokenRecord> tokens;
  std::vector<TokenRecord> ranges;

  /// Top-level tokens: each range parent in place of its components.
  std::vector<TokenRecord> surface() const;
  /// All rows in corpus order (parent followed by its components).
  std::vector<TokenRecord> rows() const;

  bool operator==(const Sentence&) const = default;
};

inline constexpr std::string_view kTsvHeader =
    "Cor\tTextco\tPar\tW\tArabiS\tTra\tIta\tLem\tPOS\tVar\tAge\tGen";

bool is_valid_age(std::string_view age);
bool is_valid_gen(std::string_view gen);

// Field-level checks for one record; returns a message for the first
// violated invariant.
std::optional<std::string> record_problem(const TokenRecord& r);

// Throws Error(parse) with the 1-based line number of the first problem.
std::vector<TokenRecord> parse_tsv(std::string_view bytes);

// Throws Error(invalid_argument) naming the first offending record index.
std::string write_tsv(const std::vector<TokenRecord>& records);

std::vector<TokenRecord> read_tsv_file(const std::string& path);
void write_tsv_file(const std::string& path, const std::vector<TokenRecord>& records);

// Checks the range grouping rule: each "lo-hi" row is immediately followed by
// rows lo..hi. Returns the index of the first bad record, if any.
std::optional<std::size_t> find_range_violation(const std::vector<TokenRecord>& records);

// Components' ArabiS concatenate to the parent's (case and hyphens ignored).
// A component written "X + Y" is a circumfix wrapping the other components.
bool range_surface_consistent(const TokenRecord& parent,
                              const std::vector<TokenRecord>& components);

// Throws Error(invalid_argument) on duplicate (key, w).
std::vector<Sentence> reconstruct_sentences(const std::vector<TokenRecord>& records);

/// Groups rows into surface units: a standalone row, or a range parent with
/// its components. Order is preserved.
struct SurfaceGroup {
  std::size_t head = 0;           // index of the surface row
  std::size_t component_count = 0;
};
std::vector<SurfaceGroup> surface_groups(const std::vector<TokenRecord>& records);

}  // namespace tarc
