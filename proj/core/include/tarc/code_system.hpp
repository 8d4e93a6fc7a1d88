#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace tarc {

/// One Arabish variant <-> Arabic grapheme pair of the code-system table.
struct MappingEntry {
  std::string arabish_variant;
  std::string arabic_grapheme;
  std::string ipa;
  bool loanword_only = false;
  bool final_only = false;

  bool operator==(const MappingEntry&) const = default;
};

enum class UnitKind {
  mapped,    // a variant listed in the table
  geminate,  // a doubled consonant variant, e.g. "nn"
  unmapped,  // a single character the table does not know
};

struct GraphemeUnit {
  std::string text;
  UnitKind kind = UnitKind::mapped;

  bool operator==(const GraphemeUnit&) const = default;
};

struct GraphemeSegmentation {
  std::vector<GraphemeUnit> units;

  std::string joined() const;
  bool operator==(const GraphemeSegmentation&) const = default;
};

/// Immutable once built; the default instance reproduces the shipped data
/// file.
class MappingTable {
 public:
  MappingTable() = default;
  explicit MappingTable(std::vector<MappingEntry> entries);

  static MappingTable parse(std::string_view text);
  static MappingTable load(const std::string& path);
  static const MappingTable& builtin();

  std::string to_text() const;

  const std::vector<MappingEntry>& entries() const { return entries_; }

  // Returns a copy with `entry` appended.
  MappingTable with(MappingEntry entry) const;

  bool is_variant(std::string_view unit) const;
  bool is_geminate(std::string_view unit) const;

  /// Arabic candidates for one unit, in table order, deduplicated. Latin
  /// short vowels also admit "" (unwritten vowel). Empty when nothing applies.
  std::vector<std::string> candidates(const GraphemeUnit& unit, bool loanword, bool is_final) const;

  /// Every candidate the unit can ever produce, ignoring the loanword and
  /// final gates. Channel rows are distributions over this set.
  std::vector<std::string> all_candidates(const GraphemeUnit& unit) const;

  bool operator==(const MappingTable& other) const { return entries_ == other.entries_; }

 private:
  void index();

  std::vector<MappingEntry> entries_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_variant_;
};

bool is_short_vowel(std::string_view unit);

/// All tilings of the lowercased token into grapheme units, longest unit
/// first at each position.
std::vector<GraphemeSegmentation> segment_graphemes(std::string_view token,
                                                    const MappingTable& table);

struct LatticePosition {
  GraphemeUnit unit;
  std::vector<std::string> candidates;
  bool passthrough = false;  // no table candidate; the unit is copied verbatim

  bool operator==(const LatticePosition&) const = default;
};

/// Positions for one grapheme segmentation.
struct LatticeBranch {
  GraphemeSegmentation segmentation;
  std::vector<LatticePosition> positions;

  std::size_t path_count() const;
};

/// Union of the branches of every grapheme segmentation of a token.
struct Lattice {
  std::vector<LatticeBranch> branches;

  std::size_t path_count() const;
};

LatticeBranch expand_units(const GraphemeSegmentation& seg, bool loanword,
                           const MappingTable& table);

// Throws Error(invalid_argument) on an empty token.
Lattice expand(std::string_view token, bool loanword,
               const MappingTable& table = MappingTable::builtin());

bool contains_path(const LatticeBranch& branch, std::string_view arabic);
bool contains_path(const Lattice& lattice, std::string_view arabic);

}  // namespace tarc
