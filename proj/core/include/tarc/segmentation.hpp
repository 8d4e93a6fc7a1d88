#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tarc/corpus.hpp"

namespace tarc {

enum class PartKind { proclitic, stem, enclitic, neg_prefix, neg_suffix };

std::string_view to_string(PartKind kind);
std::optional<PartKind> part_kind_from(std::string_view name);

struct Clitic {
  std::vector<std::string> latin_forms;
  std::string arabic;
  PartKind kind = PartKind::proclitic;
  std::string pos;
  std::string lemma;  // empty: the Arabic form doubles as lemma

  bool operator==(const Clitic&) const = default;
};

class CliticInventory {
 public:
  CliticInventory() = default;
  explicit CliticInventory(std::vector<Clitic> clitics);

  static CliticInventory parse(std::string_view text);
  static CliticInventory load(const std::string& path);
  static const CliticInventory& builtin();

  std::string to_text() const;

  const std::vector<Clitic>& clitics() const { return clitics_; }
  const Clitic* find(std::string_view latin, PartKind kind) const;
  std::vector<std::string> forms(PartKind kind) const;

  bool operator==(const CliticInventory& o) const { return clitics_ == o.clitics_; }

 private:
  std::vector<Clitic> clitics_;
};

struct SegmentPart {
  std::string latin;
  PartKind kind = PartKind::stem;

  bool operator==(const SegmentPart&) const = default;
  auto operator<=>(const SegmentPart&) const = default;
};

/// One way to cut a token into clitics and a stem. Negation prefix and suffix
/// surface as one particle row, so `row_count` can be smaller than the number
/// of parts.
struct Segmentation {
  std::vector<SegmentPart> parts;

  std::string joined() const;
  bool has_circumfix() const;
  std::size_t row_count() const;

  bool operator==(const Segmentation&) const = default;
  auto operator<=>(const Segmentation&) const = default;
};

inline constexpr std::size_t kMaxProclitics = 3;

/// All segmentations licensed by the inventory, the trivial one first, then
/// by ascending part count.
std::vector<Segmentation> segment(std::string_view token,
                                  const CliticInventory& inv = CliticInventory::builtin());

/// Joins morphemes into the fused surface transcription: tatweel at morpheme
/// joins is dropped, and a leading "P+S" particle wraps the rest as "P rest S".
std::string fuse_morphemes(const std::vector<std::string>& morphemes);

/// Parent row "lo-hi" followed by one component row per segmentation row.
/// `arabic_parts` has one entry per row (the circumfix particle counts once).
std::vector<TokenRecord> to_range_rows(const TokenRecord& record, const Segmentation& seg,
                                       const std::vector<std::string>& arabic_parts,
                                       const CliticInventory& inv = CliticInventory::builtin());

}  // namespace tarc
