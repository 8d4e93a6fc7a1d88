#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tarc/corpus.hpp"
#include "tarc/normalization.hpp"
#include "tarc/transliteration.hpp"

namespace tarc {

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Assignment of item indices to k folds after a seeded shuffle.
struct FoldPlan {
  int k = 10;
  std::uint64_t seed = kDefaultSeed;
  std::vector<int> assignments;  // item index -> fold id

  // Shuffled items dealt round-robin: fold sizes differ by at most one.
  static FoldPlan make(std::size_t n, int k, std::uint64_t seed);
  // Items sharing a group id land in the same fold. Groups are shuffled,
  // then each goes to the currently smallest fold.
  static FoldPlan grouped(const std::vector<std::size_t>& group_of, int k, std::uint64_t seed);

  std::vector<std::size_t> members(int fold) const;
  std::vector<std::size_t> sizes() const;
};

// Deterministic on every platform (std::shuffle is not).
void seeded_shuffle(std::vector<std::size_t>& items, std::uint64_t seed);

struct CvOptions {
  int k = 10;
  std::uint64_t seed = kDefaultSeed;
  TransducerConfig config;
  // Optional group id per pair (e.g. sentence index) for grouped folds.
  std::optional<std::vector<std::size_t>> groups;
  bool parallel = true;
};

struct CvReport {
  int k = 0;
  std::uint64_t seed = 0;
  TransducerConfig config;
  bool grouped = false;
  std::vector<double> per_fold;
  std::vector<std::size_t> fold_sizes;
  double mean = 0.0;
  std::vector<int> fold_of;     // pair index -> fold
  std::vector<bool> correct;    // pair index -> prediction matched gold
  std::vector<Morphemes> predictions;

  // Mean over folds of the accuracy restricted to pairs with mask[i] set.
  // Folds without such pairs are skipped.
  double subset_mean(const std::vector<bool>& mask) const;

  std::string to_text() const;
  std::string to_json() const;
};

// Throws Error(invalid_argument) when k < 2 or there are fewer pairs than folds.
CvReport kfold_cv(const std::vector<TrainingPair>& pairs, const CvOptions& options = {},
                  const MappingTable& table = MappingTable::builtin(),
                  const CliticInventory& inv = CliticInventory::builtin());

enum class BlockStatus { raw, automatic, corrected };

std::string_view to_string(BlockStatus s);
std::optional<BlockStatus> block_status_from(std::string_view name);

struct Block {
  int id = 0;
  std::vector<TokenRecord> records;
  BlockStatus status = BlockStatus::raw;
  // One entry per record once annotated; components carry their own morpheme.
  std::vector<Morphemes> auto_predictions;
  // Final (human-checked) morphemes, filled by ingest_corrections.
  std::vector<Morphemes> finals;
  std::optional<double> accuracy_after_correction;

  bool provisional() const { return status == BlockStatus::automatic; }
  // Indices of surface rows (standalone rows and range parents).
  std::vector<std::size_t> surface_rows() const;
  // Training pairs of a corrected block, one per surface token.
  std::vector<TrainingPair> pairs(const ExceptionLexicon& lex = ExceptionLexicon::builtin()) const;

  bool operator==(const Block&) const = default;
};

/// Cursor over an unannotated record stream.
class RecordStream {
 public:
  RecordStream() = default;
  explicit RecordStream(std::vector<TokenRecord> records, std::size_t cursor = 0);

  std::size_t remaining() const { return records_.size() - cursor_; }
  std::size_t cursor() const { return cursor_; }
  std::size_t size() const { return records_.size(); }
  const std::vector<TokenRecord>& records() const { return records_; }

  // Next `size` rows (fewer at the end); a cut inside a range group is moved
  // to the group end. Throws Error(state) when nothing remains and
  // Error(invalid_argument) when size is 0.
  Block make_block(std::size_t size, int id);

 private:
  std::vector<TokenRecord> records_;
  std::size_t cursor_ = 0;
};

// Fills Tra with predictions. Throws Error(state) unless the block is raw.
Block auto_annotate(Block block, const TransducerModel& model,
                    const ExceptionLexicon& lex = ExceptionLexicon::builtin());

/// Corrections keyed by row_key. Rows without a correction keep the automatic
/// value. Throws Error(state) unless the block is automatic and
/// Error(not_found) for a key outside the block.
Block ingest_corrections(Block block, const std::map<std::string, Morphemes>& corrections);

// Surface-token accuracy recomputed from stored predictions and finals.
double block_accuracy(const Block& block);

}  // namespace tarc
