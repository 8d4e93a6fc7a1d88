#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "tarc/code_system.hpp"
#include "tarc/corpus.hpp"
#include "tarc/normalization.hpp"
#include "tarc/segmentation.hpp"

namespace tarc {

namespace detail {
struct VocabTrie;
}  // namespace detail

using Morphemes = std::vector<std::string>;

struct TrainingPair {
  std::string arabish;
  Morphemes arabic_morphemes;
  bool loanword = false;

  bool operator==(const TrainingPair&) const = default;
};

/// Training pairs from annotated rows: code-switch sentences are dropped, one
/// pair per surface token whose transcription contains Arabic script.
/// Range tokens take their components' Tra as morphemes.
std::vector<TrainingPair> pairs_from_records(const std::vector<TokenRecord>& records,
                                             const ExceptionLexicon& lex = ExceptionLexicon::builtin());
// Same, also reporting the sentence of each pair.
std::vector<TrainingPair> pairs_from_records(const std::vector<TokenRecord>& records, const ExceptionLexicon& lex,
                                             std::vector<SentenceKey>* sentence_keys);

struct TransducerConfig {
  int n = 2;                    // LM order
  double k = 0.1;               // add-k for LM and channel
  std::size_t beam_width = 16;
  double lambda = 0.5;          // channel weight; the LM gets 1 - lambda

  bool operator==(const TransducerConfig&) const = default;
};

inline constexpr double kPassthroughLogProb = -10.0;

struct Alternative {
  Morphemes morphemes;
  double score = 0.0;
};

struct Prediction {
  Morphemes morphemes;
  double score = 0.0;
  std::vector<Alternative> alternatives;
  bool from_lexicon = false;
};

/// Morpheme n-gram model with add-k smoothing. Sequences are padded with
/// n-1 "<s>" and a final "</s>".
class MorphemeLm {
 public:
  MorphemeLm() = default;
  MorphemeLm(int order, double k);

  void add(const Morphemes& seq);
  void finalize();

  double logprob(const Morphemes& seq) const;
  double logprob(const std::vector<std::string>& context, const std::string& word) const;

  int order() const { return order_; }
  // Distinct morphemes seen in training (no boundary symbols).
  const std::vector<std::string>& vocabulary() const { return vocab_list_; }
  bool contains(const std::string& m) const;
  std::size_t vocab_size() const { return vocab_size_; }

  // (context, word) -> count; context joined by '\t'.
  const std::map<std::pair<std::string, std::string>, std::uint64_t>& counts() const { return counts_; }
  void set_count(const std::string& context, const std::string& word, std::uint64_t count);

 private:
  int order_ = 2;
  double k_ = 0.1;
  std::map<std::pair<std::string, std::string>, std::uint64_t> counts_;
  std::map<std::string, std::uint64_t> context_totals_;
  std::vector<std::string> vocab_list_;
  std::size_t vocab_size_ = 1;
};

/// One (segmentation, stem tiling) slice of a token's candidate space.
/// A derivation's channel score is accumulated left to right: starting from
/// `prefix_logprob`, then each stem unit, then each of `suffix_logprobs`.
struct CandidateFrame {
  Segmentation segmentation;
  Morphemes prefix_morphemes;
  Morphemes suffix_morphemes;
  double prefix_logprob = 0.0;
  std::vector<double> suffix_logprobs;
  std::optional<LatticeBranch> stem;
};

struct AlignmentStats {
  std::size_t pairs = 0;
  std::size_t aligned = 0;
  std::size_t oov_structure = 0;  // gold not reachable in the candidate space
};

class TransducerModel {
 public:
  // Throws Error(invalid_argument) on an empty training set or bad config.
  static TransducerModel train(const std::vector<TrainingPair>& pairs, const TransducerConfig& config = {},
                               const MappingTable& table = MappingTable::builtin(),
                               const CliticInventory& inv = CliticInventory::builtin());

  /// Lexicon shortcut for seen forms, exact lattice search otherwise.
  Prediction predict(std::string_view token, bool loanword = false) const;
  /// Lattice search only.
  Prediction search(std::string_view token, bool loanword = false) const;

  std::vector<CandidateFrame> frames(std::string_view token, bool loanword) const;
  double unit_logprob(const LatticePosition& pos, const std::string& candidate) const;
  double channel_prob(const GraphemeUnit& unit, const std::string& output) const;
  // log P(peel) for a clitic; circumfix events use kind neg_prefix and the
  // form "prefix+suffix".
  double clitic_logprob(const std::string& form, PartKind kind) const;
  double lm_logprob(const Morphemes& morphemes) const { return lm_.logprob(morphemes); }
  double combine(double channel, double lm) const;

  /// True if some derivation of the normalized token yields `gold` exactly.
  bool reachable(std::string_view token, const Morphemes& gold, bool loanword = false) const;

  const TransducerConfig& config() const { return config_; }
  const MappingTable& table() const { return table_; }
  const CliticInventory& inventory() const { return inv_; }
  const MorphemeLm& lm() const { return lm_; }
  const AlignmentStats& stats() const { return stats_; }
  std::size_t training_size() const { return stats_.pairs; }

  /// P(output | unit) for every unit seen in training.
  std::map<std::string, std::map<std::string, double>> channel_table() const;
  const std::map<std::string, std::map<Morphemes, std::uint64_t>>& lexicon() const { return lexicon_; }

  std::string serialize() const;
  static TransducerModel deserialize(std::string_view text);
  void save(const std::string& path) const;
  static TransducerModel load(const std::string& path);

  bool operator==(const TransducerModel& o) const { return serialize() == o.serialize(); }

 private:
  struct ChannelRow {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t total = 0;
  };
  struct CliticEvents {
    std::uint64_t opportunities = 0;
    std::uint64_t peeled = 0;
  };

  std::optional<std::vector<std::string>> align_stem(const LatticeBranch& branch, const std::string& target,
                                                     std::size_t& passthroughs) const;
  void count_pair(const TrainingPair& pair);
  void finalize();
  std::vector<std::pair<std::string, double>> vocab_hits(const LatticeBranch& branch, double init) const;
  std::vector<std::pair<std::string, double>> beam(const LatticeBranch& branch, double init,
                                                   std::size_t width) const;

  TransducerConfig config_;
  MappingTable table_;
  CliticInventory inv_;
  std::map<std::string, ChannelRow> channel_;
  std::map<std::pair<std::string, PartKind>, CliticEvents> clitic_events_;
  MorphemeLm lm_;
  std::map<std::string, std::map<Morphemes, std::uint64_t>> lexicon_;
  AlignmentStats stats_;

  // Derived on finalize().
  std::map<std::string, std::map<std::string, double>, std::less<>> unit_logprobs_;
  std::shared_ptr<const detail::VocabTrie> trie_;
};

// Throws Error(invalid_argument) on length mismatch. Empty lists score 1.
double token_accuracy(const std::vector<Morphemes>& predictions, const std::vector<Morphemes>& golds);

}  // namespace tarc
