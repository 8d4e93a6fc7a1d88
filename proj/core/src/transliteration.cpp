#include "tarc/transliteration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include "tarc/error.hpp"
#include "tarc/utf8.hpp"

namespace tarc {

namespace detail {

/// Byte trie over the LM vocabulary.
struct VocabTrie {
  struct Node {
    std::map<unsigned char, int> next;
    int word = -1;
  };
  std::vector<Node> nodes{Node{}};
  std::vector<std::string> words;

  void insert(const std::string& w) {
    int cur = 0;
    for (unsigned char c : w) {
      auto it = nodes[cur].next.find(c);
      if (it == nodes[cur].next.end()) {
        nodes.push_back(Node{});
        const int id = static_cast<int>(nodes.size()) - 1;
        nodes[cur].next[c] = id;
        cur = id;
      } else {
        cur = it->second;
      }
    }
    if (nodes[cur].word < 0) {
      nodes[cur].word = static_cast<int>(words.size());
      words.push_back(w);
    }
  }

  int advance(int node, const std::string& s) const {
    for (unsigned char c : s) {
      auto it = nodes[node].next.find(c);
      if (it == nodes[node].next.end()) return -1;
      node = it->second;
    }
    return node;
  }
};

}  // namespace detail

namespace {

constexpr const char* kBos = "<s>";
constexpr const char* kEos = "</s>";
constexpr const char* kMagic = "tarc-transducer";
constexpr int kFormatVersion = 1;
// Upper bound on hypotheses kept when scores tie at the beam boundary.
constexpr std::size_t kTieCap = 1u << 14;

std::string join(const std::vector<std::string>& v, std::size_t from, std::size_t to, char sep) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) out.push_back(sep);
    out += v[i];
  }
  return out;
}

std::vector<std::string> split_tabs(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto p = s.find('\t', start);
    out.push_back(s.substr(start, p == std::string::npos ? std::string::npos : p - start));
    if (p == std::string::npos) return out;
    start = p + 1;
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool ranks_before(double sa, const Morphemes& a, double sb, const Morphemes& b) {
  if (sa != sb) return sa > sb;
  return a < b;
}

}  // namespace

// ---------------------------------------------------------------- pairs

std::vector<TrainingPair> pairs_from_records(const std::vector<TokenRecord>& records,
                                             const ExceptionLexicon& lex) {
  return pairs_from_records(records, lex, nullptr);
}

std::vector<TrainingPair> pairs_from_records(const std::vector<TokenRecord>& records, const ExceptionLexicon& lex,
                                             std::vector<SentenceKey>* sentence_keys) {
  std::vector<TrainingPair> pairs;
  const auto kept = filter_code_switch_sentences(reconstruct_sentences(records), lex).kept;
  std::set<SentenceKey> keep;
  for (const auto& s : kept) keep.insert(s.key);
  for (const auto& g : surface_groups(records)) {
    const TokenRecord& head = records[g.head];
    if (!keep.count(key_of(head))) continue;
    TrainingPair p;
    p.arabish = head.arabish;
    p.loanword = lex.is_loanword(head.arabish);
    if (g.component_count > 0) {
      for (std::size_t i = 1; i <= g.component_count; ++i) p.arabic_morphemes.push_back(records[g.head + i].tra);
    } else {
      p.arabic_morphemes.push_back(head.tra);
    }
    bool arabic = false;
    for (const auto& m : p.arabic_morphemes) arabic = arabic || utf8::contains_arabic(m);
    if (!arabic || normalize_token(p.arabish).empty()) continue;
    pairs.push_back(std::move(p));
    if (sentence_keys) sentence_keys->push_back(key_of(head));
  }
  return pairs;
}

// ---------------------------------------------------------------- LM

MorphemeLm::MorphemeLm(int order, double k) : order_(order), k_(k) {}

void MorphemeLm::add(const Morphemes& seq) {
  std::vector<std::string> padded(static_cast<std::size_t>(order_ - 1), kBos);
  padded.insert(padded.end(), seq.begin(), seq.end());
  padded.emplace_back(kEos);
  for (std::size_t i = static_cast<std::size_t>(order_ - 1); i < padded.size(); ++i) {
    ++counts_[{join(padded, i + 1 - static_cast<std::size_t>(order_), i, '\t'), padded[i]}];
  }
}

void MorphemeLm::set_count(const std::string& context, const std::string& word, std::uint64_t count) {
  counts_[{context, word}] = count;
}

void MorphemeLm::finalize() {
  context_totals_.clear();
  std::set<std::string> words;
  for (const auto& [key, c] : counts_) {
    context_totals_[key.first] += c;
    words.insert(key.second);
  }
  // +1 reserves mass for unseen morphemes.
  vocab_size_ = words.size() + 1;
  words.erase(kEos);
  vocab_list_.assign(words.begin(), words.end());
}

bool MorphemeLm::contains(const std::string& m) const {
  return std::binary_search(vocab_list_.begin(), vocab_list_.end(), m);
}

double MorphemeLm::logprob(const std::vector<std::string>& context, const std::string& word) const {
  const std::string ctx = join(context, 0, context.size(), '\t');
  auto it = counts_.find({ctx, word});
  const double c = it == counts_.end() ? 0.0 : static_cast<double>(it->second);
  auto tot = context_totals_.find(ctx);
  const double total = tot == context_totals_.end() ? 0.0 : static_cast<double>(tot->second);
  return std::log((c + k_) / (total + k_ * static_cast<double>(vocab_size_)));
}

double MorphemeLm::logprob(const Morphemes& seq) const {
  std::vector<std::string> padded(static_cast<std::size_t>(order_ - 1), kBos);
  padded.insert(padded.end(), seq.begin(), seq.end());
  padded.emplace_back(kEos);
  double lp = 0.0;
  const auto n = static_cast<std::size_t>(order_);
  for (std::size_t i = n - 1; i < padded.size(); ++i) {
    std::vector<std::string> ctx(padded.begin() + static_cast<std::ptrdiff_t>(i + 1 - n),
                                 padded.begin() + static_cast<std::ptrdiff_t>(i));
    lp += logprob(ctx, padded[i]);
  }
  return lp;
}

// ---------------------------------------------------------------- model

double TransducerModel::channel_prob(const GraphemeUnit& unit, const std::string& output) const {
  const auto cands = table_.all_candidates(unit);
  if (std::find(cands.begin(), cands.end(), output) == cands.end()) return 0.0;
  std::uint64_t count = 0;
  std::uint64_t total = 0;
  if (auto it = channel_.find(unit.text); it != channel_.end()) {
    total = it->second.total;
    if (auto c = it->second.counts.find(output); c != it->second.counts.end()) count = c->second;
  }
  const double k = config_.k;
  return (static_cast<double>(count) + k) / (static_cast<double>(total) + k * static_cast<double>(cands.size()));
}

double TransducerModel::unit_logprob(const LatticePosition& pos, const std::string& candidate) const {
  if (pos.passthrough) return kPassthroughLogProb;
  if (auto row = unit_logprobs_.find(pos.unit.text); row != unit_logprobs_.end()) {
    if (auto it = row->second.find(candidate); it != row->second.end()) return it->second;
  }
  return std::log(channel_prob(pos.unit, candidate));
}

double TransducerModel::clitic_logprob(const std::string& form, PartKind kind) const {
  std::uint64_t opp = 0;
  std::uint64_t peeled = 0;
  if (auto it = clitic_events_.find({form, kind}); it != clitic_events_.end()) {
    opp = it->second.opportunities;
    peeled = it->second.peeled;
  }
  const double k = config_.k;
  return std::log((static_cast<double>(peeled) + k) / (static_cast<double>(opp) + 2.0 * k));
}

double TransducerModel::combine(double channel, double lm) const {
  return config_.lambda * channel + (1.0 - config_.lambda) * lm;
}

std::vector<CandidateFrame> TransducerModel::frames(std::string_view token, bool loanword) const {
  const std::string tok = normalize_token(token);
  std::vector<CandidateFrame> out;
  for (const auto& seg : segment(tok, inv_)) {
    CandidateFrame base;
    base.segmentation = seg;
    std::optional<std::string> stem;
    const SegmentPart* suffix = nullptr;
    for (const auto& p : seg.parts) {
      if (p.kind == PartKind::neg_suffix) suffix = &p;
    }
    bool ok = true;
    for (const auto& p : seg.parts) {
      switch (p.kind) {
        case PartKind::stem:
          stem = p.latin;
          break;
        case PartKind::neg_suffix:
          break;
        case PartKind::neg_prefix: {
          const Clitic* pre = inv_.find(p.latin, PartKind::neg_prefix);
          const Clitic* suf = suffix ? inv_.find(suffix->latin, PartKind::neg_suffix) : nullptr;
          if (!pre || !suf) {
            ok = false;
            break;
          }
          base.prefix_morphemes.push_back(pre->arabic + "+" + suf->arabic);
          base.prefix_logprob += clitic_logprob(p.latin + "+" + suffix->latin, PartKind::neg_prefix);
          break;
        }
        case PartKind::proclitic:
        case PartKind::enclitic: {
          const Clitic* c = inv_.find(p.latin, p.kind);
          if (!c) {
            ok = false;
            break;
          }
          const double lp = clitic_logprob(p.latin, p.kind);
          if (stem) {
            base.suffix_morphemes.push_back(c->arabic);
            base.suffix_logprobs.push_back(lp);
          } else {
            base.prefix_morphemes.push_back(c->arabic);
            base.prefix_logprob += lp;
          }
          break;
        }
      }
    }
    if (!ok) continue;
    if (!stem) {
      out.push_back(std::move(base));
      continue;
    }
    for (const auto& gs : segment_graphemes(*stem, table_)) {
      CandidateFrame f = base;
      f.stem = expand_units(gs, loanword, table_);
      out.push_back(std::move(f));
    }
  }
  return out;
}

std::optional<std::vector<std::string>> TransducerModel::align_stem(const LatticeBranch& branch,
                                                                   const std::string& target,
                                                                   std::size_t& passthroughs) const {
  const std::size_t P = branch.positions.size();
  const std::size_t T = target.size();
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 2;
  // cost[i][j]: fewest passthrough units covering target[j:] with positions[i:].
  std::vector<std::vector<std::size_t>> cost(P + 1, std::vector<std::size_t>(T + 1, kInf));
  cost[P][T] = 0;
  std::vector<std::vector<std::size_t>> order(P);
  for (std::size_t i = 0; i < P; ++i) {
    const auto& cands = branch.positions[i].candidates;
    order[i].resize(cands.size());
    for (std::size_t c = 0; c < cands.size(); ++c) order[i][c] = c;
    // Longer outputs first: Arabic material is attributed to the leftmost unit.
    std::stable_sort(order[i].begin(), order[i].end(),
                     [&](std::size_t a, std::size_t b) { return cands[a].size() > cands[b].size(); });
  }
  for (std::size_t i = P; i-- > 0;) {
    const auto& pos = branch.positions[i];
    for (std::size_t j = 0; j <= T; ++j) {
      for (std::size_t c : order[i]) {
        const auto& cand = pos.candidates[c];
        if (j + cand.size() > T || target.compare(j, cand.size(), cand) != 0) continue;
        const std::size_t rest = cost[i + 1][j + cand.size()];
        if (rest == kInf) continue;
        cost[i][j] = std::min(cost[i][j], rest + (pos.passthrough ? 1 : 0));
      }
    }
  }
  if (cost[0][0] == kInf) return std::nullopt;
  passthroughs = cost[0][0];
  std::vector<std::string> outputs;
  std::size_t j = 0;
  for (std::size_t i = 0; i < P; ++i) {
    const auto& pos = branch.positions[i];
    for (std::size_t c : order[i]) {
      const auto& cand = pos.candidates[c];
      if (j + cand.size() > T || target.compare(j, cand.size(), cand) != 0) continue;
      const std::size_t rest = cost[i + 1][j + cand.size()];
      if (rest != kInf && rest + (pos.passthrough ? 1 : 0) == cost[i][j]) {
        outputs.push_back(cand);
        j += cand.size();
        break;
      }
    }
  }
  return outputs;
}

void TransducerModel::count_pair(const TrainingPair& pair) {
  const auto& gold = pair.arabic_morphemes;
  const auto all = frames(pair.arabish, pair.loanword);

  struct Best {
    std::size_t passthroughs;
    std::size_t frame;
    std::vector<std::string> outputs;
  };
  std::optional<Best> best;
  std::set<std::pair<std::string, PartKind>> opportunities;

  auto clitic_keys = [](const Segmentation& seg) {
    std::vector<std::pair<std::string, PartKind>> keys;
    std::string suffix;
    for (const auto& p : seg.parts) {
      if (p.kind == PartKind::neg_suffix) suffix = p.latin;
    }
    for (const auto& p : seg.parts) {
      if (p.kind == PartKind::proclitic || p.kind == PartKind::enclitic) keys.emplace_back(p.latin, p.kind);
      if (p.kind == PartKind::neg_prefix) keys.emplace_back(p.latin + "+" + suffix, PartKind::neg_prefix);
    }
    return keys;
  };

  for (std::size_t fi = 0; fi < all.size(); ++fi) {
    const auto& f = all[fi];
    for (auto& k : clitic_keys(f.segmentation)) opportunities.insert(std::move(k));
    if (best && best->passthroughs == 0) continue;
    if (!f.stem) {
      if (f.prefix_morphemes == gold) best = Best{0, fi, {}};
      continue;
    }
    const std::size_t np = f.prefix_morphemes.size();
    const std::size_t ns = f.suffix_morphemes.size();
    if (gold.size() != np + 1 + ns) continue;
    if (!std::equal(f.prefix_morphemes.begin(), f.prefix_morphemes.end(), gold.begin())) continue;
    if (!std::equal(f.suffix_morphemes.begin(), f.suffix_morphemes.end(), gold.begin() + static_cast<std::ptrdiff_t>(np + 1))) {
      continue;
    }
    const std::string& target = gold[np];
    if (target.empty()) continue;
    std::size_t pt = 0;
    auto outputs = align_stem(*f.stem, target, pt);
    if (!outputs) continue;
    if (!best || pt < best->passthroughs) best = Best{pt, fi, std::move(*outputs)};
  }

  for (const auto& k : opportunities) ++clitic_events_[k].opportunities;
  if (!best) {
    ++stats_.oov_structure;
    return;
  }
  ++stats_.aligned;
  const auto& f = all[best->frame];
  for (const auto& k : clitic_keys(f.segmentation)) ++clitic_events_[k].peeled;
  if (f.stem) {
    for (std::size_t i = 0; i < f.stem->positions.size(); ++i) {
      const auto& pos = f.stem->positions[i];
      if (pos.passthrough) continue;
      auto& row = channel_[pos.unit.text];
      ++row.counts[best->outputs[i]];
      ++row.total;
    }
  }
}

void TransducerModel::finalize() {
  lm_.finalize();

  std::set<GraphemeUnit, bool (*)(const GraphemeUnit&, const GraphemeUnit&)> units(
      [](const GraphemeUnit& a, const GraphemeUnit& b) { return a.text < b.text; });
  for (const auto& e : table_.entries()) {
    units.insert({e.arabish_variant, UnitKind::mapped});
    const auto cps = utf8::decode(e.arabish_variant);
    if (cps.size() == 1) {
      const std::string dbl = e.arabish_variant + e.arabish_variant;
      if (!table_.is_variant(dbl) && table_.is_geminate(dbl)) units.insert({dbl, UnitKind::geminate});
    }
  }
  for (const char* v : {"a", "e", "i", "o", "u", "é", "è"}) {
    if (!table_.is_variant(v)) units.insert({v, UnitKind::unmapped});
  }
  unit_logprobs_.clear();
  for (const auto& u : units) {
    auto& row = unit_logprobs_[u.text];
    for (const auto& c : table_.all_candidates(u)) row[c] = std::log(channel_prob(u, c));
  }

  auto trie = std::make_shared<detail::VocabTrie>();
  for (const auto& w : lm_.vocabulary()) {
    if (!w.empty()) trie->insert(w);
  }
  trie_ = std::move(trie);
}

TransducerModel TransducerModel::train(const std::vector<TrainingPair>& pairs, const TransducerConfig& config,
                                       const MappingTable& table, const CliticInventory& inv) {
  if (pairs.empty()) throw Error(ErrorCode::invalid_argument, "train: empty training set");
  if (config.n < 1 || !(config.k > 0.0) || config.beam_width < 1 || config.lambda < 0.0 || config.lambda > 1.0) {
    throw Error(ErrorCode::invalid_argument, "train: invalid transducer config");
  }
  TransducerModel m;
  m.config_ = config;
  m.table_ = table;
  m.inv_ = inv;
  m.lm_ = MorphemeLm(config.n, config.k);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    if (normalize_token(p.arabish).empty() || p.arabic_morphemes.empty()) {
      throw Error(ErrorCode::invalid_argument, "train: pair " + std::to_string(i) + " is empty");
    }
    ++m.lexicon_[normalize_token(p.arabish)][p.arabic_morphemes];
    m.lm_.add(p.arabic_morphemes);
  }
  m.stats_.pairs = pairs.size();
  for (const auto& p : pairs) m.count_pair(p);
  m.finalize();
  return m;
}

std::vector<std::pair<std::string, double>> TransducerModel::vocab_hits(const LatticeBranch& branch,
                                                                        double init) const {
  std::map<int, double> states{{0, init}};
  for (const auto& pos : branch.positions) {
    std::map<int, double> next;
    for (const auto& [node, score] : states) {
      for (const auto& c : pos.candidates) {
        const int to = trie_->advance(node, c);
        if (to < 0) continue;
        const double s = score + unit_logprob(pos, c);
        auto [it, inserted] = next.emplace(to, s);
        if (!inserted && s > it->second) it->second = s;
      }
    }
    states = std::move(next);
    if (states.empty()) break;
  }
  std::vector<std::pair<std::string, double>> hits;
  for (const auto& [node, score] : states) {
    if (trie_->nodes[static_cast<std::size_t>(node)].word >= 0) {
      hits.emplace_back(trie_->words[static_cast<std::size_t>(trie_->nodes[static_cast<std::size_t>(node)].word)], score);
    }
  }
  return hits;
}

std::vector<std::pair<std::string, double>> TransducerModel::beam(const LatticeBranch& branch, double init,
                                                                  std::size_t width) const {
  std::vector<std::pair<std::string, double>> hyps{{std::string(), init}};
  for (const auto& pos : branch.positions) {
    std::unordered_map<std::string, double> next;
    for (const auto& [prefix, score] : hyps) {
      for (const auto& c : pos.candidates) {
        const double s = score + unit_logprob(pos, c);
        auto [it, inserted] = next.emplace(prefix + c, s);
        if (!inserted && s > it->second) it->second = s;
      }
    }
    hyps.assign(next.begin(), next.end());
    std::sort(hyps.begin(), hyps.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (hyps.size() > width) {
      const double threshold = hyps[width - 1].second;
      std::size_t keep = width;
      while (keep < hyps.size() && keep < kTieCap && hyps[keep].second == threshold) ++keep;
      hyps.resize(keep);
    }
  }
  return hyps;
}

Prediction TransducerModel::search(std::string_view token, bool loanword) const {
  if (normalize_token(token).empty()) throw Error(ErrorCode::invalid_argument, "predict: empty token");
  std::map<Morphemes, double> best;
  auto offer = [&](Morphemes m, double ch) {
    auto [it, inserted] = best.emplace(std::move(m), ch);
    if (!inserted && ch > it->second) it->second = ch;
  };
  for (const auto& f : frames(token, loanword)) {
    if (!f.stem) {
      double ch = f.prefix_logprob;
      for (double s : f.suffix_logprobs) ch += s;
      offer(f.prefix_morphemes, ch);
      continue;
    }
    auto hits = vocab_hits(*f.stem, f.prefix_logprob);
    // Unseen stems share one LM value, so the best one is the best-channel
    // string outside the vocabulary; +2 leaves room for the empty string.
    auto top = beam(*f.stem, f.prefix_logprob, config_.beam_width + hits.size() + 2);
    hits.insert(hits.end(), top.begin(), top.end());
    for (const auto& [stem, score] : hits) {
      if (stem.empty()) continue;
      double ch = score;
      for (double s : f.suffix_logprobs) ch += s;
      Morphemes m = f.prefix_morphemes;
      m.push_back(stem);
      m.insert(m.end(), f.suffix_morphemes.begin(), f.suffix_morphemes.end());
      offer(std::move(m), ch);
    }
  }

  std::vector<Alternative> scored;
  scored.reserve(best.size());
  for (auto& [m, ch] : best) scored.push_back({m, combine(ch, lm_.logprob(m))});
  std::sort(scored.begin(), scored.end(), [](const Alternative& a, const Alternative& b) {
    return ranks_before(a.score, a.morphemes, b.score, b.morphemes);
  });
  Prediction p;
  if (scored.empty()) {
    p.score = -std::numeric_limits<double>::infinity();  // no non-empty reading
    return p;
  }
  p.morphemes = scored.front().morphemes;
  p.score = scored.front().score;
  const std::size_t n_alt = std::min(scored.size(), config_.beam_width);
  p.alternatives.assign(scored.begin() + 1, scored.begin() + static_cast<std::ptrdiff_t>(n_alt));
  return p;
}

Prediction TransducerModel::predict(std::string_view token, bool loanword) const {
  const std::string tok = normalize_token(token);
  if (tok.empty()) throw Error(ErrorCode::invalid_argument, "predict: empty token");
  auto it = lexicon_.find(tok);
  if (it == lexicon_.end()) return search(tok, loanword);

  std::vector<std::pair<Morphemes, std::uint64_t>> entries(it->second.begin(), it->second.end());
  std::uint64_t total = 0;
  for (const auto& e : entries) total += e.second;
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  Prediction p;
  p.from_lexicon = true;
  p.morphemes = entries.front().first;
  p.score = std::log(static_cast<double>(entries.front().second) / static_cast<double>(total));
  for (std::size_t i = 1; i < entries.size() && i < config_.beam_width; ++i) {
    p.alternatives.push_back(
        {entries[i].first, std::log(static_cast<double>(entries[i].second) / static_cast<double>(total))});
  }
  return p;
}

bool TransducerModel::reachable(std::string_view token, const Morphemes& gold, bool loanword) const {
  for (const auto& f : frames(token, loanword)) {
    if (!f.stem) {
      if (f.prefix_morphemes == gold) return true;
      continue;
    }
    const std::size_t np = f.prefix_morphemes.size();
    const std::size_t ns = f.suffix_morphemes.size();
    if (gold.size() != np + 1 + ns) continue;
    if (!std::equal(f.prefix_morphemes.begin(), f.prefix_morphemes.end(), gold.begin())) continue;
    if (!std::equal(f.suffix_morphemes.begin(), f.suffix_morphemes.end(), gold.begin() + static_cast<std::ptrdiff_t>(np + 1))) {
      continue;
    }
    if (!gold[np].empty() && contains_path(*f.stem, gold[np])) return true;
  }
  return false;
}

std::map<std::string, std::map<std::string, double>> TransducerModel::channel_table() const {
  std::map<std::string, std::map<std::string, double>> out;
  for (const auto& [unit, row] : channel_) {
    const bool gem = !table_.is_variant(unit) && table_.is_geminate(unit);
    const GraphemeUnit u{unit, gem ? UnitKind::geminate : (table_.is_variant(unit) ? UnitKind::mapped : UnitKind::unmapped)};
    for (const auto& c : table_.all_candidates(u)) out[unit][c] = channel_prob(u, c);
  }
  return out;
}

// ---------------------------------------------------------------- serialization
//
// Text container, one section per component, counts only; probabilities are
// recomputed on load:
//   tarc-transducer 1
//   config <n> <k> <beam_width> <lambda>
//   stats <pairs> <aligned> <oov_structure>
//   mapping <lines>      followed by that many mapping-file lines
//   clitics <lines>      followed by that many clitic-file lines
//   channel <lines>      unit TAB output TAB count
//   clitic_events <lines>  form TAB kind TAB opportunities TAB peeled
//   lm <lines>           count TAB context... TAB word   (context = n-1 fields)
//   lexicon <lines>      arabish TAB count TAB morpheme...

std::string TransducerModel::serialize() const {
  std::ostringstream out;
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "config " << config_.n << ' ' << format_double(config_.k) << ' ' << config_.beam_width << ' '
      << format_double(config_.lambda) << '\n';
  out << "stats " << stats_.pairs << ' ' << stats_.aligned << ' ' << stats_.oov_structure << '\n';

  auto section = [&](const char* name, const std::string& body) {
    const auto lines = static_cast<std::size_t>(std::count(body.begin(), body.end(), '\n'));
    out << name << ' ' << lines << '\n' << body;
  };
  std::string mapping;
  {
    // Drop the header comment line.
    const std::string text = table_.to_text();
    mapping = text.substr(text.find('\n') + 1);
  }
  section("mapping", mapping);
  section("clitics", inv_.to_text());

  std::string body;
  for (const auto& [unit, row] : channel_) {
    for (const auto& [o, c] : row.counts) body += unit + '\t' + o + '\t' + std::to_string(c) + '\n';
  }
  section("channel", body);

  body.clear();
  for (const auto& [key, ev] : clitic_events_) {
    body += key.first + '\t' + std::string(to_string(key.second)) + '\t' + std::to_string(ev.opportunities) + '\t' +
            std::to_string(ev.peeled) + '\n';
  }
  section("clitic_events", body);

  body.clear();
  for (const auto& [key, c] : lm_.counts()) {
    body += std::to_string(c) + '\t' + key.first + '\t' + key.second + '\n';
  }
  section("lm", body);

  body.clear();
  for (const auto& [form, seqs] : lexicon_) {
    for (const auto& [seq, c] : seqs) {
      body += form + '\t' + std::to_string(c);
      for (const auto& m : seq) body += '\t' + m;
      body += '\n';
    }
  }
  section("lexicon", body);
  return out.str();
}

TransducerModel TransducerModel::deserialize(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto fail = [](const std::string& why) { return Error(ErrorCode::parse, "model: " + why); };
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw fail("unexpected end of input");
    return line;
  };

  {
    std::istringstream h(next_line());
    std::string magic;
    int version = 0;
    h >> magic >> version;
    if (magic != kMagic) throw fail("not a transducer model");
    if (version != kFormatVersion) throw fail("unsupported format version " + std::to_string(version));
  }
  TransducerModel m;
  {
    std::istringstream h(next_line());
    std::string tag;
    h >> tag >> m.config_.n >> m.config_.k >> m.config_.beam_width >> m.config_.lambda;
    if (tag != "config" || !h) throw fail("bad config line");
  }
  {
    std::istringstream h(next_line());
    std::string tag;
    h >> tag >> m.stats_.pairs >> m.stats_.aligned >> m.stats_.oov_structure;
    if (tag != "stats" || !h) throw fail("bad stats line");
  }
  auto section = [&](const char* name) {
    std::istringstream h(next_line());
    std::string tag;
    std::size_t n = 0;
    h >> tag >> n;
    if (tag != name || !h) throw fail(std::string("expected section ") + name);
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < n; ++i) lines.push_back(next_line());
    return lines;
  };
  auto to_u64 = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      auto v = std::stoull(s, &used);
      if (used != s.size()) throw fail("bad count '" + s + "'");
      return static_cast<std::uint64_t>(v);
    } catch (const std::logic_error&) {
      throw fail("bad count '" + s + "'");
    }
  };
  auto joined = [](const std::vector<std::string>& lines) {
    std::string s;
    for (const auto& l : lines) s += l + '\n';
    return s;
  };

  m.table_ = MappingTable::parse(joined(section("mapping")));
  m.inv_ = CliticInventory::parse(joined(section("clitics")));
  for (const auto& l : section("channel")) {
    auto f = split_tabs(l);
    if (f.size() != 3) throw fail("bad channel line");
    auto& row = m.channel_[f[0]];
    const auto c = to_u64(f[2]);
    row.counts[f[1]] = c;
    row.total += c;
  }
  for (const auto& l : section("clitic_events")) {
    auto f = split_tabs(l);
    auto kind = f.size() == 4 ? part_kind_from(f[1]) : std::nullopt;
    if (!kind) throw fail("bad clitic_events line");
    m.clitic_events_[{f[0], *kind}] = {to_u64(f[2]), to_u64(f[3])};
  }
  m.lm_ = MorphemeLm(m.config_.n, m.config_.k);
  const auto ctx_fields = static_cast<std::size_t>(m.config_.n - 1);
  for (const auto& l : section("lm")) {
    auto f = split_tabs(l);
    // n == 1 stores an empty context field.
    const std::size_t expect = 2 + std::max<std::size_t>(ctx_fields, 1);
    if (f.size() != expect) throw fail("bad lm line");
    std::vector<std::string> ctx(f.begin() + 1, f.end() - 1);
    m.lm_.set_count(ctx_fields == 0 ? std::string() : join(ctx, 0, ctx.size(), '\t'), f.back(), to_u64(f[0]));
  }
  for (const auto& l : section("lexicon")) {
    auto f = split_tabs(l);
    if (f.size() < 3) throw fail("bad lexicon line");
    Morphemes seq(f.begin() + 2, f.end());
    m.lexicon_[f[0]][seq] = to_u64(f[1]);
  }
  m.finalize();
  return m;
}

void TransducerModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  out << serialize();
}

TransducerModel TransducerModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

double token_accuracy(const std::vector<Morphemes>& predictions, const std::vector<Morphemes>& golds) {
  if (predictions.size() != golds.size()) {
    throw Error(ErrorCode::invalid_argument, "token_accuracy: " + std::to_string(predictions.size()) +
                                                 " predictions for " + std::to_string(golds.size()) + " golds");
  }
  if (golds.empty()) return 1.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) hits += predictions[i] == golds[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(golds.size());
}

}  // namespace tarc
