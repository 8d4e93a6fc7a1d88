// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "tarc/annotation_service.hpp"
#include "tarc/code_system.hpp"
#include "tarc/corpus.hpp"
#include "tarc/evaluation.hpp"
#include "tarc/normalization.hpp"
#include "tarc/segmentation.hpp"
#include "tarc/transliteration.hpp"
#include "tarc/utf8.hpp"

using namespace tarc;
using namespace tarc::testing;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

int failures = 0;

void run(const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && s > limit_s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "took %.2fs, limit %.0fs", s, limit_s);
    o.fail(buf);
  }
  if (!o.ok) ++failures;
  std::printf("%s  %-34s %7.2fs  %s\n", o.ok ? "PASS" : "FAIL", name.c_str(), s, o.detail.c_str());
  std::fflush(stdout);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream b;
  b << in.rdbuf();
  return b.str();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome table1_coverage() {
  Outcome o;
  std::size_t n = 0;
  for (const auto& e : MappingTable::builtin().entries()) {
    ++n;
    if (!contains_path(expand(e.arabish_variant, e.loanword_only), e.arabic_grapheme)) {
      o.fail(e.arabish_variant + " -> " + e.arabic_grapheme + " missing");
    }
  }
  if (o.ok) o.detail = std::to_string(n) + " pairs";
  return o;
}

Outcome gold_recovery() {
  Outcome o;
  const auto model = TransducerModel::train(gold_pairs());
  for (const auto& g : gold_tokens()) {
    if (!model.reachable(g.arabish, g.morphemes, g.loanword)) o.fail(g.arabish + " outside the candidate space");
    if (model.predict(g.arabish, g.loanword).morphemes != g.morphemes) o.fail(g.arabish + " mispredicted");
  }
  if (o.ok) o.detail = std::to_string(gold_tokens().size()) + " tokens";
  return o;
}

// Synthetic corpus: a random Arabic lexicon spelled through SyntheticChannel.
struct Synthetic {
  SyntheticChannel channel;
  std::vector<TrainingPair> pairs;
  std::vector<std::size_t> word_of;
  std::map<std::size_t, std::size_t> grapheme_count;

  static Synthetic make(std::size_t words, std::size_t n, std::uint64_t seed) {
    Synthetic s;
    std::mt19937_64 rng(seed);
    const auto& table = MappingTable::builtin();
    std::set<std::vector<std::size_t>> seen;
    std::vector<std::vector<std::size_t>> lex;
    const std::size_t G = s.channel.graphemes.size();
    while (lex.size() < words) {
      std::vector<std::size_t> w;
      const std::size_t len = 2 + rng() % 4;
      while (w.size() < len) {
        const std::size_t g = rng() % G;
        if (!w.empty() && w.back() == g) continue;
        w.push_back(g);
      }
      if (seen.insert(w).second) lex.push_back(w);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t wi = rng() % lex.size();
      auto sample = s.channel.emit(lex[wi], rng, table);
      for (const auto& [g, v] : sample.events) ++s.grapheme_count[g];
      s.pairs.push_back(std::move(sample.pair));
      s.word_of.push_back(wi);
    }
    return s;
  }

  // Spellings that only one lexicon word produced.
  std::vector<bool> unambiguous() const {
    std::map<std::string, std::set<std::size_t>> sources;
    for (std::size_t i = 0; i < pairs.size(); ++i) sources[pairs[i].arabish].insert(word_of[i]);
    std::vector<bool> out;
    for (const auto& p : pairs) out.push_back(sources[p.arabish].size() == 1);
    return out;
  }

  // P(grapheme | variant) implied by the generator weights and the sampled
  // grapheme frequencies.
  std::map<std::string, std::map<std::string, double>> posterior() const {
    std::map<std::string, std::map<std::string, double>> joint;
    for (std::size_t g = 0; g < channel.graphemes.size(); ++g) {
      const auto it = grapheme_count.find(g);
      if (it == grapheme_count.end()) continue;
      for (const auto& [v, w] : channel.graphemes[g].emissions) {
        joint[v][channel.graphemes[g].arabic] += w * static_cast<double>(it->second);
      }
    }
    for (auto& [v, row] : joint) {
      double z = 0;
      for (const auto& [_, x] : row) z += x;
      for (auto& [_, x] : row) x /= z;
    }
    return joint;
  }
};

Outcome oracle_equivalence() {
  Outcome o;
  auto pairs = gold_pairs();
  const auto syn = Synthetic::make(60, 400, 7);
  pairs.insert(pairs.end(), syn.pairs.begin(), syn.pairs.end());
  const auto model = TransducerModel::train(pairs);
  std::mt19937_64 rng(kDefaultSeed);
  std::size_t derivations = 0, lexicon_hits = 0, contains_checks = 0;
  for (int i = 0; i < 1000 && o.ok; ++i) {
    const std::string tok = random_token(rng, 6);
    const bool loan = rng() % 5 == 0;
    const auto want = exhaustive_argmax(model, tok, loan);
    derivations += want.derivations;
    const auto got = model.search(tok, loan);
    if (got.morphemes != want.morphemes || got.score != want.score) {
      o.fail("search differs on " + tok + ": " + fuse_morphemes(got.morphemes) + " vs " + fuse_morphemes(want.morphemes));
    }
    if (model.lexicon().count(normalize_token(tok))) {
      ++lexicon_hits;
    } else if (model.predict(tok, loan).morphemes != want.morphemes) {
      o.fail("predict differs on " + tok);
    }

    const auto lat = expand(tok, loan);
    const auto paths = enumerate_paths(lat);
    std::vector<std::string> pool(paths.begin(), paths.end());
    for (int k = 0; k < 8; ++k) {
      std::string target = pool[rng() % pool.size()];
      if (k % 2) {
        auto cps = utf8::decode(target);
        if (!cps.empty()) cps.erase(cps.begin() + static_cast<std::ptrdiff_t>(rng() % cps.size()));
        if (k == 3) cps.push_back(U'ب');
        target = utf8::encode(cps);
      }
      ++contains_checks;
      if (contains_path(lat, target) != (paths.count(target) > 0)) o.fail("contains_path differs on " + tok);
    }
  }
  if (o.ok) {
    o.detail = std::to_string(derivations) + " derivations, " + std::to_string(contains_checks) +
               " contains_path checks, " + std::to_string(lexicon_hits) + " lexicon tokens (search only)";
  }
  return o;
}

Outcome synthetic_cv() {
  Outcome o;
  const auto syn = Synthetic::make(400, 6000, kDefaultSeed);
  CvOptions opt;
  opt.k = 10;
  const auto report = kfold_cv(syn.pairs, opt);
  const auto [lo, hi] = std::minmax_element(report.fold_sizes.begin(), report.fold_sizes.end());
  if (report.fold_sizes.size() != 10 || *hi - *lo > 1) o.fail("fold sizes differ by more than one");
  const auto mask = syn.unambiguous();
  const double acc = report.subset_mean(mask);
  if (acc < 0.95) o.fail(fmt("unambiguous accuracy %.4f < 0.95", acc));

  const auto model = TransducerModel::train(syn.pairs);
  const auto got = model.channel_table();
  const auto want = syn.posterior();
  double linf = 0.0;
  for (const auto& [v, row] : want) {
    const auto it = got.find(v);
    if (it == got.end()) {
      o.fail("no channel row for " + v);
      continue;
    }
    std::set<std::string> outs;
    for (const auto& [a, _] : row) outs.insert(a);
    for (const auto& [a, _] : it->second) outs.insert(a);
    for (const auto& a : outs) {
      const double p = it->second.count(a) ? it->second.at(a) : 0.0;
      const double q = row.count(a) ? row.at(a) : 0.0;
      linf = std::max(linf, std::abs(p - q));
    }
  }
  if (linf > 0.05) o.fail(fmt("channel L-inf %.4f > 0.05", linf));
  const std::size_t n_unamb = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  if (o.ok) {
    o.detail = fmt("%.0f pairs, mean %.4f, unambiguous %.4f", double(syn.pairs.size()), report.mean, acc) +
               fmt(" (%.0f), L-inf %.4f", double(n_unamb), linf);
  }
  return o;
}

Outcome invariants() {
  Outcome o;
  const auto& lex = ExceptionLexicon::builtin();
  if (collapse_prosody("bniiiiin").normalized != "bnin") o.fail("bniiiiin");
  const auto neg = detect_negation_circumfix("manajemnech");
  if (!neg || neg->prefix != "ma" || neg->stem != "najemne" || neg->suffix != "ch") o.fail("manajemnech");
  if (apply_glottal_policy("أسئلة", lex) != "أسئلة") o.fail("أسئلة not preserved");

  std::mt19937_64 rng(kDefaultSeed);
  const std::string latin = "abcehikmnost37";
  const std::vector<std::string> arabic = {"ا", "أ", "إ", "آ", "ء", "ئ", "ؤ", "ب", "س", "ل", "ة", " "};
  for (int i = 0; i < 5000; ++i) {
    std::string tok;
    const std::size_t len = rng() % 14;
    for (std::size_t k = 0; k < len; ++k) tok += std::string(1 + (rng() % 5 == 0 ? rng() % 4 : 0), latin[rng() % latin.size()]);
    const auto once = collapse_prosody(tok);
    if (collapse_prosody(once.normalized).normalized != once.normalized) o.fail("prosody not idempotent: " + tok);
    if (restore(once) != tok) o.fail("prosody not restorable: " + tok);
    if (auto s = detect_negation_circumfix(once.normalized)) {
      if (s->prefix + s->stem + s->suffix != once.normalized) o.fail("circumfix concatenation: " + tok);
    }
    for (const auto& seg : segment(once.normalized.empty() ? "a" : once.normalized)) {
      if (seg.joined() != (once.normalized.empty() ? "a" : once.normalized)) o.fail("segmentation concatenation: " + tok);
    }
    std::string ar;
    for (std::size_t k = 0, n = rng() % 8; k < n; ++k) ar += arabic[rng() % arabic.size()];
    const auto g = apply_glottal_policy(ar, lex);
    if (apply_glottal_policy(g, lex) != g) o.fail("glottal policy not idempotent");
  }
  return o;
}

Outcome tsv_round_trip() {
  Outcome o;
  const std::string bytes = slurp(data_path("table3.tsv"));
  if (write_tsv(parse_tsv(bytes)) != bytes) o.fail("table3.tsv bytes differ");
  std::mt19937_64 rng(kDefaultSeed);
  const std::vector<std::string> words = {"kifech", "tchoufou", "3icha", "bnin", "w", "?", "ma + ch", "merci"};
  const std::vector<std::string> arabic = {"كيفاش", "عيشة", "و", "؟", "ما+ش", "-"};
  const std::vector<std::string> ages = {"-", "10-25", "25-35", "35-50", "50-90"};
  std::vector<TokenRecord> recs;
  for (int i = 0; i < 200; ++i) {
    auto r = make_record("g" + std::to_string(i / 20), "1901" + std::to_string(10 + (i / 20) % 18), 1 + (i % 20) / 10,
                         TokenIndex::single(1 + i % 10), words[rng() % words.size()], arabic[rng() % arabic.size()]);
    r.age = ages[rng() % ages.size()];
    r.gen = (rng() % 3 == 0) ? "F" : "M";
    r.var = "Bnz";
    recs.push_back(r);
  }
  const std::string out = write_tsv(recs);
  if (parse_tsv(out) != recs) o.fail("generated records differ after parse");
  if (write_tsv(parse_tsv(out)) != out) o.fail("generated bytes differ");
  return o;
}

Outcome block_workflow() {
  Outcome o;
  namespace fs = std::filesystem;
  const auto dir = (fs::temp_directory_path() / "tarc_acceptance_store").string();
  fs::remove_all(dir);

  std::vector<TokenRecord> stream;
  std::mt19937_64 rng(kDefaultSeed);
  const auto& gold = gold_tokens();
  for (std::size_t i = 0; i < 12345; ++i) {
    const auto& g = gold[rng() % gold.size()];
    stream.push_back(make_record("blk", "190101", 1 + static_cast<int>(i / 25), TokenIndex::single(1 + static_cast<int>(i % 25)),
                                 g.arabish, "-"));
  }
  auto store = CorpusStore::create(dir, read_tsv_file(data_path("fixtures.tsv")), stream);

  std::vector<std::size_t> sizes;
  while (store->remaining() > 0) sizes.push_back(store->make_block(5000).size);
  std::vector<TokenRecord> joined;
  for (const auto& s : store->list_blocks()) {
    const auto b = store->get_block(s.id);
    joined.insert(joined.end(), b.records.begin(), b.records.end());
  }
  if (sizes != std::vector<std::size_t>{5000, 5000, 2345}) o.fail("block sizes are not 5000/5000/2345");
  if (joined != stream) o.fail("blocks do not partition the stream");

  store->annotate_block(1);
  const auto auto1 = store->get_block(1);
  std::map<std::string, Morphemes> fixes;
  const auto rows = auto1.surface_rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i % 10 < 3) fixes[row_key(auto1.records[rows[i]])] = {auto1.records[rows[i]].tra + "ي"};
  }
  const auto s1 = store->post_corrections(1, fixes);
  if (!s1.accuracy || *s1.accuracy != 0.70) o.fail(fmt("accuracy %.17g, expected 0.70", s1.accuracy.value_or(-1)));

  const std::size_t v1 = store->training_size();
  const auto m2 = store->retrain();
  const std::size_t p1 = store->get_block(1).pairs().size();
  if (m2.training_size != v1 + p1) o.fail("growth after block 1 is not its pair count");

  store->annotate_block(2);
  store->post_corrections(2, {});
  const auto m3 = store->retrain();
  const std::size_t p2 = store->get_block(2).pairs().size();
  if (m3.training_size != m2.training_size + p2) o.fail("growth after block 2 is not its pair count");
  const auto growth = store->metrics().growth;
  if (growth.size() != 3) o.fail("expected three model versions");
  store.reset();
  fs::remove_all(dir);
  if (o.ok) {
    o.detail = "sizes 5000/5000/2345, accuracy 0.70, growth " + std::to_string(v1) + "->" +
               std::to_string(m2.training_size) + "->" + std::to_string(m3.training_size);
  }
  return o;
}

}  // namespace

int main() {
  run("Code table coverage", 1, table1_coverage);
  run("Gold-fixture recovery", 5, gold_recovery);
  run("Oracle equivalence", 60, oracle_equivalence);
  run("Synthetic CV", 300, synthetic_cv);
  run("Prosody/negation/glottal", 0, invariants);
  run("TSV round trip", 0, tsv_round_trip);
  run("Block workflow", 0, block_workflow);
  // this binary links the core library only
  run("Core only (no secondary build)", 0, [] { return Outcome{true, "linked against tarc::core alone"}; });
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
