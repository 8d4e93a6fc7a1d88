#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tarc/code_system.hpp"
#include "tarc/transliteration.hpp"

namespace tarc::testing {

// Every string spelled by one lattice branch.
inline std::set<std::string> enumerate_paths(const LatticeBranch& b) {
  std::set<std::string> out;
  std::string acc;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == b.positions.size()) {
      out.insert(acc);
      return;
    }
    for (const auto& c : b.positions[i].candidates) {
      const std::size_t n = acc.size();
      acc += c;
      rec(i + 1);
      acc.resize(n);
    }
  };
  rec(0);
  return out;
}

inline std::set<std::string> enumerate_paths(const Lattice& lat) {
  std::set<std::string> out;
  for (const auto& b : lat.branches) {
    auto p = enumerate_paths(b);
    out.insert(p.begin(), p.end());
  }
  return out;
}

struct OracleResult {
  Morphemes morphemes;
  double score = -INFINITY;
  std::size_t derivations = 0;
};

// Brute force over every derivation of every frame: best channel score per
// morpheme sequence, then the combined score, ties broken by the sequence.
inline OracleResult exhaustive_argmax(const TransducerModel& model, const std::string& token, bool loanword) {
  std::map<Morphemes, double> best;
  std::size_t n = 0;
  auto offer = [&](Morphemes m, double ch) {
    ++n;
    auto [it, ins] = best.emplace(std::move(m), ch);
    if (!ins && ch > it->second) it->second = ch;
  };
  for (const auto& f : model.frames(token, loanword)) {
    if (!f.stem) {
      double ch = f.prefix_logprob;
      for (double s : f.suffix_logprobs) ch += s;
      offer(f.prefix_morphemes, ch);
      continue;
    }
    const auto& pos = f.stem->positions;
    std::string acc;
    std::function<void(std::size_t, double)> rec = [&](std::size_t i, double ch) {
      if (i == pos.size()) {
        if (acc.empty()) return;
        for (double s : f.suffix_logprobs) ch += s;
        Morphemes m = f.prefix_morphemes;
        m.push_back(acc);
        m.insert(m.end(), f.suffix_morphemes.begin(), f.suffix_morphemes.end());
        offer(std::move(m), ch);
        return;
      }
      for (const auto& c : pos[i].candidates) {
        const std::size_t len = acc.size();
        acc += c;
        rec(i + 1, ch + model.unit_logprob(pos[i], c));
        acc.resize(len);
      }
    };
    rec(0, f.prefix_logprob);
  }
  OracleResult r;
  r.derivations = n;
  for (const auto& [m, ch] : best) {
    const double s = model.combine(ch, model.lm_logprob(m));
    if (s > r.score || (s == r.score && m < r.morphemes)) {
      r.score = s;
      r.morphemes = m;
    }
  }
  return r;
}

// Random Latin token built from at most `max_units` table variants.
inline std::string random_token(std::mt19937_64& rng, std::size_t max_units) {
  static const std::vector<std::string> units = {"a",  "e",  "i",  "ou", "o", "b",  "t",  "th", "j", "7", "5",
                                                 "kh", "d",  "dh", "r",  "z", "s",  "ch", "3",  "4", "gh", "f",
                                                 "9",  "k",  "l",  "m",  "n", "h",  "w",  "y",  "2", "g",  "6",
                                                 "8",  "é",  "x",  "mm", "ll"};
  const std::size_t n = 1 + rng() % max_units;
  std::string tok;
  for (std::size_t i = 0; i < n; ++i) tok += units[rng() % units.size()];
  return tok;
}

/// Arabic-to-Arabish generator with known emission weights.
struct SyntheticChannel {
  struct Grapheme {
    std::string arabic;
    std::vector<std::pair<std::string, double>> emissions;  // variant, weight
  };
  std::vector<Grapheme> graphemes = {
      {"ب", {{"b", 0.8}, {"p", 0.2}}},  {"ت", {{"t", 1.0}}},
      {"ط", {{"6", 0.6}, {"t", 0.4}}},  {"ح", {{"7", 0.8}, {"h", 0.2}}},
      {"ه", {{"8", 0.3}, {"h", 0.7}}},  {"خ", {{"5", 0.7}, {"kh", 0.3}}},
      {"ق", {{"9", 0.8}, {"q", 0.2}}},  {"ك", {{"k", 1.0}}},
      {"ل", {{"l", 1.0}}},              {"ر", {{"r", 1.0}}},
      {"م", {{"m", 1.0}}},              {"ن", {{"n", 1.0}}},
      {"ع", {{"3", 1.0}}},              {"ف", {{"f", 1.0}}},
      {"س", {{"s", 0.8}, {"c", 0.2}}},  {"ص", {{"s", 1.0}}},
      {"ج", {{"j", 1.0}}},              {"ز", {{"z", 1.0}}},
      {"د", {{"d", 1.0}}},              {"ش", {{"ch", 0.7}, {"sh", 0.3}}},
      {"ا", {{"a", 0.6}, {"e", 0.4}}},  {"ي", {{"i", 0.7}, {"y", 0.3}}},
  };

  struct Sample {
    TrainingPair pair;
    std::vector<std::pair<std::size_t, std::string>> events;  // grapheme index, variant
  };

  // Emits one spelling; cross-boundary digraphs and doubled letters are
  // rejected so the spelling tiles back into exactly the emitted units.
  Sample emit(const std::vector<std::size_t>& word, std::mt19937_64& rng, const MappingTable& table) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    while (true) {
      Sample s;
      std::string latin;
      std::string arabic;
      bool ok = true;
      for (std::size_t gi : word) {
        const auto& g = graphemes[gi];
        double x = u(rng);
        std::string v = g.emissions.back().first;
        for (const auto& [var, w] : g.emissions) {
          if (x < w) {
            v = var;
            break;
          }
          x -= w;
        }
        if (!latin.empty()) {
          const std::string pair{latin.back(), v.front()};
          if (table.is_variant(pair) || latin.back() == v.front()) ok = false;
        }
        latin += v;
        arabic += g.arabic;
        s.events.push_back({gi, v});
      }
      if (!ok) continue;
      s.pair = {latin, {arabic}, false};
      return s;
    }
  }
};

}  // namespace tarc::testing
