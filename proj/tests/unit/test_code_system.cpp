#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>

#include "tarc/code_system.hpp"
#include "tarc/error.hpp"
#include "tarc/utf8.hpp"

using namespace tarc;

namespace {

// Every string spelled by the lattice, by explicit enumeration.
std::set<std::string> all_paths(const LatticeBranch& b) {
  std::set<std::string> out;
  std::function<void(std::size_t, std::string)> rec = [&](std::size_t i, std::string acc) {
    if (i == b.positions.size()) {
      out.insert(acc);
      return;
    }
    for (const auto& c : b.positions[i].candidates) rec(i + 1, acc + c);
  };
  rec(0, "");
  return out;
}

}  // namespace

TEST(Mapping, BuiltinHasBaseTableAndExtensions) {
  const auto& t = MappingTable::builtin();
  std::size_t base = 0;
  for (const auto& e : t.entries()) base += (e.loanword_only || e.final_only) ? 0 : 1;
  EXPECT_GE(t.entries().size(), 52u);
  EXPECT_TRUE(t.is_variant("ch"));
  EXPECT_TRUE(t.is_variant("7"));
  EXPECT_FALSE(t.is_variant("x"));
  EXPECT_GT(base, 45u);
}

TEST(Mapping, TextRoundTrip) {
  const auto& t = MappingTable::builtin();
  EXPECT_EQ(MappingTable::parse(t.to_text()), t);
}

TEST(Mapping, ParseErrors) {
  EXPECT_THROW(MappingTable::parse("a\tا\n"), Error);
  EXPECT_THROW(MappingTable::parse("a\tا\ta\tbogus\n"), Error);
  EXPECT_THROW(MappingTable::parse("\tا\ta\t-\n"), Error);
}

TEST(Mapping, Candidates) {
  const auto& t = MappingTable::builtin();
  auto c = t.candidates({"ch", UnitKind::mapped}, false, false);
  EXPECT_EQ(c, (std::vector<std::string>{"ش"}));
  // short vowels may stay unwritten
  c = t.candidates({"a", UnitKind::mapped}, false, false);
  EXPECT_NE(std::find(c.begin(), c.end(), ""), c.end());
  EXPECT_NE(std::find(c.begin(), c.end(), "ع"), c.end());
  // loanword-only entries are gated
  c = t.candidates({"g", UnitKind::mapped}, false, false);
  EXPECT_TRUE(c.empty());
  c = t.candidates({"g", UnitKind::mapped}, true, false);
  EXPECT_EQ(c, (std::vector<std::string>{"ڨ"}));
  // final-only entries are gated
  c = t.candidates({"ou", UnitKind::mapped}, false, false);
  EXPECT_EQ(std::find(c.begin(), c.end(), "وا"), c.end());
  c = t.candidates({"ou", UnitKind::mapped}, false, true);
  EXPECT_NE(std::find(c.begin(), c.end(), "وا"), c.end());
}

TEST(Mapping, Gemination) {
  const auto& t = MappingTable::builtin();
  EXPECT_TRUE(t.is_geminate("nn"));
  EXPECT_FALSE(t.is_geminate("aa"));
  EXPECT_FALSE(t.is_geminate("nm"));
  const auto c = t.candidates({"nn", UnitKind::geminate}, false, false);
  EXPECT_EQ(c, (std::vector<std::string>{"نّ"}));
}

TEST(Mapping, WithReturnsExtendedCopy) {
  const auto& t = MappingTable::builtin();
  const auto t2 = t.with({"x", "كس", "ks", false, false});
  EXPECT_TRUE(t2.is_variant("x"));
  EXPECT_FALSE(t.is_variant("x"));
}

TEST(Graphemes, TilingsCoverTheToken) {
  const auto segs = segment_graphemes("tchoufou", MappingTable::builtin());
  ASSERT_FALSE(segs.empty());
  for (const auto& s : segs) EXPECT_EQ(s.joined(), "tchoufou");
  // the greedy tiling comes first
  std::vector<std::string> first;
  for (const auto& u : segs.front().units) first.push_back(u.text);
  EXPECT_EQ(first, (std::vector<std::string>{"t", "ch", "ou", "f", "ou"}));
}

TEST(Lattice, ExpandEmptyThrows) {
  EXPECT_THROW(expand("", false), Error);
}

TEST(Lattice, UnknownCharactersPassThrough) {
  const auto lat = expand("x", false);
  ASSERT_EQ(lat.branches.size(), 1u);
  EXPECT_TRUE(lat.branches[0].positions[0].passthrough);
  EXPECT_TRUE(contains_path(lat, "x"));
}

TEST(Lattice, ContainsGoldFixtures) {
  EXPECT_TRUE(contains_path(expand("kifech", false), "كيفاش"));
  EXPECT_TRUE(contains_path(expand("tchoufou", false), "تشوفوا"));
  EXPECT_TRUE(contains_path(expand("konna", false), "كنّا"));
  EXPECT_TRUE(contains_path(expand("gawriya", true), "ڨاورية"));
  EXPECT_FALSE(contains_path(expand("gawriya", false), "ڨاورية"));
  EXPECT_TRUE(contains_path(expand("merci", false), "مرسي"));
  EXPECT_FALSE(contains_path(expand("kifech", false), "كيف"));
}

TEST(Lattice, PathCountMatchesEnumeration) {
  for (const char* tok : {"kifech", "3icha", "far7anin", "dieri"}) {
    for (const auto& b : expand(tok, false).branches) {
      std::size_t n = 0;
      std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == b.positions.size()) {
          ++n;
          return;
        }
        for (std::size_t c = 0; c < b.positions[i].candidates.size(); ++c) rec(i + 1);
      };
      rec(0);
      EXPECT_EQ(n, b.path_count());
      EXPECT_LE(all_paths(b).size(), n);
    }
  }
}

// contains_path agrees with brute-force enumeration on random tokens and
// random targets (half of them drawn from the lattice itself).
TEST(Lattice, ContainsPathMatchesEnumeration) {
  std::mt19937 rng(11);
  const std::string alphabet = "abdefhiklmnorstuwy23456789";
  for (int iter = 0; iter < 300; ++iter) {
    std::string tok;
    const int len = 1 + int(rng() % 5);
    for (int i = 0; i < len; ++i) tok.push_back(alphabet[rng() % alphabet.size()]);
    const auto lat = expand(tok, rng() % 2);
    std::set<std::string> paths;
    for (const auto& b : lat.branches) {
      auto p = all_paths(b);
      paths.insert(p.begin(), p.end());
    }
    std::vector<std::string> pool(paths.begin(), paths.end());
    for (int k = 0; k < 6; ++k) {
      std::string target = pool[rng() % pool.size()];
      if (k % 2) {
        auto cps = utf8::decode(target);
        if (!cps.empty()) cps.pop_back();
        target = utf8::encode(cps) + (k == 3 ? "ب" : "");
      }
      EXPECT_EQ(contains_path(lat, target), paths.count(target) > 0) << tok << " " << target;
    }
  }
}
