#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "tarc/corpus.hpp"
#include "tarc/error.hpp"

using namespace tarc;
using tarc::testing::data_path;
using tarc::testing::make_record;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream b;
  b << in.rdbuf();
  return b.str();
}

std::string header() { return std::string(kTsvHeader) + "\n"; }

}  // namespace

TEST(TokenIndex, ParsesSinglesAndRanges) {
  EXPECT_EQ(TokenIndex::parse("7"), TokenIndex::single(7));
  EXPECT_EQ(TokenIndex::parse("3-4"), TokenIndex::range(3, 4));
  EXPECT_EQ(TokenIndex::range(14, 15).str(), "14-15");
  EXPECT_EQ(TokenIndex::range(14, 15).width(), 2);
  for (const char* bad : {"", "0", "07", "4-3", "3-3", "a", "3-", "-3", "1.5"}) {
    EXPECT_THROW(TokenIndex::parse(bad), Error) << bad;
  }
}

TEST(Tsv, Table3ParsesToTenRows) {
  const auto rows = read_tsv_file(data_path("table3.tsv"));
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0].arabish, "kifech");
  EXPECT_EQ(rows[0].tra, "كيفاش");
  EXPECT_EQ(rows[2].w, TokenIndex::range(3, 4));
  EXPECT_EQ(rows[9].tra, "؟");
  EXPECT_EQ(rows[9].var, "Bnz");
  EXPECT_EQ(rows[9].age, "25-35");
}

TEST(Tsv, RoundTripIsByteIdentical) {
  const std::string bytes = slurp(data_path("fixtures.tsv"));
  EXPECT_EQ(write_tsv(parse_tsv(bytes)), bytes);
}

TEST(Tsv, RoundTripRandomRecords) {
  std::mt19937 rng(7);
  const std::vector<std::string> words = {"kifech", "tchoufou", "3icha", "bnin", "w", "?", "ma + ch"};
  const std::vector<std::string> arabic = {"كيفاش", "عيشة", "و", "؟", "ما+ش"};
  std::vector<TokenRecord> recs;
  for (int i = 0; i < 200; ++i) {
    auto r = make_record("c" + std::to_string(i % 7), "2001" + std::to_string(10 + i % 18), 1 + i % 3,
                         TokenIndex::single(1 + i), words[rng() % words.size()], arabic[rng() % arabic.size()]);
    r.age = (rng() % 2) ? "35-50" : "-";
    r.gen = (rng() % 2) ? "F" : "-";
    recs.push_back(r);
  }
  const std::string out = write_tsv(recs);
  EXPECT_EQ(parse_tsv(out), recs);
  EXPECT_EQ(write_tsv(parse_tsv(out)), out);
}

TEST(Tsv, ReportsLineOfFirstProblem) {
  const std::string good = "3fE\t150902\t2\t1\tkifech\tكيفاش\tcome\tكيفاش\tadv\tBnz\t25-35\tM\n";
  try {
    parse_tsv(header() + good + "3fE\t150902\t2\t2\tx\ty\tz\tl\tp\tBnz\t20-30\tM\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_tsv(good), Error);  // no header
  EXPECT_THROW(parse_tsv(header() + "a\tb\n"), Error);
  EXPECT_THROW(parse_tsv(header() + "3fE\t151302\t2\t1\tx\ty\tz\tl\tp\tBnz\t-\t-\n"), Error);  // month 13
  EXPECT_THROW(parse_tsv(header() + "3fE\t150902\t2\t1\tx\ty\tz\tl\tp\tBnz\t-\tX\n"), Error);
}

TEST(Tsv, RangeMustBeFollowedByComponents) {
  const std::string parent = "3fE\t150902\t2\t3-4\tl3icha\tالعيشة\tla vita\tعيشة\tnoun\tBnz\t25-35\tM\n";
  const std::string c1 = "3fE\t150902\t2\t3\tl\tالـ\t-\tالـ\tdet\tBnz\t25-35\tM\n";
  const std::string c2 = "3fE\t150902\t2\t4\t3icha\tعيشة\t-\tعيشة\tnoun\tBnz\t25-35\tM\n";
  EXPECT_NO_THROW(parse_tsv(header() + parent + c1 + c2));
  EXPECT_THROW(parse_tsv(header() + parent + c1), Error);
  EXPECT_THROW(parse_tsv(header() + parent + c2 + c1), Error);
}

TEST(Tsv, WriteRejectsInvalidRecords) {
  auto r = make_record("c", "150902", 1, TokenIndex::single(1), "x", "");
  EXPECT_THROW(write_tsv({r}), Error);
  r.tra = "a\tb";
  EXPECT_THROW(write_tsv({r}), Error);
}

TEST(Sentences, Table3HasEightIndexRowsAndSixSurfaceTokens) {
  const auto sentences = reconstruct_sentences(read_tsv_file(data_path("table3.tsv")));
  ASSERT_EQ(sentences.size(), 1u);
  const auto& s = sentences[0];
  ASSERT_EQ(s.tokens.size(), 8u);
  for (std::size_t i = 0; i < s.tokens.size(); ++i) EXPECT_EQ(s.tokens[i].w, TokenIndex::single(int(i) + 1));
  EXPECT_EQ(s.ranges.size(), 2u);
  const auto surface = s.surface();
  ASSERT_EQ(surface.size(), 6u);
  EXPECT_EQ(surface[2].arabish, "l3icha");
  EXPECT_EQ(surface[3].arabish, "fil");
  EXPECT_EQ(s.rows(), read_tsv_file(data_path("table3.tsv")));
}

TEST(Sentences, DuplicateIndexIsRejected) {
  auto a = make_record("c", "150902", 1, TokenIndex::single(1), "x", "y");
  EXPECT_THROW(reconstruct_sentences({a, a}), Error);
}

TEST(Sentences, SurfaceGroups) {
  const auto rows = read_tsv_file(data_path("table3.tsv"));
  const auto groups = surface_groups(rows);
  ASSERT_EQ(groups.size(), 6u);
  EXPECT_EQ(groups[2].head, 2u);
  EXPECT_EQ(groups[2].component_count, 2u);
  EXPECT_EQ(groups[4].head, 8u);
}

TEST(RangeSurface, ComponentsConcatenateToParent) {
  const auto rows = read_tsv_file(data_path("fixtures.tsv"));
  const auto groups = surface_groups(rows);
  int checked = 0;
  for (const auto& g : groups) {
    if (g.component_count == 0) continue;
    std::vector<TokenRecord> comps(rows.begin() + long(g.head) + 1, rows.begin() + long(g.head + 1 + g.component_count));
    EXPECT_TRUE(range_surface_consistent(rows[g.head], comps)) << rows[g.head].arabish;
    ++checked;
  }
  EXPECT_EQ(checked, 3);
  auto parent = make_record("c", "150902", 1, TokenIndex::range(1, 2), "fil", "فالـ");
  auto f = make_record("c", "150902", 1, TokenIndex::single(1), "f", "فـ");
  auto el = make_record("c", "150902", 1, TokenIndex::single(2), "el", "الـ");
  EXPECT_FALSE(range_surface_consistent(parent, {f, el}));
}

TEST(RowKey, Format) {
  auto r = make_record("3fE", "150902", 2, TokenIndex::range(3, 4), "l3icha", "العيشة");
  EXPECT_EQ(row_key(r), "3fE:150902:2:3-4");
}
