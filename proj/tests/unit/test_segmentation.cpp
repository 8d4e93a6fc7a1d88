#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "tarc/error.hpp"
#include "tarc/segmentation.hpp"

using namespace tarc;

namespace {

bool has(const std::vector<Segmentation>& segs, std::vector<SegmentPart> parts) {
  return std::find(segs.begin(), segs.end(), Segmentation{std::move(parts)}) != segs.end();
}

}  // namespace

TEST(Inventory, BuiltinAndRoundTrip) {
  const auto& inv = CliticInventory::builtin();
  ASSERT_NE(inv.find("l", PartKind::proclitic), nullptr);
  EXPECT_EQ(inv.find("l", PartKind::proclitic)->arabic, "الـ");
  EXPECT_EQ(inv.find("f", PartKind::proclitic)->lemma, "في");
  EXPECT_EQ(inv.find("l", PartKind::enclitic), nullptr);
  EXPECT_EQ(CliticInventory::parse(inv.to_text()), inv);
  EXPECT_THROW(CliticInventory::parse("l\tالـ\tnowhere\tdet\n"), Error);
}

TEST(Segment, TrivialFirst) {
  const auto segs = segment("kifech");
  ASSERT_FALSE(segs.empty());
  EXPECT_EQ(segs.front(), (Segmentation{{{"kifech", PartKind::stem}}}));
  for (const auto& s : segs) EXPECT_EQ(s.joined(), "kifech");
}

TEST(Segment, FixtureSegmentations) {
  EXPECT_TRUE(has(segment("l3icha"), {{"l", PartKind::proclitic}, {"3icha", PartKind::stem}}));
  EXPECT_TRUE(has(segment("fil"), {{"f", PartKind::proclitic}, {"il", PartKind::proclitic}}));
  EXPECT_TRUE(has(segment("manajemnech"),
                  {{"ma", PartKind::neg_prefix}, {"najemne", PartKind::stem}, {"ch", PartKind::neg_suffix}}));
}

TEST(Segment, ConcatenationProperty) {
  std::mt19937 rng(9);
  const std::string alphabet = "abcefhiklmnost3";
  for (int i = 0; i < 400; ++i) {
    std::string tok;
    const int len = 1 + int(rng() % 9);
    for (int k = 0; k < len; ++k) tok.push_back(alphabet[rng() % alphabet.size()]);
    const auto segs = segment(tok);
    ASSERT_FALSE(segs.empty());
    EXPECT_EQ(segs.front().parts.size(), 1u);
    for (std::size_t s = 0; s < segs.size(); ++s) {
      EXPECT_EQ(segs[s].joined(), tok);
      if (s) EXPECT_LE(segs[s - 1].parts.size(), segs[s].parts.size());
      std::size_t stems = 0;
      for (const auto& p : segs[s].parts) stems += p.kind == PartKind::stem;
      EXPECT_LE(stems, 1u);
    }
  }
}

TEST(Fuse, JoinsMorphemes) {
  EXPECT_EQ(fuse_morphemes({"الـ", "عيشة"}), "العيشة");
  EXPECT_EQ(fuse_morphemes({"فـ", "الـ"}), "فالـ");
  EXPECT_EQ(fuse_morphemes({"ما+ش", "نجمنا"}), "ما نجمناش");
  EXPECT_EQ(fuse_morphemes({"كيفاش"}), "كيفاش");
  EXPECT_EQ(fuse_morphemes({}), "");
}

TEST(RangeRows, ReproducesTable3) {
  const auto rows = read_tsv_file(tarc::testing::data_path("table3.tsv"));
  // l3icha
  auto out = to_range_rows(rows[2], Segmentation{{{"l", PartKind::proclitic}, {"3icha", PartKind::stem}}},
                           {"الـ", "عيشة"});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], rows[2]);
  EXPECT_EQ(out[1], rows[3]);
  EXPECT_EQ(out[2], rows[4]);
  // fil
  out = to_range_rows(rows[5], Segmentation{{{"f", PartKind::proclitic}, {"il", PartKind::proclitic}}},
                      {"فـ", "الـ"});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], rows[5]);
  EXPECT_EQ(out[1], rows[6]);
  EXPECT_EQ(out[2], rows[7]);
}

TEST(RangeRows, ReproducesNegation) {
  const auto rows = read_tsv_file(tarc::testing::data_path("fixtures.tsv"));
  const auto it = std::find_if(rows.begin(), rows.end(), [](const TokenRecord& r) { return r.arabish == "manajemnech"; });
  ASSERT_NE(it, rows.end());
  const auto out = to_range_rows(
      *it, Segmentation{{{"ma", PartKind::neg_prefix}, {"najemne", PartKind::stem}, {"ch", PartKind::neg_suffix}}},
      {"ما+ش", "نجمنا"});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], *it);
  EXPECT_EQ(out[1], *(it + 1));
  EXPECT_EQ(out[2], *(it + 2));
}

TEST(RangeRows, RejectsBadInput) {
  const auto rows = read_tsv_file(tarc::testing::data_path("table3.tsv"));
  EXPECT_THROW(to_range_rows(rows[0], Segmentation{{{"kifech", PartKind::stem}}}, {"كيفاش"}), Error);
  EXPECT_THROW(to_range_rows(rows[2], Segmentation{{{"l", PartKind::proclitic}, {"3icha", PartKind::stem}}}, {"الـ"}),
               Error);
}
