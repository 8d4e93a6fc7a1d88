#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tarc/corpus.hpp"

namespace tarc {

struct Category {
  std::string name;
  std::vector<std::string> meanings;
  std::vector<std::string> keywords;  // empty for an unfilled stub

  bool stub() const { return keywords.empty(); }
  bool operator==(const Category&) const = default;
};

// name<TAB>meanings<TAB>keywords, lists comma-separated. Throws Error(parse).
std::vector<Category> parse_categories(std::string_view text);
std::vector<Category> load_categories(const std::string& path);
const std::vector<Category>& builtin_categories();
std::string categories_to_text(const std::vector<Category>& categories);

struct AuthorProfile {
  std::optional<std::string> gender;
  std::optional<std::string> birth_or_age;
  std::optional<std::string> city;

  bool operator==(const AuthorProfile&) const = default;
};

struct RawText {
  std::string source_code;
  std::string date;
  std::string body;
  AuthorProfile profile;

  bool operator==(const RawText&) const = default;
};

/// Dump format: "key: value" header lines (source, date, gender, age, city),
/// a blank line, then the body. Throws Error(parse) on an empty body.
RawText parse_raw_text(std::string_view dump);
std::string format_raw_text(const RawText& text);

/// Where raw texts come from. The shipped source reads dump files; a crawler
/// or site extractor plugs in here.
class TextSource {
 public:
  virtual ~TextSource() = default;
  virtual std::optional<RawText> next() = 0;
};

class DirectorySource : public TextSource {
 public:
  // Files are visited in name order.
  explicit DirectorySource(const std::string& dir);
  std::optional<RawText> next() override;

 private:
  std::vector<std::string> files_;
  std::size_t pos_ = 0;
};

struct CategoryMatch {
  std::string category;
  std::vector<std::string> keywords;  // distinct, in category order

  bool operator==(const CategoryMatch&) const = default;
};

// Whole words (letter/digit runs), case-insensitive, after prosody collapse.
std::vector<CategoryMatch> match_categories(const RawText& text, const std::vector<Category>& categories);

class CityTable {
 public:
  CityTable() = default;
  explicit CityTable(std::map<std::string, std::string> codes);

  static CityTable parse(std::string_view text);
  static const CityTable& builtin();

  // Case-insensitive; a value that already is a code maps to itself.
  std::optional<std::string> code(std::string_view city) const;

 private:
  std::map<std::string, std::string> codes_;  // lowercased name -> code
};

// "10-25", "25-35", "35-50", "50-90"; left-closed, 90 included.
std::optional<std::string> age_bucket(int age);

struct Metadata {
  std::string gen = "-";
  std::string age = "-";
  std::string var = "-";
  std::vector<std::string> warnings;

  bool operator==(const Metadata&) const = default;
};

/// Age may be a number or a bucket string already. Values outside [0,120]
/// map to "-" with a warning.
Metadata extract_metadata(const AuthorProfile& profile, const CityTable& cities = CityTable::builtin());

// "YYYY-MM-DD" or "YYMMDD" -> "YYMMDD". Throws Error(parse).
std::string textco_from_date(std::string_view date);

/// Unannotated corpus rows for one text: paragraphs (blank-line separated)
/// become Par, tokens are letter/digit/apostrophe runs or single punctuation
/// marks. Tra, Ita, Lem and POS are "-".
std::vector<TokenRecord> tokenize_raw_text(const RawText& text, const CityTable& cities = CityTable::builtin());

}  // namespace tarc
