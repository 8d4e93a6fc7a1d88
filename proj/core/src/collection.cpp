#include "tarc/collection.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "detail/builtin_data.hpp"
#include "tarc/corpus.hpp"
#include "tarc/error.hpp"
#include "tarc/normalization.hpp"
#include "tarc/utf8.hpp"

namespace tarc {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto p = s.find(',', start);
    std::string item = trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

std::string join_list(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += v[i];
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool is_word_char(char32_t c) { return utf8::is_latin_letter(c) || (c >= U'0' && c <= U'9'); }

std::set<std::string> words_of(std::string_view text) {
  std::set<std::string> out;
  std::u32string cur;
  auto flush = [&] {
    if (!cur.empty()) out.insert(normalize_token(utf8::encode(cur)));
    cur.clear();
  };
  for (char32_t c : utf8::decode(text)) {
    if (is_word_char(c)) {
      cur.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

}  // namespace

std::vector<Category> parse_categories(std::string_view text) {
  std::vector<Category> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw Error(ErrorCode::parse, "categories line " + std::to_string(line_no) + ": expected 3 tab-separated fields");
    }
    Category c;
    c.name = trim(std::string_view(line).substr(0, t1));
    if (c.name.empty()) throw Error(ErrorCode::parse, "categories line " + std::to_string(line_no) + ": empty name");
    c.meanings = split_list(std::string_view(line).substr(t1 + 1, t2 - t1 - 1));
    c.keywords = split_list(std::string_view(line).substr(t2 + 1));
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Category> load_categories(const std::string& path) { return parse_categories(read_file(path)); }

const std::vector<Category>& builtin_categories() {
  static const std::vector<Category> cats = parse_categories(detail::builtin_categories_text());
  return cats;
}

std::string categories_to_text(const std::vector<Category>& categories) {
  std::string out;
  for (const auto& c : categories) out += c.name + '\t' + join_list(c.meanings) + '\t' + join_list(c.keywords) + '\n';
  return out;
}

RawText parse_raw_text(std::string_view dump) {
  RawText t;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < dump.size()) {
    auto nl = dump.find('\n', pos);
    std::string_view line = dump.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? dump.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) break;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::parse, "raw text header line " + std::to_string(line_no) + ": expected key: value");
    }
    const std::string key = utf8::to_lower(trim(line.substr(0, colon)));
    std::string value = trim(line.substr(colon + 1));
    if (key == "source") {
      t.source_code = value;
    } else if (key == "date") {
      t.date = value;
    } else if (key == "gender") {
      t.profile.gender = value;
    } else if (key == "age" || key == "birth") {
      t.profile.birth_or_age = value;
    } else if (key == "city") {
      t.profile.city = value;
    } else {
      throw Error(ErrorCode::parse, "raw text header: unknown key '" + key + "'");
    }
  }
  t.body = std::string(dump.substr(pos));
  if (t.body.find_first_not_of(" \t\r\n") == std::string::npos) throw Error(ErrorCode::parse, "raw text: empty body");
  return t;
}

std::string format_raw_text(const RawText& t) {
  std::string out = "source: " + t.source_code + "\ndate: " + t.date + "\n";
  if (t.profile.gender) out += "gender: " + *t.profile.gender + "\n";
  if (t.profile.birth_or_age) out += "age: " + *t.profile.birth_or_age + "\n";
  if (t.profile.city) out += "city: " + *t.profile.city + "\n";
  out += "\n" + t.body;
  return out;
}

DirectorySource::DirectorySource(const std::string& dir) {
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(dir, ec)) {
    if (e.is_regular_file()) files_.push_back(e.path().string());
  }
  if (ec) throw Error(ErrorCode::io, "cannot list " + dir + ": " + ec.message());
  std::sort(files_.begin(), files_.end());
}

std::optional<RawText> DirectorySource::next() {
  if (pos_ >= files_.size()) return std::nullopt;
  const std::string& path = files_[pos_++];
  try {
    return parse_raw_text(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::vector<CategoryMatch> match_categories(const RawText& text, const std::vector<Category>& categories) {
  const auto words = words_of(text.body);
  std::vector<CategoryMatch> out;
  for (const auto& c : categories) {
    CategoryMatch m{c.name, {}};
    for (const auto& k : c.keywords) {
      const std::string key = normalize_token(k);
      if (words.count(key) && std::find(m.keywords.begin(), m.keywords.end(), k) == m.keywords.end()) {
        m.keywords.push_back(k);
      }
    }
    if (!m.keywords.empty()) out.push_back(std::move(m));
  }
  return out;
}

CityTable::CityTable(std::map<std::string, std::string> codes) {
  for (auto& [name, code] : codes) codes_[utf8::to_lower(name)] = code;
}

CityTable CityTable::parse(std::string_view text) {
  std::map<std::string, std::string> codes;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw Error(ErrorCode::parse, "cities line " + std::to_string(line_no) + ": expected city<TAB>code");
    }
    codes[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return CityTable(std::move(codes));
}

const CityTable& CityTable::builtin() {
  static const CityTable t = parse(detail::builtin_cities_text());
  return t;
}

std::optional<std::string> CityTable::code(std::string_view city) const {
  const std::string key = utf8::to_lower(trim(city));
  if (auto it = codes_.find(key); it != codes_.end()) return it->second;
  for (const auto& [_, c] : codes_) {
    if (utf8::to_lower(c) == key) return c;
  }
  return std::nullopt;
}

std::optional<std::string> age_bucket(int age) {
  if (age >= 10 && age < 25) return "10-25";
  if (age >= 25 && age < 35) return "25-35";
  if (age >= 35 && age < 50) return "35-50";
  if (age >= 50 && age <= 90) return "50-90";
  return std::nullopt;
}

Metadata extract_metadata(const AuthorProfile& profile, const CityTable& cities) {
  Metadata m;
  if (profile.gender) {
    const std::string g = utf8::to_lower(trim(*profile.gender));
    if (g == "m" || g == "male") {
      m.gen = "M";
    } else if (g == "f" || g == "female") {
      m.gen = "F";
    } else if (!g.empty() && g != "-") {
      m.warnings.push_back("unknown gender '" + *profile.gender + "'");
    }
  }
  if (profile.birth_or_age) {
    const std::string a = trim(*profile.birth_or_age);
    int age = 0;
    const auto [end, ec] = std::from_chars(a.data(), a.data() + a.size(), age);
    if (!a.empty() && ec == std::errc() && end == a.data() + a.size()) {
      if (age < 0 || age > 120) {
        m.warnings.push_back("age " + a + " out of range");
      } else if (auto b = age_bucket(age)) {
        m.age = *b;
      }
    } else if (is_valid_age(a) && a != "-") {
      m.age = a;
    } else if (!a.empty() && a != "-") {
      m.warnings.push_back("unreadable age '" + a + "'");
    }
  }
  if (profile.city) {
    if (auto c = cities.code(*profile.city)) {
      m.var = *c;
    } else if (!trim(*profile.city).empty() && trim(*profile.city) != "-") {
      m.warnings.push_back("unknown city '" + *profile.city + "'");
    }
  }
  return m;
}

std::string textco_from_date(std::string_view date) {
  const std::string d = trim(date);
  auto digits = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  std::string out;
  if (d.size() == 10 && d[4] == '-' && d[7] == '-' && digits(d.substr(0, 4)) && digits(d.substr(5, 2)) &&
      digits(d.substr(8, 2))) {
    out = d.substr(2, 2) + d.substr(5, 2) + d.substr(8, 2);
  } else if (d.size() == 6 && digits(d)) {
    out = d;
  } else {
    throw Error(ErrorCode::parse, "date '" + d + "' is neither YYYY-MM-DD nor YYMMDD");
  }
  TokenRecord probe;
  probe.cor = probe.arabish = probe.tra = probe.ita = probe.lem = probe.pos = probe.var = probe.age = probe.gen = "-";
  probe.textco = out;
  if (record_problem(probe)) throw Error(ErrorCode::parse, "date '" + d + "' is not a calendar date");
  return out;
}

std::vector<TokenRecord> tokenize_raw_text(const RawText& text, const CityTable& cities) {
  const Metadata meta = extract_metadata(text.profile, cities);
  const std::string textco = textco_from_date(text.date);
  if (trim(text.source_code).empty() || text.source_code.find_first_of("\t\n") != std::string::npos) {
    throw Error(ErrorCode::parse, "raw text: bad source code '" + text.source_code + "'");
  }
  std::vector<TokenRecord> out;
  int par = 0;
  int w = 0;
  auto emit = [&](const std::u32string& tok) {
    TokenRecord r;
    r.cor = text.source_code;
    r.textco = textco;
    r.par = par;
    r.w = TokenIndex::single(++w);
    r.arabish = utf8::encode(tok);
    r.tra = r.ita = r.lem = r.pos = "-";
    r.var = meta.var;
    r.age = meta.age;
    r.gen = meta.gen;
    out.push_back(std::move(r));
  };

  // Paragraphs: maximal runs of non-blank lines.
  std::vector<std::string> paragraphs;
  std::string para;
  std::istringstream in(text.body);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      if (!para.empty()) paragraphs.push_back(std::move(para));
      para.clear();
    } else {
      para += line + '\n';
    }
  }
  if (!para.empty()) paragraphs.push_back(std::move(para));

  for (const auto& p : paragraphs) {
    ++par;
    w = 0;
    std::u32string cur;
    auto flush = [&] {
      if (!cur.empty()) emit(cur);
      cur.clear();
    };
    for (char32_t c : utf8::decode(p)) {
      if (is_word_char(c) || c == U'\'' || (utf8::is_arabic(c) && c != U'؟' && c != U'،')) {
        cur.push_back(c);
      } else if (c == U' ' || c == U'\t' || c == U'\r' || c == U'\n') {
        flush();
      } else {
        flush();
        emit(std::u32string(1, c));
      }
    }
    flush();
  }
  return out;
}

}  // namespace tarc
