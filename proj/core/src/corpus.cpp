#include "tarc/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tarc/error.hpp"
#include "tarc/utf8.hpp"

namespace tarc {

namespace {

constexpr std::size_t kColumns = 12;

std::optional<int> parse_positive(std::string_view s) {
  if (s.empty() || s.size() > 9 || s.front() == '0') return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value < 1) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool valid_field(std::string_view f) {
  return !f.empty() && f.find_first_of("\t\n\r") == std::string_view::npos;
}

bool valid_textco(std::string_view t) {
  if (t.size() != 6 || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return false;
  }
  const int month = (t[2] - '0') * 10 + (t[3] - '0');
  const int day = (t[4] - '0') * 10 + (t[5] - '0');
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

std::string fold_surface(std::string_view s) {
  std::string lowered = utf8::to_lower(s);
  std::string out;
  for (char c : lowered) {
    if (c != '-' && c != ' ') out.push_back(c);
  }
  return out;
}

}  // namespace

std::string TokenIndex::str() const {
  if (!is_range()) return std::to_string(lo);
  return std::to_string(lo) + "-" + std::to_string(hi);
}

TokenIndex TokenIndex::parse(std::string_view text) {
  auto dash = text.find('-');
  if (dash == std::string_view::npos) {
    auto v = parse_positive(text);
    if (!v) throw Error(ErrorCode::parse, "W is not a positive integer: '" + std::string(text) + "'");
    return single(*v);
  }
  auto lo = parse_positive(text.substr(0, dash));
  auto hi = parse_positive(text.substr(dash + 1));
  if (!lo || !hi || *lo >= *hi) {
    throw Error(ErrorCode::parse, "W is not a valid range lo-hi: '" + std::string(text) + "'");
  }
  return range(*lo, *hi);
}

SentenceKey key_of(const TokenRecord& r) { return {r.cor, r.textco, r.par}; }

std::string row_key(const TokenRecord& r) {
  return r.cor + ":" + r.textco + ":" + std::to_string(r.par) + ":" + r.w.str();
}

bool is_valid_age(std::string_view age) {
  return age == "10-25" || age == "25-35" || age == "35-50" || age == "50-90";
}

bool is_valid_gen(std::string_view gen) { return gen == "M" || gen == "F"; }

std::optional<std::string> record_problem(const TokenRecord& r) {
  const std::pair<const char*, const std::string*> fields[] = {
      {"Cor", &r.cor}, {"ArabiS", &r.arabish}, {"Tra", &r.tra}, {"Ita", &r.ita},
      {"Lem", &r.lem}, {"POS", &r.pos},        {"Var", &r.var}, {"Age", &r.age},
      {"Gen", &r.gen}};
  for (const auto& [name, value] : fields) {
    if (!valid_field(*value)) return std::string(name) + " is empty or contains a tab/newline";
  }
  if (!valid_textco(r.textco)) return "Textco is not a YYMMDD date: '" + r.textco + "'";
  if (r.par < 1) return "Par must be >= 1";
  if (r.w.lo < 1 || r.w.hi < r.w.lo) return "W is not a valid index";
  if (r.age != kMissing && !is_valid_age(r.age)) return "Age is not one of 10-25, 25-35, 35-50, 50-90: '" + r.age + "'";
  if (r.gen != kMissing && !is_valid_gen(r.gen)) return "Gen is not M or F: '" + r.gen + "'";
  return std::nullopt;
}

std::optional<std::size_t> find_range_violation(const std::vector<TokenRecord>& records) {
  std::size_t i = 0;
  while (i < records.size()) {
    const TokenRecord& head = records[i];
    if (!head.w.is_range()) {
      ++i;
      continue;
    }
    for (int w = head.w.lo; w <= head.w.hi; ++w) {
      const std::size_t j = i + static_cast<std::size_t>(w - head.w.lo) + 1;
      if (j >= records.size()) return i;
      const TokenRecord& comp = records[j];
      if (comp.w.is_range() || comp.w.lo != w || key_of(comp) != key_of(head)) return j;
    }
    i += static_cast<std::size_t>(head.w.width()) + 1;
  }
  return std::nullopt;
}

bool range_surface_consistent(const TokenRecord& parent,
                              const std::vector<TokenRecord>& components) {
  std::string prefix;
  std::string suffix;
  std::string middle;
  for (const auto& c : components) {
    auto plus = c.arabish.find(" + ");
    if (plus != std::string::npos) {
      prefix += fold_surface(c.arabish.substr(0, plus));
      suffix = fold_surface(c.arabish.substr(plus + 3)) + suffix;
    } else {
      middle += fold_surface(c.arabish);
    }
  }
  return prefix + middle + suffix == fold_surface(parent.arabish);
}

std::vector<TokenRecord> parse_tsv(std::string_view bytes) {
  std::vector<TokenRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_header = false;
  while (pos < bytes.size()) {
    auto nl = bytes.find('\n', pos);
    std::string_view line = bytes.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? bytes.size() : nl + 1;
    ++line_no;
    const auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
    if (!saw_header) {
      if (line != kTsvHeader) throw Error(ErrorCode::parse, where() + "missing or wrong header");
      saw_header = true;
      continue;
    }
    auto cols = split_tabs(line);
    if (cols.size() != kColumns) {
      throw Error(ErrorCode::parse, where() + "expected 12 columns, found " + std::to_string(cols.size()));
    }
    TokenRecord r;
    r.cor = cols[0];
    r.textco = cols[1];
    auto par = parse_positive(cols[2]);
    if (!par) throw Error(ErrorCode::parse, where() + "Par is not a positive integer");
    r.par = *par;
    try {
      r.w = TokenIndex::parse(cols[3]);
    } catch (const Error& e) {
      throw Error(ErrorCode::parse, where() + e.what());
    }
    r.arabish = cols[4];
    r.tra = cols[5];
    r.ita = cols[6];
    r.lem = cols[7];
    r.pos = cols[8];
    r.var = cols[9];
    r.age = cols[10];
    r.gen = cols[11];
    try {
      utf8::decode(line);
    } catch (const Error& e) {
      throw Error(ErrorCode::parse, where() + e.what());
    }
    if (auto problem = record_problem(r)) throw Error(ErrorCode::parse, where() + *problem);
    records.push_back(std::move(r));
  }
  if (!saw_header) throw Error(ErrorCode::parse, "line 1: missing header");
  if (auto bad = find_range_violation(records)) {
    // +2: header line, 1-based numbering.
    throw Error(ErrorCode::parse, "line " + std::to_string(*bad + 2) +
                                      ": range row not followed by its component rows");
  }
  return records;
}

std::string write_tsv(const std::vector<TokenRecord>& records) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (auto problem = record_problem(records[i])) {
      throw Error(ErrorCode::invalid_argument, "record " + std::to_string(i) + ": " + *problem);
    }
  }
  if (auto bad = find_range_violation(records)) {
    throw Error(ErrorCode::invalid_argument,
                "record " + std::to_string(*bad) + ": range row not followed by its component rows");
  }
  std::string out(kTsvHeader);
  out.push_back('\n');
  for (const auto& r : records) {
    out += r.cor + '\t' + r.textco + '\t' + std::to_string(r.par) + '\t' + r.w.str() + '\t' +
           r.arabish + '\t' + r.tra + '\t' + r.ita + '\t' + r.lem + '\t' + r.pos + '\t' + r.var +
           '\t' + r.age + '\t' + r.gen + '\n';
  }
  return out;
}

std::vector<TokenRecord> read_tsv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tsv(buf.str());
}

void write_tsv_file(const std::string& path, const std::vector<TokenRecord>& records) {
  const std::string bytes = write_tsv(records);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  out << bytes;
}

std::vector<SurfaceGroup> surface_groups(const std::vector<TokenRecord>& records) {
  std::vector<SurfaceGroup> groups;
  std::size_t i = 0;
  while (i < records.size()) {
    std::size_t comps = records[i].w.is_range() ? static_cast<std::size_t>(records[i].w.width()) : 0;
    comps = std::min(comps, records.size() - i - 1);
    groups.push_back({i, comps});
    i += comps + 1;
  }
  return groups;
}

std::vector<Sentence> reconstruct_sentences(const std::vector<TokenRecord>& records) {
  std::map<SentenceKey, std::vector<TokenRecord>> grouped;
  for (const auto& r : records) grouped[key_of(r)].push_back(r);

  std::vector<Sentence> out;
  for (auto& [key, rows] : grouped) {
    // Parents sort before their first component: (lo asc, hi desc).
    std::sort(rows.begin(), rows.end(), [](const TokenRecord& a, const TokenRecord& b) {
      if (a.w.lo != b.w.lo) return a.w.lo < b.w.lo;
      return a.w.hi > b.w.hi;
    });
    Sentence s;
    s.key = key;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && rows[i].w == rows[i - 1].w) {
        throw Error(ErrorCode::invalid_argument, "duplicate token index " + row_key(rows[i]));
      }
      if (rows[i].w.is_range()) {
        s.ranges.push_back(rows[i]);
      } else {
        s.tokens.push_back(rows[i]);
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<TokenRecord> Sentence::surface() const {
  std::vector<TokenRecord> out;
  std::size_t r = 0;
  for (const auto& t : tokens) {
    while (r < ranges.size() && ranges[r].w.hi < t.w.lo) ++r;
    if (r < ranges.size() && ranges[r].w.lo <= t.w.lo && t.w.lo <= ranges[r].w.hi) {
      if (t.w.lo == ranges[r].w.lo) out.push_back(ranges[r]);
      continue;
    }
    out.push_back(t);
  }
  return out;
}

std::vector<TokenRecord> Sentence::rows() const {
  std::vector<TokenRecord> out;
  std::size_t r = 0;
  for (const auto& t : tokens) {
    while (r < ranges.size() && ranges[r].w.hi < t.w.lo) ++r;
    if (r < ranges.size() && t.w.lo == ranges[r].w.lo) out.push_back(ranges[r]);
    out.push_back(t);
  }
  return out;
}

}  // namespace tarc
