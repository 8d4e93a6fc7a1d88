#include "tarc/segmentation.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "detail/builtin_data.hpp"
#include "tarc/error.hpp"
#include "tarc/normalization.hpp"
#include "tarc/utf8.hpp"

namespace tarc {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

bool starts_with(const std::u32string& s, std::size_t at, const std::u32string& p) {
  return at + p.size() <= s.size() && s.compare(at, p.size(), p) == 0;
}

bool ends_at(const std::u32string& s, std::size_t end, const std::u32string& p) {
  return p.size() <= end && s.compare(end - p.size(), p.size(), p) == 0;
}

std::string strip_tatweel(std::string s, bool leading, bool trailing) {
  const std::string t = utf8::encode(utf8::kTatweel);
  if (trailing) {
    while (s.size() >= t.size() && s.compare(s.size() - t.size(), t.size(), t) == 0) s.resize(s.size() - t.size());
  }
  if (leading) {
    while (s.compare(0, t.size(), t) == 0) s.erase(0, t.size());
  }
  return s;
}

}  // namespace

std::string_view to_string(PartKind kind) {
  switch (kind) {
    case PartKind::proclitic: return "proclitic";
    case PartKind::stem: return "stem";
    case PartKind::enclitic: return "enclitic";
    case PartKind::neg_prefix: return "neg_prefix";
    case PartKind::neg_suffix: return "neg_suffix";
  }
  return "stem";
}

std::optional<PartKind> part_kind_from(std::string_view name) {
  for (auto k : {PartKind::proclitic, PartKind::stem, PartKind::enclitic, PartKind::neg_prefix,
                 PartKind::neg_suffix}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

CliticInventory::CliticInventory(std::vector<Clitic> clitics) : clitics_(std::move(clitics)) {
  for (std::size_t i = 0; i < clitics_.size(); ++i) {
    const auto& c = clitics_[i];
    if (c.kind == PartKind::stem) {
      throw Error(ErrorCode::invalid_argument, "clitic " + std::to_string(i) + ": kind cannot be stem");
    }
    if (c.latin_forms.empty() || c.arabic.empty()) {
      throw Error(ErrorCode::invalid_argument, "clitic " + std::to_string(i) + ": missing forms or Arabic");
    }
    for (const auto& f : c.latin_forms) {
      if (f.empty()) throw Error(ErrorCode::invalid_argument, "clitic " + std::to_string(i) + ": empty form");
    }
  }
}

CliticInventory CliticInventory::parse(std::string_view text) {
  std::vector<Clitic> clitics;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 4 && cols.size() != 5) {
      throw Error(ErrorCode::parse, "clitic line " + std::to_string(line_no) + ": expected 4 or 5 columns");
    }
    auto kind = part_kind_from(cols[2]);
    if (!kind || *kind == PartKind::stem) {
      throw Error(ErrorCode::parse, "clitic line " + std::to_string(line_no) + ": bad kind '" + cols[2] + "'");
    }
    Clitic c;
    for (const auto& f : split(cols[0], ',')) c.latin_forms.push_back(utf8::to_lower(f));
    c.arabic = cols[1];
    c.kind = *kind;
    c.pos = cols[3];
    if (cols.size() == 5) c.lemma = cols[4];
    clitics.push_back(std::move(c));
  }
  try {
    return CliticInventory(std::move(clitics));
  } catch (const Error& e) {
    throw Error(ErrorCode::parse, e.what());
  }
}

CliticInventory CliticInventory::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const CliticInventory& CliticInventory::builtin() {
  static const CliticInventory inv = parse(detail::builtin_clitics_text());
  return inv;
}

std::string CliticInventory::to_text() const {
  std::string out;
  for (const auto& c : clitics_) {
    std::string forms;
    for (const auto& f : c.latin_forms) forms += (forms.empty() ? "" : ",") + f;
    out += forms + '\t' + c.arabic + '\t' + std::string(to_string(c.kind)) + '\t' + c.pos;
    if (!c.lemma.empty()) out += '\t' + c.lemma;
    out += '\n';
  }
  return out;
}

const Clitic* CliticInventory::find(std::string_view latin, PartKind kind) const {
  for (const auto& c : clitics_) {
    if (c.kind != kind) continue;
    if (std::find(c.latin_forms.begin(), c.latin_forms.end(), latin) != c.latin_forms.end()) return &c;
  }
  return nullptr;
}

std::vector<std::string> CliticInventory::forms(PartKind kind) const {
  std::vector<std::string> out;
  for (const auto& c : clitics_) {
    if (c.kind != kind) continue;
    for (const auto& f : c.latin_forms) {
      if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
    }
  }
  return out;
}

std::string Segmentation::joined() const {
  std::string out;
  for (const auto& p : parts) out += p.latin;
  return out;
}

bool Segmentation::has_circumfix() const {
  return std::any_of(parts.begin(), parts.end(), [](const SegmentPart& p) { return p.kind == PartKind::neg_prefix; });
}

std::size_t Segmentation::row_count() const {
  return parts.size() - (has_circumfix() ? 1 : 0);
}

std::vector<Segmentation> segment(std::string_view token, const CliticInventory& inv) {
  std::vector<Segmentation> out;
  const std::u32string cps = utf8::decode(token);
  if (cps.empty()) return out;
  const std::size_t n = cps.size();
  auto slice = [&](std::size_t a, std::size_t b) { return utf8::encode(cps.substr(a, b - a)); };

  std::vector<std::u32string> pro, enc, neg_pre, neg_suf;
  for (const auto& f : inv.forms(PartKind::proclitic)) pro.push_back(utf8::decode(f));
  for (const auto& f : inv.forms(PartKind::enclitic)) enc.push_back(utf8::decode(f));
  for (const auto& f : inv.forms(PartKind::neg_prefix)) neg_pre.push_back(utf8::decode(f));
  for (const auto& f : inv.forms(PartKind::neg_suffix)) neg_suf.push_back(utf8::decode(f));

  auto add = [&](Segmentation s) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
  };

  add(Segmentation{{{slice(0, n), PartKind::stem}}});

  // Stem [from, to) followed by an optional enclitic that ends at `to_end`.
  auto with_enclitics = [&](const std::vector<SegmentPart>& head, std::size_t from, std::size_t end,
                            std::size_t min_stem, const std::vector<SegmentPart>& tail) {
    auto emit = [&](std::size_t stem_end, std::optional<SegmentPart> encl) {
      if (stem_end < from + min_stem) return;
      Segmentation s;
      s.parts = head;
      s.parts.push_back({slice(from, stem_end), PartKind::stem});
      if (encl) s.parts.push_back(*encl);
      s.parts.insert(s.parts.end(), tail.begin(), tail.end());
      add(std::move(s));
    };
    emit(end, std::nullopt);
    for (const auto& e : enc) {
      if (ends_at(cps, end, e) && end - e.size() >= from) {
        emit(end - e.size(), SegmentPart{utf8::encode(e), PartKind::enclitic});
      }
    }
  };

  std::vector<SegmentPart> head;
  auto proclitics = [&](auto&& self, std::size_t pos) -> void {
    if (!head.empty()) {
      if (pos == n && head.size() >= 2) add(Segmentation{head});
      if (pos < n) with_enclitics(head, pos, n, 1, {});
    } else {
      with_enclitics(head, pos, n, 1, {});
    }
    if (head.size() >= kMaxProclitics) return;
    for (const auto& p : pro) {
      if (!starts_with(cps, pos, p)) continue;
      head.push_back({utf8::encode(p), PartKind::proclitic});
      self(self, pos + p.size());
      head.pop_back();
    }
  };
  proclitics(proclitics, 0);

  for (const auto& p : neg_pre) {
    if (!starts_with(cps, 0, p)) continue;
    for (const auto& s : neg_suf) {
      if (p.size() + s.size() + kMinNegatedStem > n || !ends_at(cps, n, s)) continue;
      with_enclitics({{utf8::encode(p), PartKind::neg_prefix}}, p.size(), n - s.size(), kMinNegatedStem,
                     {{utf8::encode(s), PartKind::neg_suffix}});
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const Segmentation& a, const Segmentation& b) {
    return a.parts.size() < b.parts.size();
  });
  return out;
}

std::string fuse_morphemes(const std::vector<std::string>& morphemes) {
  if (morphemes.empty()) return {};
  const auto plus = morphemes.front().find('+');
  if (plus != std::string::npos && morphemes.size() > 1) {
    std::vector<std::string> rest(morphemes.begin() + 1, morphemes.end());
    return morphemes.front().substr(0, plus) + " " + fuse_morphemes(rest) + morphemes.front().substr(plus + 1);
  }
  std::string out;
  for (std::size_t i = 0; i < morphemes.size(); ++i) {
    out += strip_tatweel(morphemes[i], i > 0, i + 1 < morphemes.size());
  }
  return out;
}

std::vector<TokenRecord> to_range_rows(const TokenRecord& record, const Segmentation& seg,
                                       const std::vector<std::string>& arabic_parts,
                                       const CliticInventory& inv) {
  const std::size_t rows = seg.row_count();
  if (rows < 2) throw Error(ErrorCode::invalid_argument, "to_range_rows: segmentation has a single row");
  if (arabic_parts.size() != rows) {
    throw Error(ErrorCode::invalid_argument, "to_range_rows: " + std::to_string(arabic_parts.size()) +
                                                 " Arabic parts for " + std::to_string(rows) + " rows");
  }
  const int lo = record.w.lo;
  std::vector<TokenRecord> out;
  TokenRecord parent = record;
  parent.w = TokenIndex::range(lo, lo + static_cast<int>(rows) - 1);
  parent.tra = fuse_morphemes(arabic_parts);
  out.push_back(parent);

  auto component = [&](std::size_t row, std::string latin, std::string pos, std::string lem) {
    TokenRecord c = record;
    c.w = TokenIndex::single(lo + static_cast<int>(row));
    c.arabish = std::move(latin);
    c.tra = arabic_parts[row];
    c.ita = std::string(kMissing);
    c.pos = std::move(pos);
    c.lem = std::move(lem);
    return c;
  };

  const SegmentPart* suffix = nullptr;
  for (const auto& p : seg.parts) {
    if (p.kind == PartKind::neg_suffix) suffix = &p;
  }
  std::size_t row = 0;
  for (const auto& p : seg.parts) {
    switch (p.kind) {
      case PartKind::stem:
        out.push_back(component(row++, p.latin, record.pos, record.lem));
        break;
      case PartKind::neg_suffix:
        break;
      case PartKind::neg_prefix: {
        const Clitic* pre = inv.find(p.latin, PartKind::neg_prefix);
        const Clitic* suf = suffix ? inv.find(suffix->latin, PartKind::neg_suffix) : nullptr;
        if (!pre || !suf) throw Error(ErrorCode::invalid_argument, "to_range_rows: unknown negation parts");
        out.push_back(component(row++, p.latin + " + " + suffix->latin, pre->pos,
                                suf->arabic + "+V+" + pre->arabic));
        break;
      }
      case PartKind::proclitic:
      case PartKind::enclitic: {
        const Clitic* c = inv.find(p.latin, p.kind);
        if (!c) throw Error(ErrorCode::invalid_argument, "to_range_rows: unknown clitic '" + p.latin + "'");
        out.push_back(component(row++, p.latin, c->pos, c->lemma.empty() ? c->arabic : c->lemma));
        break;
      }
    }
  }
  return out;
}

}  // namespace tarc
