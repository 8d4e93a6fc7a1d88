#include "tarc/code_system.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "detail/builtin_data.hpp"
#include "tarc/error.hpp"
#include "tarc/utf8.hpp"

namespace tarc {

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto p = s.find(sep, start);
    out.emplace_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) return out;
    start = p + 1;
  }
}

void push_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

}  // namespace

std::string GraphemeSegmentation::joined() const {
  std::string out;
  for (const auto& u : units) out += u.text;
  return out;
}

bool is_short_vowel(std::string_view unit) {
  return unit == "a" || unit == "e" || unit == "i" || unit == "o" || unit == "u" ||
         unit == "é" || unit == "è";
}

MappingTable::MappingTable(std::vector<MappingEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    const std::size_t len = utf8::length(e.arabish_variant);
    if (len < 1 || len > 2) {
      throw Error(ErrorCode::invalid_argument,
                  "mapping entry " + std::to_string(i) + ": variant must be 1-2 characters");
    }
    if (e.arabic_grapheme.empty()) {
      throw Error(ErrorCode::invalid_argument,
                  "mapping entry " + std::to_string(i) + ": empty Arabic grapheme");
    }
  }
  index();
}

void MappingTable::index() {
  by_variant_.clear();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    by_variant_[entries_[i].arabish_variant].push_back(i);
  }
}

MappingTable MappingTable::parse(std::string_view text) {
  std::vector<MappingEntry> entries;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 4) {
      throw Error(ErrorCode::parse, "mapping line " + std::to_string(line_no) + ": expected 4 columns");
    }
    MappingEntry e;
    e.arabish_variant = utf8::to_lower(cols[0]);
    e.arabic_grapheme = cols[1];
    e.ipa = cols[2];
    if (cols[3] != "-") {
      for (const auto& flag : split(cols[3], ',')) {
        if (flag == "loanword") {
          e.loanword_only = true;
        } else if (flag == "final") {
          e.final_only = true;
        } else {
          throw Error(ErrorCode::parse,
                      "mapping line " + std::to_string(line_no) + ": unknown flag '" + flag + "'");
        }
      }
    }
    entries.push_back(std::move(e));
  }
  try {
    return MappingTable(std::move(entries));
  } catch (const Error& e) {
    throw Error(ErrorCode::parse, e.what());
  }
}

MappingTable MappingTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const MappingTable& MappingTable::builtin() {
  static const MappingTable table = parse(detail::builtin_mapping_text());
  return table;
}

std::string MappingTable::to_text() const {
  std::string out = "# arabish_variant\tarabic_grapheme\tipa\tflags\n";
  for (const auto& e : entries_) {
    std::string flags;
    if (e.loanword_only) flags = "loanword";
    if (e.final_only) flags += flags.empty() ? "final" : ",final";
    if (flags.empty()) flags = "-";
    out += e.arabish_variant + '\t' + e.arabic_grapheme + '\t' + e.ipa + '\t' + flags + '\n';
  }
  return out;
}

MappingTable MappingTable::with(MappingEntry entry) const {
  auto entries = entries_;
  entries.push_back(std::move(entry));
  return MappingTable(std::move(entries));
}

bool MappingTable::is_variant(std::string_view unit) const {
  return by_variant_.find(unit) != by_variant_.end();
}

bool MappingTable::is_geminate(std::string_view unit) const {
  const auto cps = utf8::decode(unit);
  if (cps.size() != 2 || cps[0] != cps[1]) return false;
  const std::string base = utf8::encode(cps[0]);
  if (is_short_vowel(base) || !is_variant(base)) return false;
  return !candidates({base, UnitKind::mapped}, false, false).empty();
}

std::vector<std::string> MappingTable::candidates(const GraphemeUnit& unit, bool loanword,
                                                  bool is_final) const {
  std::vector<std::string> out;
  switch (unit.kind) {
    case UnitKind::mapped: {
      auto it = by_variant_.find(unit.text);
      if (it != by_variant_.end()) {
        for (std::size_t idx : it->second) {
          const auto& e = entries_[idx];
          if (e.loanword_only && !loanword) continue;
          if (e.final_only && !is_final) continue;
          push_unique(out, e.arabic_grapheme);
        }
      }
      if (is_short_vowel(unit.text)) push_unique(out, "");
      break;
    }
    case UnitKind::geminate: {
      const auto cps = utf8::decode(unit.text);
      const std::string shadda = utf8::encode(utf8::kShadda);
      for (const auto& c : candidates({utf8::encode(cps[0]), UnitKind::mapped}, loanword, false)) {
        if (!c.empty()) push_unique(out, c + shadda);
      }
      break;
    }
    case UnitKind::unmapped:
      if (is_short_vowel(unit.text)) out.push_back("");
      break;
  }
  return out;
}

std::vector<std::string> MappingTable::all_candidates(const GraphemeUnit& unit) const {
  return candidates(unit, true, true);
}

std::vector<GraphemeSegmentation> segment_graphemes(std::string_view token,
                                                    const MappingTable& table) {
  const std::u32string cps = utf8::decode(utf8::to_lower(token));
  std::vector<GraphemeSegmentation> out;
  if (cps.empty()) return out;

  GraphemeSegmentation current;
  // Depth-first, two-character units tried before single characters.
  auto walk = [&](auto&& self, std::size_t i) -> void {
    if (i == cps.size()) {
      out.push_back(current);
      return;
    }
    if (i + 1 < cps.size()) {
      const std::string pair = utf8::encode(cps.substr(i, 2));
      UnitKind kind = UnitKind::mapped;
      bool ok = false;
      if (table.is_variant(pair)) {
        ok = true;
      } else if (table.is_geminate(pair)) {
        kind = UnitKind::geminate;
        ok = true;
      }
      if (ok) {
        current.units.push_back({pair, kind});
        self(self, i + 2);
        current.units.pop_back();
      }
    }
    const std::string single = utf8::encode(cps[i]);
    current.units.push_back({single, table.is_variant(single) ? UnitKind::mapped : UnitKind::unmapped});
    self(self, i + 1);
    current.units.pop_back();
  };
  walk(walk, 0);
  return out;
}

std::size_t LatticeBranch::path_count() const {
  std::size_t n = 1;
  for (const auto& p : positions) n *= p.candidates.size();
  return n;
}

std::size_t Lattice::path_count() const {
  std::size_t n = 0;
  for (const auto& b : branches) n += b.path_count();
  return n;
}

LatticeBranch expand_units(const GraphemeSegmentation& seg, bool loanword,
                           const MappingTable& table) {
  LatticeBranch branch;
  branch.segmentation = seg;
  for (std::size_t i = 0; i < seg.units.size(); ++i) {
    LatticePosition pos;
    pos.unit = seg.units[i];
    pos.candidates = table.candidates(pos.unit, loanword, i + 1 == seg.units.size());
    if (pos.candidates.empty()) {
      pos.candidates = {pos.unit.text};
      pos.passthrough = true;
    }
    branch.positions.push_back(std::move(pos));
  }
  return branch;
}

Lattice expand(std::string_view token, bool loanword, const MappingTable& table) {
  if (token.empty()) throw Error(ErrorCode::invalid_argument, "expand: empty token");
  Lattice lattice;
  for (const auto& seg : segment_graphemes(token, table)) {
    lattice.branches.push_back(expand_units(seg, loanword, table));
  }
  return lattice;
}

bool contains_path(const LatticeBranch& branch, std::string_view arabic) {
  // Reachable byte offsets into `arabic` after each position.
  std::set<std::size_t> frontier = {0};
  for (const auto& pos : branch.positions) {
    std::set<std::size_t> next;
    for (std::size_t off : frontier) {
      for (const auto& c : pos.candidates) {
        if (arabic.compare(off, c.size(), c) == 0 && off + c.size() <= arabic.size()) {
          next.insert(off + c.size());
        }
      }
    }
    if (next.empty()) return false;
    frontier = std::move(next);
  }
  return frontier.count(arabic.size()) > 0;
}

bool contains_path(const Lattice& lattice, std::string_view arabic) {
  return std::any_of(lattice.branches.begin(), lattice.branches.end(),
                     [&](const LatticeBranch& b) { return contains_path(b, arabic); });
}

}  // namespace tarc
