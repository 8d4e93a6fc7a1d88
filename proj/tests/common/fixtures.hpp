#pragma once

#include <string>
#include <vector>

#include "tarc/corpus.hpp"
#include "tarc/transliteration.hpp"

namespace tarc::testing {

struct GoldToken {
  std::string arabish;
  Morphemes morphemes;
  bool loanword = false;
};

// Transcribable tokens of the fixture excerpts with their gold Tra,
// split into morphemes where the corpus segments the token.
inline const std::vector<GoldToken>& gold_tokens() {
  static const std::vector<GoldToken> v = {
      {"kifech", {"كيفاش"}},
      {"tchoufou", {"تشوفوا"}},
      {"l3icha", {"الـ", "عيشة"}},
      {"fil", {"فـ", "الـ"}},
      {"4orba", {"غربة"}},
      {"konna", {"كنّا"}},
      {"far7anin", {"فرحانين"}},
      {"dieri", {"دياري"}},
      {"w", {"و"}},
      {"bniiiiin", {"بنين"}},
      {"Mtala9", {"مطلق"}},
      {"min", {"من"}},
      {"gawriya", {"ڨاورية"}, true},
      {"manajemnech", {"ما+ش", "نجمنا"}},
      {"merci", {"مرسي"}, true},
  };
  return v;
}

inline std::vector<TrainingPair> gold_pairs() {
  std::vector<TrainingPair> out;
  for (const auto& g : gold_tokens()) out.push_back({g.arabish, g.morphemes, g.loanword});
  return out;
}

inline std::string data_path(const std::string& name) { return std::string(TARC_TEST_DATA) + "/" + name; }

inline TokenRecord make_record(std::string cor, std::string textco, int par, TokenIndex w, std::string arabish,
                               std::string tra) {
  TokenRecord r;
  r.cor = std::move(cor);
  r.textco = std::move(textco);
  r.par = par;
  r.w = w;
  r.arabish = std::move(arabish);
  r.tra = std::move(tra);
  r.ita = r.lem = r.pos = r.var = r.age = r.gen = "-";
  return r;
}

}  // namespace tarc::testing
