#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tarc::utf8 {

// Throws tarc::Error(parse) on malformed input.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view cps);
std::string encode(char32_t cp);

// Splits into one UTF-8 string per code point.
std::vector<std::string> chars(std::string_view text);

std::size_t length(std::string_view text);

// Lowercases ASCII and Latin-1 / Latin Extended-A letters; other code points
// are returned unchanged.
char32_t to_lower(char32_t cp);
std::string to_lower(std::string_view text);

bool is_latin_letter(char32_t cp);
bool is_arabic(char32_t cp);
bool contains_arabic(std::string_view text);

inline constexpr char32_t kTatweel = U'ـ';
inline constexpr char32_t kShadda = U'ّ';

}  // namespace tarc::utf8
