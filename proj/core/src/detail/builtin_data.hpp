#pragma once

#include <string_view>

// Contents of core/data/*.tsv, embedded at configure time.
namespace tarc::detail {

std::string_view builtin_mapping_text();
std::string_view builtin_lexicon_text();
std::string_view builtin_clitics_text();
std::string_view builtin_categories_text();
std::string_view builtin_cities_text();

}  // namespace tarc::detail
