#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace methlib::text {

std::string to_lower(std::string_view s);

/// Lowercase, trim and collapse internal whitespace runs to one space.
std::string normalize_name(std::string_view s);

bool contains_ci(std::string_view haystack, std::string_view needle);

/// Decodes UTF-8 into code points; invalid bytes map to themselves.
std::u32string decode_utf8(std::string_view s);

/// Levenshtein distance over code points.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

/// 1 - distance / max(len); two empty strings are identical.
double name_similarity(std::string_view a, std::string_view b);

bool is_identifier(std::string_view s);

/// Double-quoted DSL literal with \" and \\ escapes.
std::string quote(std::string_view s);

}  // namespace methlib::text
