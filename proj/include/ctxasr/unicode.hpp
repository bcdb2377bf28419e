#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ctxasr {

/// Split UTF-8 text into extended grapheme clusters. The views point into the
/// input buffer, so slicing and rejoining never re-encodes bytes. Invalid
/// byte sequences are kept as-is, one unit per offending byte.
std::vector<std::string_view> graphemes(std::string_view utf8);

std::size_t grapheme_count(std::string_view utf8);

/// Unicode NFC normalization.
std::string nfc(std::string_view utf8);

/// Full lowercase (root locale); scripts without case are untouched.
std::string to_lower(std::string_view utf8);

/// Drop characters in the Unicode punctuation categories (P*).
std::string strip_punctuation(std::string_view utf8);

/// Collapse White_Space runs to a single ASCII space and trim the ends.
std::string collapse_whitespace(std::string_view utf8);

/// Remove every White_Space character.
std::string remove_whitespace(std::string_view utf8);

/// Strip leading and trailing White_Space.
std::string_view trim(std::string_view utf8);

/// Split on White_Space runs, dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view utf8);

} // namespace ctxasr
