#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace danlg {

using Tokenizer = std::function<std::vector<std::string>(std::string_view)>;

/// Lowercases (full Unicode case mapping, NFC) and splits on whitespace and
/// punctuation. Punctuation is dropped; symbols such as "£" stay inside words.
/// Shared by corpus statistics and BLEU so their token notions agree.
std::vector<std::string> word_tokenize(std::string_view text);

std::string_view trim(std::string_view text);

/// NFC + trim + collapse internal whitespace runs to a single ASCII space.
std::string normalize_space(std::string_view text);

/// normalize_space + full lowercase. Used for slot-value matching.
std::string normalize_for_match(std::string_view text);

/// Drops leading/trailing punctuation other than brackets, so "M (for Mature)"
/// keeps its closing parenthesis while "'Crysis'." loses its quotes and dot.
std::string strip_enclosing_punctuation(std::string_view text);

/// Stable sentence id: first 16 hex digits of SHA-256 over normalize_space(text).
std::string sentence_id(std::string_view text);

/// Stable pair id: first 16 hex digits of SHA-256 over
/// normalize_space(candidate) + '\x1f' + normalize_space(reference).
std::string pair_id(std::string_view candidate, std::string_view reference);

std::string sha256_hex(std::string_view bytes);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);
/// Inverse of format_number. Throws Error(kFormat) on trailing garbage.
double parse_number(std::string_view text);

}  // namespace danlg
