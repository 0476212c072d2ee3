#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lexsmt {

using Tokens = std::vector<std::string>;

bool is_valid_utf8(std::string_view text);

// NFC-normalizes valid UTF-8. Throws EncodingError on malformed input.
std::string to_nfc(std::string_view text);

// Splits NFC text into tokens: Unicode whitespace separates tokens, the
// dandas (U+0964, U+0965) and each ASCII punctuation mark stand alone, and a
// run of '|' characters is kept together as one token.
Tokens tokenize(std::string_view text);

// to_nfc followed by tokenize.
Tokens normalize_tokens(std::string_view text);

std::string join(const Tokens& tokens, std::string_view separator = " ");

// Splits on single ASCII spaces, dropping empty pieces. For fields that are
// already tokenized.
Tokens split_spaces(std::string_view text);

// Splits on a single separator character, keeping empty fields.
std::vector<std::string> split_fields(std::string_view line, char separator);

std::string_view trim(std::string_view text);

std::size_t codepoint_count(std::string_view text);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Parses a double, throwing ParseError with `what` in the message on failure.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

// Reads a text file into lines without terminators. A trailing newline does
// not produce an extra empty line; CR before LF is dropped.
std::vector<std::string> read_lines(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data,
                    std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

}  // namespace lexsmt
