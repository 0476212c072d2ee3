#include "lexsmt/text.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <limits>
#include <random>

#include "lexsmt/error.hpp"

using namespace lexsmt;

TEST(Text, TokenizeSplitsPunctuationAndDandas) {
  EXPECT_EQ(tokenize("वह घर जाता।"), (Tokens{"वह", "घर", "जाता", "।"}));
  EXPECT_EQ(tokenize("आहेत."), (Tokens{"आहेत", "."}));
  EXPECT_EQ(tokenize("मिरची-मसाले"), (Tokens{"मिरची", "-", "मसाले"}));
  EXPECT_EQ(tokenize("a॥b"), (Tokens{"a", "॥", "b"}));
}

TEST(Text, PipeRunStaysOneToken) {
  EXPECT_EQ(tokenize("वह घर |UNK| जाता"), (Tokens{"वह", "घर", "|", "UNK", "|", "जाता"}));
  EXPECT_EQ(tokenize("a || b"), (Tokens{"a", "||", "b"}));
}

TEST(Text, UnicodeWhitespaceSeparates) {
  EXPECT_EQ(tokenize("a b\tc d"), (Tokens{"a", "b", "c", "d"}));
  EXPECT_TRUE(tokenize("  \t ").empty());
}

TEST(Text, NfcComposes) {
  EXPECT_EQ(to_nfc("e\xcc\x81"), "\xc3\xa9");
  EXPECT_EQ(to_nfc("plain"), "plain");
  // Already-composed Devanagari passes through.
  EXPECT_EQ(to_nfc("मराठी"), "मराठी");
}

TEST(Text, InvalidUtf8Throws) {
  EXPECT_FALSE(is_valid_utf8("\xff\xfe"));
  EXPECT_FALSE(is_valid_utf8("\xe0\xa4"));
  EXPECT_TRUE(is_valid_utf8("हिंदी"));
  EXPECT_THROW(to_nfc("ab\xc3"), EncodingError);
}

TEST(Text, NormalizationIsIdempotent) {
  std::mt19937 rng(5);
  const std::vector<std::string> pieces = {"क", "ि", "e", "\xcc\x81", " ", ".", "।", "|", "a"};
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    const int len = static_cast<int>(rng() % 12);
    for (int i = 0; i < len; ++i) text += pieces[rng() % pieces.size()];
    const auto once = normalize_tokens(text);
    EXPECT_EQ(normalize_tokens(join(once)), once) << text;
  }
}

TEST(Text, SplitHelpers) {
  EXPECT_EQ(split_fields("a\t\tb", '\t'), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(split_spaces("  a  b "), (Tokens{"a", "b"}));
  EXPECT_EQ(trim(" \t x y \r\n"), "x y");
  EXPECT_EQ(codepoint_count("नगरी"), 4u);
}

TEST(Text, NumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 0.0}) {
    EXPECT_EQ(parse_double(format_double(v), "v"), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_THROW(parse_double("1.5x", "weight"), ParseError);
  EXPECT_THROW(parse_int("", "count"), ParseError);
  EXPECT_EQ(parse_int("-42", "count"), -42);
}

TEST(Text, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Text, ReadLinesDropsCarriageReturns) {
  const auto dir = std::filesystem::temp_directory_path() / "lexsmt_text_test";
  write_file(dir / "f.txt", "one\r\ntwo\n\nthree");
  EXPECT_EQ(read_lines(dir / "f.txt"), (std::vector<std::string>{"one", "two", "", "three"}));
  std::filesystem::remove_all(dir);
}
