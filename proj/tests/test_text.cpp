#include "streamvr/text.hpp"

#include "doctest.h"

using namespace streamvr;

TEST_CASE("count_tokens frozen table") {
  // Expected counts fixed by hand from the tokenizer rule: word-byte runs
  // count once, every other non-space byte counts alone.
  struct Case {
    const char* text;
    long count;
  };
  const Case cases[] = {
      {"", 0},
      {"   \t\n", 0},
      {"Hello", 1},
      {"Hello, world!", 4},
      {"Hello world", 2},
      {"a b c", 3},
      {"3.14", 3},
      {"don't", 3},
      {"one-two", 3},
      {"[SEP]", 3},
      {"A. B. [SEP] C.", 9},
      {"He said \"go\".", 6},
      {"x=1+2", 5},
      {"  spaced   out  ", 2},
      {"semi;colon", 3},
      {"trailing.", 2},
      {"a.m.", 4},
      {"100%", 2},
      {"naïve café", 2},
      {"e.g. tests, i.e. checks", 11},
  };
  for (const auto& c : cases) {
    CAPTURE(c.text);
    CHECK(count_tokens(c.text) == c.count);
  }
}

TEST_CASE("count_tokens additivity over whitespace joins") {
  const char* pieces[] = {"Hello. ", "a, b ", "3.14 \n", "word "};
  for (const char* a : pieces) {
    for (const char* b : pieces) {
      CHECK(count_tokens(std::string(a) + b) == count_tokens(a) + count_tokens(b));
    }
  }
  // s + s == 2 * s when s ends with whitespace
  std::string s = "Paris is the capital. ";
  CHECK(count_tokens(s + s) == 2 * count_tokens(s));
}

TEST_CASE("word_tokens lowercases and drops symbols") {
  auto t = word_tokens("The CAT sat, didn't it?");
  std::vector<std::string> expected{"the", "cat", "sat", "didn", "t", "it"};
  CHECK(t == expected);
  CHECK(word_tokens("!!! ...").empty());
}

TEST_CASE("trim") {
  CHECK(trim("  x  ") == "x");
  CHECK(trim("x") == "x");
  CHECK(trim("   ") == "");
  CHECK(trim("") == "");
  CHECK(trim("\n\ta b\r\n") == "a b");
}
