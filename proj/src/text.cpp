#include "streamvr/text.hpp"

#include <cctype>

namespace streamvr {

namespace {

bool is_word_byte(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u);
}

}  // namespace

bool is_space_byte(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

long count_tokens(std::string_view text) {
  long count = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (is_space_byte(c)) {
      ++i;
      continue;
    }
    if (is_word_byte(c)) {
      while (i < text.size() && is_word_byte(text[i])) ++i;
    } else {
      ++i;  // each symbol byte is its own token
    }
    ++count;
  }
  return count;
}

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_byte(text[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && is_word_byte(text[i])) ++i;
    std::string token(text.substr(start, i - start));
    for (char& c : token) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

std::string_view trim(std::string_view text) {
  std::size_t begin = 0;
  while (begin < text.size() && is_space_byte(text[begin])) ++begin;
  std::size_t end = text.size();
  while (end > begin && is_space_byte(text[end - 1])) --end;
  return text.substr(begin, end - begin);
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace streamvr
