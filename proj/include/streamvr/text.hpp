#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace streamvr {

// Deterministic whitespace+punctuation tokenizer used for all token
// accounting. A token is either a maximal run of word bytes (ASCII
// alphanumerics plus any byte >= 0x80, so multi-byte UTF-8 sequences stay
// inside one token) or a single non-space symbol byte. Whitespace never
// belongs to a token, which makes counts additive across whitespace joins:
// if a ends with whitespace, count_tokens(a + b) == count_tokens(a) +
// count_tokens(b).
long count_tokens(std::string_view text);

// Lowercased word tokens only; symbol tokens are dropped. This is the
// normalization behind ROUGE-L and the lexical context ranker.
std::vector<std::string> word_tokens(std::string_view text);

std::string_view trim(std::string_view text);
std::string to_lower(std::string_view text);

bool is_space_byte(char c);

}  // namespace streamvr
