#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace streamvr {

// One sentence of a segmented answer. Offsets are byte offsets into the
// source; text is exactly source[start_offset, end_offset). Whitespace
// between this sentence and the next (or the end of the source) lives in
// trailing_separator, so text + separators concatenated in order rebuild
// the source byte for byte. Leading whitespace of the source, if any,
// belongs to the first sentence's text.
struct Sentence {
  std::string text;
  std::size_t start_offset = 0;
  std::size_t end_offset = 0;
  std::string trailing_separator;

  std::string_view trimmed() const;

  // Detached sentence with no source behind it (refiner output, test data).
  static Sentence detached(std::string text);

  bool operator==(const Sentence&) const = default;
};

struct SegmentedAnswer {
  std::string source;
  std::vector<Sentence> sentences;

  // Concatenation of text + trailing_separator over all sentences. Equals
  // source for every input that contains at least one non-space byte; a
  // whitespace-only source segments to zero sentences and is the one input
  // this cannot reproduce.
  std::string reconstruct() const;

  // Trimmed sentences joined by single spaces.
  std::string joined() const;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
};

// Splits source into sentences. Boundaries sit after a terminator run
// (. ! ?) plus any closing quotes/brackets, when followed by whitespace and
// a plausible sentence start; an abbreviation guard list and a decimal
// guard suppress false splits after '.'. A blank line is a hard boundary
// even without a terminator. Empty input yields an empty answer.
SegmentedAnswer segment(std::string_view source);

// Incremental segmenter state. feed() emits a sentence only once its
// boundary is confirmed by lookahead (the first non-space byte after the
// separating whitespace); flush() emits any buffered tail and empties the
// state. For every partition of a source into chunks, feed + flush emit
// exactly the sentences of segment() on the whole string.
//
// Single-owner: not shareable across threads. Distinct states on distinct
// threads are fine; segment() is pure.
class SegmenterState {
 public:
  std::vector<Sentence> feed(std::string_view chunk);
  std::vector<Sentence> flush();

  bool has_pending() const { return !buffer_.empty(); }

 private:
  std::vector<Sentence> drain(bool at_end);

  std::string buffer_;
  std::size_t origin_ = 0;  // absolute byte offset of buffer_[0]
};

}  // namespace streamvr
