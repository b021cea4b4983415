#include "streamvr/segmenter.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

#include "streamvr/text.hpp"

namespace streamvr {

namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_closer(char c) {
  return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}';
}

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

bool is_plausible_start(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  if (u >= 0x80) return true;
  if (std::isupper(u) || std::isdigit(u)) return true;
  switch (c) {
    case '"':
    case '\'':
    case '(':
    case '[':
    case '{':
    case '$':
      return true;
    default:
      return false;
  }
}

// Abbreviations that almost never end a sentence. Entries are lowercase,
// internal dots kept, final dot stripped.
const std::unordered_set<std::string>& always_guard() {
  static const std::unordered_set<std::string> set{
      "mr",   "mrs",  "ms",   "dr",   "prof", "rev",  "gen",  "col",
      "sgt",  "capt", "lt",   "cmdr", "hon",  "fr",   "pres", "gov",
      "sen",  "rep",  "supt", "det",  "messrs",
      "st",   "mt",   "ft",   "jr",   "sr",
      "jan",  "feb",  "mar",  "apr",  "jun",  "jul",  "aug",  "sep",
      "sept", "oct",  "nov",  "dec",
      "e.g",  "i.e",  "cf",   "viz",  "vs",   "al",   "ca",
      "a.m",  "p.m",
      "u.s",  "u.k",  "u.n",  "d.c",
      "inc",  "ltd",  "co",   "corp", "bros",
      "ave",  "blvd", "rd",   "hwy",  "apt",
      "dept", "univ", "assn",
  };
  return set;
}

// Abbreviations guarded only when a number follows ("Fig. 3", "No. 10").
const std::unordered_set<std::string>& numeric_guard() {
  static const std::unordered_set<std::string> set{
      "no", "nos", "vol", "vols", "fig", "figs",
      "pp", "pg",  "ch",  "sec",  "art", "op",  "pt",
  };
  return set;
}

bool dot_boundary_guarded(std::string_view buf, std::size_t dot_pos, char next_c) {
  // Word before the dot, scanned backward over letters and internal dots.
  std::size_t begin = dot_pos;
  while (begin > 0 && (is_alpha(buf[begin - 1]) || buf[begin - 1] == '.')) --begin;
  if (begin == dot_pos) return false;  // no word: "... 3." or ". ."
  std::string word = to_lower(buf.substr(begin, dot_pos - begin));
  while (!word.empty() && word.front() == '.') word.erase(word.begin());
  if (word.empty()) return false;
  // Initials guard ("J. Smith"): a lone letter counts only when uppercase,
  // otherwise contractions like "doesn't." would be swallowed.
  if (word.size() == 1 && is_alpha(word[0]) &&
      std::isupper(static_cast<unsigned char>(buf[dot_pos - 1]))) {
    return true;
  }
  if (always_guard().count(word)) return true;
  if (is_digit(next_c) && numeric_guard().count(word)) return true;
  return false;
}

bool is_boundary(std::string_view buf, std::size_t run_start, std::size_t run_end,
                 char next_c) {
  if (!is_plausible_start(next_c)) return false;
  bool single_dot = run_start == run_end && buf[run_start] == '.';
  if (single_dot && dot_boundary_guarded(buf, run_start, next_c)) return false;
  return true;
}

struct ScanHit {
  std::size_t sent_end;  // one past the last byte of the sentence
  std::size_t sep_end;   // one past the last byte of its separator
};

// Finds the first boundary in buf that is already confirmed, i.e. every
// byte needed for the decision (complete terminator run, complete closing
// run, the separating whitespace and the byte after it) is present. With
// at_end set, end-of-input itself confirms. Returning nullopt never commits
// to anything, which is what makes feeding chunk partitions equivalent to
// segmenting the whole string.
std::optional<ScanHit> scan_sentence(std::string_view buf, bool at_end) {
  const std::size_t n = buf.size();
  std::size_t i = 0;
  while (i < n && is_space_byte(buf[i])) ++i;  // head whitespace stays in text
  if (i >= n) return std::nullopt;

  std::size_t pos = i;
  while (pos < n) {
    char c = buf[pos];
    if (is_terminator(c)) {
      std::size_t run_end = pos;
      while (run_end + 1 < n && is_terminator(buf[run_end + 1])) ++run_end;
      if (run_end + 1 >= n && !at_end) return std::nullopt;  // run may grow
      std::size_t close_end = run_end;
      while (close_end + 1 < n && is_closer(buf[close_end + 1])) ++close_end;
      if (close_end + 1 >= n) return std::nullopt;  // flush tail handles this
      std::size_t after = close_end + 1;
      if (!is_space_byte(buf[after])) {
        // No whitespace: not a boundary. Covers decimals ("3.14") and
        // glued abbreviations ("e.g.x").
        pos = after;
        continue;
      }
      std::size_t ws_end = after;
      int newlines = 0;
      while (ws_end < n && is_space_byte(buf[ws_end])) {
        if (buf[ws_end] == '\n') ++newlines;
        ++ws_end;
      }
      if (ws_end >= n && !at_end) return std::nullopt;  // separator still open
      std::size_t sent_end = close_end + 1;
      if (ws_end >= n) return ScanHit{sent_end, ws_end};    // trailing whitespace
      if (newlines >= 2) return ScanHit{sent_end, ws_end};  // blank line
      if (is_boundary(buf, pos, run_end, buf[ws_end])) {
        return ScanHit{sent_end, ws_end};
      }
      pos = ws_end;
      continue;
    }
    if (is_space_byte(c)) {
      std::size_t ws_end = pos;
      int newlines = 0;
      while (ws_end < n && is_space_byte(buf[ws_end])) {
        if (buf[ws_end] == '\n') ++newlines;
        ++ws_end;
      }
      if (newlines >= 2) {
        if (ws_end >= n && !at_end) return std::nullopt;
        return ScanHit{pos, ws_end};  // blank line is a hard boundary
      }
      pos = ws_end;
      continue;
    }
    ++pos;
  }
  return std::nullopt;
}

}  // namespace

std::string_view Sentence::trimmed() const { return trim(text); }

Sentence Sentence::detached(std::string text) {
  Sentence s;
  s.start_offset = 0;
  s.end_offset = text.size();
  s.text = std::move(text);
  return s;
}

std::string SegmentedAnswer::reconstruct() const {
  std::string out;
  out.reserve(source.size());
  for (const Sentence& s : sentences) {
    out += s.text;
    out += s.trailing_separator;
  }
  return out;
}

std::string SegmentedAnswer::joined() const {
  std::string out;
  for (const Sentence& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s.trimmed();
  }
  return out;
}

std::vector<Sentence> SegmenterState::feed(std::string_view chunk) {
  buffer_.append(chunk);
  return drain(false);
}

std::vector<Sentence> SegmenterState::flush() {
  std::vector<Sentence> out = drain(true);
  if (!buffer_.empty()) {
    std::size_t last = buffer_.find_last_not_of(" \t\r\n\f\v");
    if (last != std::string::npos) {
      Sentence s;
      s.text = buffer_.substr(0, last + 1);
      s.start_offset = origin_;
      s.end_offset = origin_ + last + 1;
      s.trailing_separator = buffer_.substr(last + 1);
      out.push_back(std::move(s));
    }
    // A tail without any non-space byte is dropped: a whitespace-only source
    // has no sentences.
    origin_ += buffer_.size();
    buffer_.clear();
  }
  return out;
}

std::vector<Sentence> SegmenterState::drain(bool at_end) {
  std::vector<Sentence> out;
  while (true) {
    auto hit = scan_sentence(buffer_, at_end);
    if (!hit) break;
    Sentence s;
    s.text = buffer_.substr(0, hit->sent_end);
    s.start_offset = origin_;
    s.end_offset = origin_ + hit->sent_end;
    s.trailing_separator = buffer_.substr(hit->sent_end, hit->sep_end - hit->sent_end);
    out.push_back(std::move(s));
    buffer_.erase(0, hit->sep_end);
    origin_ += hit->sep_end;
  }
  return out;
}

SegmentedAnswer segment(std::string_view source) {
  SegmentedAnswer answer;
  answer.source.assign(source);
  SegmenterState state;
  answer.sentences = state.feed(source);
  for (Sentence& s : state.flush()) {
    answer.sentences.push_back(std::move(s));
  }
  return answer;
}

}  // namespace streamvr
