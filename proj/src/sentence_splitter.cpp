#include <algorithm>
#include <cctype>

#include "tablerag/chunker.hpp"

namespace tablerag {

namespace {

// Lowercased, without the final period.
constexpr std::string_view kAbbreviations[] = {
    "al",  "approx", "ca",   "cf",   "cl",  "corp", "dr",  "e.g",
    "eq",  "eqs",    "esp",  "et",   "etc", "fig",  "figs", "i.e",
    "inc", "incl",   "jr",   "ltd",  "mr",  "mrs",  "no",  "nos",
    "prof", "ref",   "refs", "resp", "sec", "sr",   "tab", "viz",
    "vs"};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_terminal(char c) { return c == '.' || c == '?' || c == '!'; }

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

bool is_opener(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }

// Abbreviations that also end sentences often enough that a following
// capitalized word should split ("... AMR-WB, etc. Codec negotiation ...").
constexpr std::string_view kSentenceFinalAbbreviations[] = {"etc"};

// Identifiers such as "eNB" or "gNB-CU" open sentences in technical prose
// even though their first letter is lowercase.
bool is_mixed_case_word(std::string_view text, std::size_t pos) {
  if (!std::islower(static_cast<unsigned char>(text[pos]))) return false;
  for (std::size_t i = pos + 1; i < text.size() && !is_space(text[i]); ++i) {
    if (std::isupper(static_cast<unsigned char>(text[i]))) return true;
  }
  return false;
}

std::size_t skip_openers(std::string_view text, std::size_t pos) {
  while (pos < text.size() && is_opener(text[pos])) ++pos;
  return pos;
}

bool starts_sentence(std::string_view text, std::size_t pos) {
  pos = skip_openers(text, pos);
  if (pos >= text.size()) return false;
  const auto c = static_cast<unsigned char>(text[pos]);
  return std::isupper(c) || std::isdigit(c) || is_mixed_case_word(text, pos);
}

bool starts_capitalized(std::string_view text, std::size_t pos) {
  pos = skip_openers(text, pos);
  return pos < text.size() &&
         (std::isupper(static_cast<unsigned char>(text[pos])) || is_mixed_case_word(text, pos));
}

// The whitespace-delimited word ending just before `dot`, lowercased and
// stripped of leading openers.
std::string word_before(std::string_view text, std::size_t dot) {
  std::size_t start = dot;
  while (start > 0 && !is_space(text[start - 1])) --start;
  while (start < dot && is_opener(text[start])) ++start;
  std::string word(text.substr(start, dot - start));
  std::transform(word.begin(), word.end(), word.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return word;
}

bool is_abbreviation(std::string_view word) {
  return std::find(std::begin(kAbbreviations), std::end(kAbbreviations),
                   word) != std::end(kAbbreviations);
}

void push_trimmed(std::string_view piece, std::vector<std::string>& out) {
  std::size_t b = 0;
  std::size_t e = piece.size();
  while (b < e && is_space(piece[b])) ++b;
  while (e > b && is_space(piece[e - 1])) --e;
  if (b < e) out.emplace_back(piece.substr(b, e - b));
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t sentence_start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminal(text[i])) {
      ++i;
      continue;
    }
    const std::size_t first = i;
    std::size_t end = i;
    while (end < text.size() && is_terminal(text[end])) ++end;
    const bool single_period = end - first == 1 && text[first] == '.';
    while (end < text.size() && is_closer(text[end])) ++end;
    i = end;

    if (end >= text.size() || !is_space(text[end])) continue;
    std::size_t next = end;
    while (next < text.size() && is_space(text[next])) ++next;
    if (!starts_sentence(text, next)) continue;
    if (single_period) {
      const auto word = word_before(text, first);
      const bool final_ok =
          std::find(std::begin(kSentenceFinalAbbreviations), std::end(kSentenceFinalAbbreviations),
                    word) != std::end(kSentenceFinalAbbreviations) &&
          starts_capitalized(text, next);
      if (is_abbreviation(word) && !final_ok) continue;
    }

    push_trimmed(text.substr(sentence_start, end - sentence_start), out);
    sentence_start = end;
  }
  push_trimmed(text.substr(sentence_start), out);
  return out;
}

}  // namespace tablerag
