#include "quest/text.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace quest::text {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_punct_char(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

const std::unordered_set<std::string>& stopword_set() {
  // Function words only; content words never appear here.
  static const std::unordered_set<std::string> kStopwords = {
      "a",       "about",  "above",   "after",   "again",   "against",
      "all",     "am",     "an",      "and",     "any",     "are",
      "as",      "at",     "be",      "because", "been",    "before",
      "being",   "below",  "between", "both",    "but",     "by",
      "can",     "could",  "did",     "do",      "does",    "doing",
      "down",    "during", "each",    "few",     "for",     "from",
      "further", "had",    "has",     "have",    "having",  "he",
      "her",     "here",   "hers",    "herself", "him",     "himself",
      "his",     "i",      "if",      "in",      "into",    "is",
      "it",      "its",    "itself",  "just",    "may",     "me",
      "might",   "more",   "most",    "must",    "my",      "myself",
      "no",      "nor",    "not",     "now",     "of",      "off",
      "on",      "once",   "only",    "or",      "other",   "our",
      "ours",    "out",    "over",    "own",     "same",    "shall",
      "she",     "should", "so",      "some",    "such",    "than",
      "that",    "the",    "their",   "theirs",  "them",    "then",
      "there",   "these",  "they",    "this",    "those",   "through",
      "to",      "too",    "under",   "until",   "up",      "very",
      "was",     "we",     "were",    "while",   "will",    "with",
      "would",   "you",    "your",    "yours",
  };
  return kStopwords;
}

const std::unordered_set<std::string>& question_word_set() {
  static const std::unordered_set<std::string> kQuestionWords = {
      "who", "whom", "whose", "what", "which", "where", "when", "why", "how",
  };
  return kQuestionWords;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string normalize(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  // Strip leading/trailing punctuation runs.
  std::size_t begin = 0;
  std::size_t end = out.size();
  while (begin < end && is_punct_char(out[begin])) ++begin;
  while (end > begin && is_punct_char(out[end - 1])) --end;
  std::string trimmed = out.substr(begin, end - begin);
  // Re-collapse whitespace exposed by the strip ("'a b'" -> "a b").
  while (!trimmed.empty() && trimmed.front() == ' ') trimmed.erase(trimmed.begin());
  while (!trimmed.empty() && trimmed.back() == ' ') trimmed.pop_back();
  return trimmed;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::string current;
  for (char c : s) {
    if (is_space(c)) {
      if (!current.empty()) {
        words.push_back(current);
        current.clear();
      }
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) words.push_back(current);
  return words;
}

std::vector<std::string> normalized_words(std::string_view s) {
  return split_words(normalize(s));
}

bool is_subsequence(const std::vector<std::string>& needle,
                    const std::vector<std::string>& haystack) {
  if (needle.empty()) return false;
  std::size_t i = 0;
  for (const auto& word : haystack) {
    if (word == needle[i]) {
      if (++i == needle.size()) return true;
    }
  }
  return false;
}

bool is_stopword(std::string_view word) {
  return stopword_set().count(to_lower(word)) > 0;
}

bool is_question_word(std::string_view word) {
  return question_word_set().count(to_lower(word)) > 0;
}

bool is_punctuation(std::string_view token) {
  if (token.empty()) return false;
  return std::all_of(token.begin(), token.end(),
                     [](char c) { return is_punct_char(c); });
}

}  // namespace quest::text
