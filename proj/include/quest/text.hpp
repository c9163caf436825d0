#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace quest::text {

// Canonical string form used for node merging, similarity lookups and
// answer matching: lowercased, internal whitespace collapsed to single
// spaces, leading/trailing punctuation stripped. Lowercasing is applied
// to ASCII letters; other bytes pass through untouched.
std::string normalize(std::string_view s);

std::string to_lower(std::string_view s);

// Splits on whitespace. Does not strip punctuation.
std::vector<std::string> split_words(std::string_view s);

// normalize() followed by split_words().
std::vector<std::string> normalized_words(std::string_view s);

// True if `needle` occurs as a (not necessarily contiguous) subsequence
// of `haystack`, element-wise equal.
bool is_subsequence(const std::vector<std::string>& needle,
                    const std::vector<std::string>& haystack);

bool is_stopword(std::string_view word);
bool is_question_word(std::string_view word);

// True for tokens made entirely of punctuation characters ("," "." "--").
bool is_punctuation(std::string_view token);

}  // namespace quest::text
