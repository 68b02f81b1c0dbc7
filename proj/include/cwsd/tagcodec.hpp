#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cwsd {

// BMES tag set. The integer values are part of the model file format.
enum class Tag : std::uint8_t { B = 0, M = 1, E = 2, S = 3 };

inline constexpr int kNumTags = 4;
inline constexpr std::array<Tag, kNumTags> kAllTags = {Tag::B, Tag::M, Tag::E,
                                                        Tag::S};

constexpr int index_of(Tag t) { return static_cast<int>(t); }
constexpr Tag tag_from_index(int i) { return static_cast<Tag>(i); }
char tag_symbol(Tag t);

using Word = std::u32string;
using Sentence = std::vector<Word>;

struct LabeledSentence {
  std::u32string chars;
  std::vector<Tag> tags;
};

// True exactly for B->M, B->E, M->M, M->E, E->B, E->S, S->B, S->S.
constexpr bool is_valid_transition(Tag from, Tag to) {
  const bool inside = from == Tag::B || from == Tag::M;
  const bool continues = to == Tag::M || to == Tag::E;
  return inside == continues;
}

constexpr bool is_valid_start(Tag t) { return t == Tag::B || t == Tag::S; }
constexpr bool is_valid_end(Tag t) { return t == Tag::E || t == Tag::S; }

// Full-sequence BMES validity. The empty sequence is valid.
bool is_valid_sequence(std::span<const Tag> tags);

// Throws Error(kInvalidInput) on an empty word.
std::vector<Tag> words_to_tags(std::span<const Word> words);

// Total inverse of words_to_tags. Invalid sequences are repaired by placing
// a boundary before every B and S and after every E and S.
// Throws Error(kInvalidInput) when the lengths differ.
Sentence tags_to_words(std::u32string_view chars, std::span<const Tag> tags);

LabeledSentence label_sentence(std::span<const Word> words);

std::u32string join_words(std::span<const Word> words);

}  // namespace cwsd
