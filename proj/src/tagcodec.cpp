#include "cwsd/tagcodec.hpp"

#include "cwsd/error.hpp"

namespace cwsd {

char tag_symbol(Tag t) {
  static constexpr char kSymbols[] = {'B', 'M', 'E', 'S'};
  return kSymbols[index_of(t)];
}

bool is_valid_sequence(std::span<const Tag> tags) {
  if (tags.empty()) return true;
  if (!is_valid_start(tags.front()) || !is_valid_end(tags.back())) return false;
  for (size_t i = 1; i < tags.size(); ++i) {
    if (!is_valid_transition(tags[i - 1], tags[i])) return false;
  }
  return true;
}

std::vector<Tag> words_to_tags(std::span<const Word> words) {
  std::vector<Tag> tags;
  for (const auto& w : words) {
    if (w.empty()) fail(ErrorKind::kInvalidInput, "empty word in segmentation");
    if (w.size() == 1) {
      tags.push_back(Tag::S);
      continue;
    }
    tags.push_back(Tag::B);
    tags.insert(tags.end(), w.size() - 2, Tag::M);
    tags.push_back(Tag::E);
  }
  return tags;
}

Sentence tags_to_words(std::u32string_view chars, std::span<const Tag> tags) {
  if (chars.size() != tags.size()) {
    fail(ErrorKind::kInvalidInput,
         "tags_to_words: " + std::to_string(chars.size()) + " characters but " +
             std::to_string(tags.size()) + " tags");
  }
  Sentence words;
  Word current;
  for (size_t i = 0; i < chars.size(); ++i) {
    const Tag t = tags[i];
    if ((t == Tag::B || t == Tag::S) && !current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
    current.push_back(chars[i]);
    if (t == Tag::E || t == Tag::S) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

LabeledSentence label_sentence(std::span<const Word> words) {
  return {join_words(words), words_to_tags(words)};
}

std::u32string join_words(std::span<const Word> words) {
  std::u32string out;
  for (const auto& w : words) out += w;
  return out;
}

}  // namespace cwsd
