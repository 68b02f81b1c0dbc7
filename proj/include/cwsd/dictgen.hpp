#pragma once

// Dictionaries and the two dictionary-driven data generators: pseudo labeled
// sentences built from sampled words, and positive/negative samples for the
// word classification task.

#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cwsd/numkit.hpp"
#include "cwsd/tagcodec.hpp"
#include "cwsd/wordclf.hpp"

namespace cwsd {

enum class DictOrigin { kInternal, kExternal };

class Dictionary {
 public:
  // Returns false (and keeps the first origin) when the word already exists.
  // Throws Error(kInvalidInput) on an empty word.
  bool add(const Word& word, DictOrigin origin);

  bool contains(std::u32string_view word) const;
  DictOrigin origin(std::u32string_view word) const;

  size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  // Insertion order; this is the order sampling indexes into.
  const std::vector<Word>& words() const { return words_; }

  // Sorted distinct characters over all entries.
  std::u32string charset() const;

  // Adds every word of `other` not already present, keeping its origin.
  void merge(const Dictionary& other);

 private:
  std::vector<Word> words_;
  std::unordered_map<std::u32string, DictOrigin> entries_;
};

// One word per line, UTF-8, LF or CRLF; surrounding whitespace trimmed and
// blank lines skipped. Entries are tagged external.
Dictionary load_dictionary(const std::filesystem::path& path);

Dictionary build_internal_dictionary(std::span<const Sentence> corpus);

struct WordCountPolicy {
  int min_words = 3;
  int max_words = 8;

  static WordCountPolicy fixed(int u) { return {u, u}; }
};

// Samples `word_count` words uniformly with replacement and concatenates them.
// `sampled` receives the chosen words when non-null.
LabeledSentence gen_pseudo_sentence(const Dictionary& dict, int word_count, Rng& rng,
                                    Sentence* sampled = nullptr);

std::vector<LabeledSentence> gen_pseudo_corpus(const Dictionary& dict, size_t count,
                                               const WordCountPolicy& policy, Rng& rng);

// Counts over raw proposals, before rejection.
struct NegativeStats {
  size_t proposals = 0;
  size_t positions = 0;
  size_t replaced = 0;
};

struct NegativeConfig {
  double replace_prob = 0.5;
  int max_attempts = 100;
};

// Samples a dictionary word and replaces each character with a uniform draw
// from `charset` with probability p. Proposals that are unchanged or that are
// dictionary words are rejected; Error(kGeneration) after max_attempts.
Word gen_negative_word(const Dictionary& dict, const NegativeConfig& config,
                       std::u32string_view charset, Rng& rng,
                       NegativeStats* stats = nullptr);

// Every dictionary word as +1 plus `negatives` generated -1 samples, shuffled.
std::vector<WordSample> gen_classification_set(const Dictionary& dict, size_t negatives,
                                               const NegativeConfig& config,
                                               std::u32string_view charset, Rng& rng);

}  // namespace cwsd
