#include "cwsd/dictgen.hpp"

#include <algorithm>
#include <fstream>

#include "cwsd/utf8.hpp"

namespace cwsd {

bool Dictionary::add(const Word& word, DictOrigin origin) {
  if (word.empty()) fail(ErrorKind::kInvalidInput, "dictionary word is empty");
  auto [it, inserted] = entries_.emplace(word, origin);
  if (inserted) words_.push_back(word);
  return inserted;
}

bool Dictionary::contains(std::u32string_view word) const {
  return entries_.count(std::u32string(word)) != 0;
}

DictOrigin Dictionary::origin(std::u32string_view word) const {
  auto it = entries_.find(std::u32string(word));
  if (it == entries_.end()) {
    fail(ErrorKind::kInvalidInput, "word not in dictionary: " + utf8::encode(word));
  }
  return it->second;
}

std::u32string Dictionary::charset() const {
  std::u32string chars;
  for (const auto& w : words_) chars += w;
  std::sort(chars.begin(), chars.end());
  chars.erase(std::unique(chars.begin(), chars.end()), chars.end());
  return chars;
}

void Dictionary::merge(const Dictionary& other) {
  for (const auto& w : other.words_) add(w, other.origin(w));
}

Dictionary load_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open dictionary " + path.string());
  Dictionary dict;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto trimmed = utf8::trim(line);
    if (trimmed.empty()) continue;
    try {
      dict.add(utf8::decode(trimmed), DictOrigin::kExternal);
    } catch (const Error& e) {
      fail(e.kind(), path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (in.bad()) fail(ErrorKind::kIo, "read error on " + path.string());
  return dict;
}

Dictionary build_internal_dictionary(std::span<const Sentence> corpus) {
  Dictionary dict;
  for (const auto& sentence : corpus) {
    for (const auto& w : sentence) dict.add(w, DictOrigin::kInternal);
  }
  return dict;
}

LabeledSentence gen_pseudo_sentence(const Dictionary& dict, int word_count, Rng& rng,
                                    Sentence* sampled) {
  if (dict.empty()) fail(ErrorKind::kInvalidInput, "pseudo sentence: empty dictionary");
  if (word_count < 1) fail(ErrorKind::kInvalidInput, "pseudo sentence: word count must be >= 1");
  std::uniform_int_distribution<size_t> pick(0, dict.size() - 1);
  Sentence words;
  words.reserve(static_cast<size_t>(word_count));
  for (int i = 0; i < word_count; ++i) words.push_back(dict.words()[pick(rng)]);
  auto labeled = label_sentence(words);
  if (sampled) *sampled = std::move(words);
  return labeled;
}

std::vector<LabeledSentence> gen_pseudo_corpus(const Dictionary& dict, size_t count,
                                               const WordCountPolicy& policy, Rng& rng) {
  if (dict.empty()) fail(ErrorKind::kInvalidInput, "pseudo corpus: empty dictionary");
  if (policy.min_words < 1 || policy.max_words < policy.min_words) {
    fail(ErrorKind::kInvalidInput, "pseudo corpus: invalid word count range");
  }
  std::uniform_int_distribution<int> words_per(policy.min_words, policy.max_words);
  std::vector<LabeledSentence> corpus;
  corpus.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    corpus.push_back(gen_pseudo_sentence(dict, words_per(rng), rng));
  }
  return corpus;
}

Word gen_negative_word(const Dictionary& dict, const NegativeConfig& config,
                       std::u32string_view charset, Rng& rng, NegativeStats* stats) {
  if (dict.empty()) fail(ErrorKind::kInvalidInput, "negative word: empty dictionary");
  if (charset.empty()) fail(ErrorKind::kInvalidInput, "negative word: empty charset");
  if (!(config.replace_prob > 0.0 && config.replace_prob <= 1.0)) {
    fail(ErrorKind::kInvalidInput, "negative word: replace probability must be in (0, 1]");
  }
  std::uniform_int_distribution<size_t> pick_word(0, dict.size() - 1);
  std::uniform_int_distribution<size_t> pick_char(0, charset.size() - 1);
  std::bernoulli_distribution replace(config.replace_prob);

  for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
    const Word& source = dict.words()[pick_word(rng)];
    Word candidate = source;
    for (auto& c : candidate) {
      if (replace(rng)) {
        c = charset[pick_char(rng)];
        if (stats) ++stats->replaced;
      }
    }
    if (stats) {
      ++stats->proposals;
      stats->positions += candidate.size();
    }
    if (candidate != source && !dict.contains(candidate)) return candidate;
  }
  fail(ErrorKind::kGeneration, "negative word: no acceptable candidate after " +
                                   std::to_string(config.max_attempts) + " attempts");
}

std::vector<WordSample> gen_classification_set(const Dictionary& dict, size_t negatives,
                                               const NegativeConfig& config,
                                               std::u32string_view charset, Rng& rng) {
  if (dict.empty()) fail(ErrorKind::kInvalidInput, "classification set: empty dictionary");
  std::vector<WordSample> samples;
  samples.reserve(dict.size() + negatives);
  for (const auto& w : dict.words()) samples.push_back({w, 1});
  for (size_t i = 0; i < negatives; ++i) {
    samples.push_back({gen_negative_word(dict, config, charset, rng), -1});
  }
  std::shuffle(samples.begin(), samples.end(), rng);
  return samples;
}

}  // namespace cwsd
