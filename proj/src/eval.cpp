#include "cwsd/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

#include "cwsd/error.hpp"

namespace cwsd {

std::set<Span> word_spans(std::span<const Word> words) {
  std::set<Span> spans;
  size_t offset = 0;
  for (const auto& w : words) {
    spans.emplace(offset, offset + w.size());
    offset += w.size();
  }
  return spans;
}

Score make_score(size_t gold, size_t predicted, size_t correct) {
  Score s;
  s.gold = gold;
  s.predicted = predicted;
  s.correct = correct;
  s.precision = predicted ? static_cast<double>(correct) / predicted : 0.0;
  s.recall = gold ? static_cast<double>(correct) / gold : 0.0;
  // Same value as 2PR/(P+R), without the intermediate rounding.
  s.f1 = gold + predicted ? 2.0 * static_cast<double>(correct) / static_cast<double>(gold + predicted) : 0.0;
  return s;
}

Score score(std::span<const Sentence> gold, std::span<const Sentence> predicted) {
  if (gold.size() != predicted.size()) {
    fail(ErrorKind::kInvalidInput, "gold has " + std::to_string(gold.size()) +
                                       " sentences but prediction has " +
                                       std::to_string(predicted.size()));
  }
  size_t n_gold = 0;
  size_t n_pred = 0;
  size_t n_correct = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    if (join_words(gold[i]) != join_words(predicted[i])) {
      fail(ErrorKind::kInvalidInput,
           "character mismatch at sentence " + std::to_string(i + 1));
    }
    const auto g = word_spans(gold[i]);
    const auto p = word_spans(predicted[i]);
    n_gold += g.size();
    n_pred += p.size();
    for (const auto& span : p) n_correct += g.count(span);
  }
  return make_score(n_gold, n_pred, n_correct);
}

double oov_rate(std::span<const Sentence> train, std::span<const Sentence> test) {
  std::unordered_set<std::u32string> known;
  for (const auto& s : train) known.insert(s.begin(), s.end());
  size_t tokens = 0;
  size_t unseen = 0;
  for (const auto& s : test) {
    for (const auto& w : s) {
      ++tokens;
      unseen += known.count(w) == 0;
    }
  }
  return tokens ? static_cast<double>(unseen) / tokens : 0.0;
}

std::string format_score(const Score& s) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.4f\t%.4f\t%.4f\t%zu\t%zu\t%zu", s.precision,
                s.recall, s.f1, s.gold, s.predicted, s.correct);
  return buf;
}

}  // namespace cwsd
