#pragma once

#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cwsd/tagcodec.hpp"

namespace cwsd {

struct Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  size_t gold = 0;
  size_t predicted = 0;
  size_t correct = 0;
};

using Span = std::pair<size_t, size_t>;

// Half-open character offsets of each word.
std::set<Span> word_spans(std::span<const Word> words);

// Word-level P/R/F. Throws Error(kInvalidInput) if the sentence counts
// differ or any sentence pair has different character content; the message
// names the 1-based sentence number.
Score score(std::span<const Sentence> gold, std::span<const Sentence> predicted);

Score make_score(size_t gold, size_t predicted, size_t correct);

// Fraction of test tokens whose word type never occurs in `train`.
double oov_rate(std::span<const Sentence> train, std::span<const Sentence> test);

// "P\tR\tF\tgold\tpredicted\tcorrect" with 4 fraction digits on P, R, F.
std::string format_score(const Score& s);

}  // namespace cwsd
