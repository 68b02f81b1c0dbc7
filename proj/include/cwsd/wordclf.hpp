#pragma once

// Word classification branch: shared encoder -> column-wise max-pool ->
// linear score. The loss is log(1 + exp(-y*s)) for labels y in {+1, -1}.

#include <string>
#include <vector>

#include "cwsd/encoder.hpp"

namespace cwsd {

struct WordSample {
  std::u32string chars;
  int label = 1;  // +1 word, -1 non-word
};

struct ClfCache {
  EncoderCache encoder;
  Vector pooled;
  std::vector<Eigen::Index> argmax;  // per column, first row on ties
  double score = 0.0;
  bool ready = false;
};

// Column-wise max over rows; `argmax` receives the first maximizing row.
Vector max_pool(const Matrix& hidden, std::vector<Eigen::Index>* argmax = nullptr);

double score_word(std::u32string_view chars, const Vocab& vocab, const Params& params,
                  const DropoutSpec& dropout, Rng& rng, ClfCache* cache = nullptr);

double score_word_ids(std::span<const int> ids, const Params& params,
                      const DropoutSpec& dropout, Rng& rng, ClfCache* cache = nullptr);

double clf_loss(double score, int label);

// dL/ds for clf_loss.
double clf_loss_derivative(double score, int label);

// Accumulates weight * dL/dparams into `grads` (head and shared encoder).
void clf_backward(const ClfCache& cache, int label, const Params& params,
                  Params& grads, double weight = 1.0);

}  // namespace cwsd
