#include "cwsd/wordclf.hpp"

namespace cwsd {

namespace {

void check_label(int label) {
  if (label != 1 && label != -1) {
    fail(ErrorKind::kInvalidInput, "word label must be +1 or -1, got " +
                                       std::to_string(label));
  }
}

}  // namespace

Vector max_pool(const Matrix& hidden, std::vector<Eigen::Index>* argmax) {
  if (hidden.rows() == 0) fail(ErrorKind::kInvalidInput, "max_pool over zero rows");
  Vector pooled(hidden.cols());
  if (argmax) argmax->assign(static_cast<size_t>(hidden.cols()), 0);
  for (Eigen::Index c = 0; c < hidden.cols(); ++c) {
    Eigen::Index best = 0;
    for (Eigen::Index r = 1; r < hidden.rows(); ++r) {
      if (hidden(r, c) > hidden(best, c)) best = r;
    }
    pooled(c) = hidden(best, c);
    if (argmax) (*argmax)[static_cast<size_t>(c)] = best;
  }
  return pooled;
}

double score_word_ids(std::span<const int> ids, const Params& params,
                      const DropoutSpec& dropout, Rng& rng, ClfCache* cache) {
  if (ids.empty()) fail(ErrorKind::kInvalidInput, "score_word: empty word");
  EncoderCache* enc_cache = cache ? &cache->encoder : nullptr;
  const Matrix hidden = encode_ids(ids, params, dropout, rng, enc_cache);
  std::vector<Eigen::Index> argmax;
  Vector pooled = max_pool(hidden, &argmax);
  const double s = params.clf_u.dot(pooled) + params.clf_bias(0);
  if (cache) {
    cache->pooled = std::move(pooled);
    cache->argmax = std::move(argmax);
    cache->score = s;
    cache->ready = true;
  }
  return s;
}

double score_word(std::u32string_view chars, const Vocab& vocab, const Params& params,
                  const DropoutSpec& dropout, Rng& rng, ClfCache* cache) {
  if (chars.empty()) fail(ErrorKind::kInvalidInput, "score_word: empty word");
  const auto ids = vocab.lookup(chars);
  return score_word_ids(ids, params, dropout, rng, cache);
}

double clf_loss(double score, int label) {
  check_label(label);
  return softplus(-label * score);
}

double clf_loss_derivative(double score, int label) {
  check_label(label);
  return -label * sigmoid(-label * score);
}

void clf_backward(const ClfCache& cache, int label, const Params& params,
                  Params& grads, double weight) {
  if (!cache.ready) fail(ErrorKind::kInvalidState, "clf_backward: no cached forward pass");
  const double g = weight * clf_loss_derivative(cache.score, label);
  grads.clf_u += g * cache.pooled;
  grads.clf_bias(0) += g;

  const auto M = static_cast<Eigen::Index>(cache.encoder.ids.size());
  Matrix d_hidden = Matrix::Zero(M, params.hidden_dim());
  for (size_t c = 0; c < cache.argmax.size(); ++c) {
    const auto col = static_cast<Eigen::Index>(c);
    d_hidden(cache.argmax[c], col) = g * params.clf_u(col);
  }
  encoder_backward_hidden(cache.encoder, d_hidden, params, grads);
}

}  // namespace cwsd
