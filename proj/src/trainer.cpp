#include "cwsd/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "cwsd/eval.hpp"

namespace cwsd {

double accumulate_sentence(const LabeledSentence& sentence, const Model& model,
                           const DropoutSpec& dropout, Rng& rng, Params& grads,
                           double weight) {
  if (sentence.chars.empty()) fail(ErrorKind::kInvalidInput, "empty training sentence");
  EncoderCache cache;
  const auto ids = model.vocab.lookup(sentence.chars);
  const Matrix hidden = encode_ids(ids, model.params, dropout, rng, &cache);
  const Matrix S = emission_scores(hidden, model.params);
  auto result = crf::nll_and_gradients(S, crf_transitions(model), sentence.tags);
  auto& g = result.grads;
  if (weight != 1.0) {
    g.dS *= weight;
    g.dA *= weight;
    g.dstart *= weight;
  }
  grads.trans += g.dA;
  grads.start += g.dstart;
  encoder_backward(cache, g.dS, model.params, grads);
  return result.nll;
}

LossGrad batch_loss_cws(std::span<const LabeledSentence> batch, const Model& model,
                        const DropoutSpec& dropout, Rng& rng) {
  LossGrad out{0.0, zeros_like(model.params)};
  for (const auto& s : batch) out.loss += accumulate_sentence(s, model, dropout, rng, out.grads);
  return out;
}

LossGrad loss_pseudo(std::span<const LabeledSentence> gold,
                     std::span<const LabeledSentence> pseudo, double lambda1,
                     const Model& model, const DropoutSpec& dropout, Rng& rng) {
  if (!(lambda1 >= 0.0)) fail(ErrorKind::kInvalidInput, "lambda1 must be >= 0");
  LossGrad out = batch_loss_cws(gold, model, dropout, rng);
  const LossGrad aux = batch_loss_cws(pseudo, model, dropout, rng);
  if (lambda1 != 0.0) {
    out.loss += lambda1 * aux.loss;
    add_scaled(out.grads, aux.grads, lambda1);
  }
  return out;
}

LossGrad loss_weighted(std::span<const WeightedSentence> batch, const Model& model,
                       const DropoutSpec& dropout, Rng& rng) {
  LossGrad out{0.0, zeros_like(model.params)};
  for (const auto& item : batch) {
    if (!(item.weight >= 0.0)) fail(ErrorKind::kInvalidInput, "sentence weight must be >= 0");
    const double nll =
        accumulate_sentence(*item.sentence, model, dropout, rng, out.grads, item.weight);
    out.loss += item.weight * nll;
  }
  return out;
}

LossGrad loss_multitask(std::span<const LabeledSentence> cws,
                        std::span<const WordSample> words, double lambda2,
                        const Model& model, const DropoutSpec& dropout, Rng& rng) {
  if (!(lambda2 >= 0.0 && lambda2 <= 1.0)) {
    fail(ErrorKind::kInvalidInput, "lambda2 must be in [0, 1]");
  }
  const double cws_weight = 1.0 - lambda2;
  LossGrad out{0.0, zeros_like(model.params)};

  if (cws_weight != 0.0) {
    for (const auto& s : cws) {
      out.loss += cws_weight * accumulate_sentence(s, model, dropout, rng, out.grads, cws_weight);
    }
  } else {
    Params discard = zeros_like(model.params);
    for (const auto& s : cws) accumulate_sentence(s, model, dropout, rng, discard);
  }

  Params word_grads = zeros_like(model.params);
  double word_loss = 0.0;
  for (const auto& w : words) {
    ClfCache cache;
    const auto ids = model.vocab.lookup(w.chars);
    const double s = score_word_ids(ids, model.params, dropout, rng, &cache);
    word_loss += clf_loss(s, w.label);
    clf_backward(cache, w.label, model.params, word_grads);
  }
  if (lambda2 != 0.0) {
    out.loss += lambda2 * word_loss;
    add_scaled(out.grads, word_grads, lambda2);
  }
  return out;
}

double corpus_nll(std::span<const LabeledSentence> corpus, const Model& model) {
  const auto trans = crf_transitions(model);
  double total = 0.0;
  for (const auto& s : corpus) {
    if (s.chars.empty()) continue;
    total += crf::nll(sentence_emissions(model, s.chars), trans, s.tags);
  }
  return total;
}

double corpus_f1(std::span<const LabeledSentence> corpus, const Model& model) {
  std::vector<Sentence> gold;
  std::vector<Sentence> pred;
  gold.reserve(corpus.size());
  pred.reserve(corpus.size());
  for (const auto& s : corpus) {
    gold.push_back(tags_to_words(s.chars, s.tags));
    pred.push_back(segment(model, s.chars));
  }
  return score(gold, pred).f1;
}

void TrainConfig::validate() const {
  if (!(lambda1 >= 0.0)) fail(ErrorKind::kInvalidInput, "lambda1 must be >= 0");
  if (!(lambda2 >= 0.0 && lambda2 <= 1.0)) fail(ErrorKind::kInvalidInput, "lambda2 must be in [0, 1]");
  if (batch_size < 1) fail(ErrorKind::kInvalidInput, "batch size must be >= 1");
  if (patience < 1) fail(ErrorKind::kInvalidInput, "patience must be >= 1");
  if (max_epochs < 1) fail(ErrorKind::kInvalidInput, "max epochs must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail(ErrorKind::kInvalidInput, "dropout must be in [0, 1)");
  if (!(optimizer.learning_rate > 0.0)) fail(ErrorKind::kInvalidInput, "learning rate must be > 0");
  if (!(optimizer.decay > 0.0 && optimizer.decay < 1.0)) fail(ErrorKind::kInvalidInput, "rmsprop decay must be in (0, 1)");
  if (!(optimizer.epsilon > 0.0)) fail(ErrorKind::kInvalidInput, "rmsprop epsilon must be > 0");
}

std::string format_epoch(const EpochRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d\t%.6f\t%.6f\t%.4f", r.epoch, r.train_loss,
                r.dev_loss, r.dev_f1);
  return buf;
}

bool EarlyStopping::observe(double dev_loss) {
  ++epoch_;
  if (epoch_ == 1 || dev_loss < best_) {
    best_ = dev_loss;
    best_epoch_ = epoch_;
    stale_ = 0;
    return true;
  }
  ++stale_;
  return false;
}

RmsProp::RmsProp(const Params& like, RmsPropConfig config)
    : acc_(zeros_like(like)), config_(config) {}

void RmsProp::step(Params& params, const Params& grads, bool freeze_embeddings) {
  if (!freeze_embeddings) rmsprop_step(params.embedding, grads.embedding, acc_.embedding, config_);
  for (size_t i = 0; i < params.conv.size(); ++i) {
    rmsprop_step(params.conv[i].weights, grads.conv[i].weights, acc_.conv[i].weights, config_);
    rmsprop_step(params.conv[i].bias, grads.conv[i].bias, acc_.conv[i].bias, config_);
  }
  rmsprop_step(params.proj, grads.proj, acc_.proj, config_);
  rmsprop_step(params.proj_bias, grads.proj_bias, acc_.proj_bias, config_);
  rmsprop_step(params.trans, grads.trans, acc_.trans, config_);
  rmsprop_step(params.start, grads.start, acc_.start, config_);
  rmsprop_step(params.clf_u, grads.clf_u, acc_.clf_u, config_);
  rmsprop_step(params.clf_bias, grads.clf_bias, acc_.clf_bias, config_);
}

namespace {

// Endless shuffled stream over [0, n), reshuffled on every wrap.
class Cycler {
 public:
  explicit Cycler(size_t n) : order_(n) { std::iota(order_.begin(), order_.end(), 0); }

  size_t next(Rng& rng) {
    if (pos_ == 0) std::shuffle(order_.begin(), order_.end(), rng);
    const size_t v = order_[pos_];
    pos_ = (pos_ + 1) % order_.size();
    return v;
  }

 private:
  std::vector<size_t> order_;
  size_t pos_ = 0;
};

}  // namespace

TrainReport train(Model& model, const TrainData& data, const TrainConfig& config,
                  std::ostream* progress) {
  config.validate();
  if (data.train.empty()) fail(ErrorKind::kInvalidInput, "training set is empty");
  if (data.dev.empty()) fail(ErrorKind::kInvalidInput, "development set is empty");
  if (config.mode == TrainMode::kPseudo && data.pseudo.empty()) {
    fail(ErrorKind::kInvalidInput, "pseudo mode needs pseudo labeled sentences");
  }
  if (config.mode == TrainMode::kMultitask && data.words.empty()) {
    fail(ErrorKind::kInvalidInput, "multitask mode needs word classification samples");
  }

  const auto started = std::chrono::steady_clock::now();
  Rng rng(config.seed);
  const DropoutSpec dropout{config.dropout, true};
  RmsProp optimizer(model.params, config.optimizer);
  EarlyStopping stopper(config.patience);
  Params best = model.params;
  TrainReport report;

  const bool mixed = config.mode == TrainMode::kPseudo &&
                     config.pseudo_schedule == PseudoSchedule::kMixed;
  std::vector<WeightedSentence> pool;
  if (mixed) {
    for (const auto& s : data.train) pool.push_back({&s, 1.0});
    for (const auto& s : data.pseudo) pool.push_back({&s, config.lambda1});
  }
  Cycler pseudo_stream(std::max<size_t>(data.pseudo.size(), 1));
  Cycler word_stream(std::max<size_t>(data.words.size(), 1));

  std::vector<size_t> order(mixed ? pool.size() : data.train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const size_t end = std::min(order.size(), begin + config.batch_size);
      LossGrad step;
      if (mixed) {
        std::vector<WeightedSentence> batch;
        for (size_t i = begin; i < end; ++i) batch.push_back(pool[order[i]]);
        step = loss_weighted(batch, model, dropout, rng);
      } else {
        std::vector<LabeledSentence> batch;
        for (size_t i = begin; i < end; ++i) batch.push_back(data.train[order[i]]);
        switch (config.mode) {
          case TrainMode::kBaseline:
            step = batch_loss_cws(batch, model, dropout, rng);
            break;
          case TrainMode::kPseudo: {
            std::vector<LabeledSentence> aux;
            for (size_t i = begin; i < end; ++i) aux.push_back(data.pseudo[pseudo_stream.next(rng)]);
            step = loss_pseudo(batch, aux, config.lambda1, model, dropout, rng);
            break;
          }
          case TrainMode::kMultitask: {
            std::vector<WordSample> aux;
            for (size_t i = 0; i < config.batch_size; ++i) aux.push_back(data.words[word_stream.next(rng)]);
            step = loss_multitask(batch, aux, config.lambda2, model, dropout, rng);
            break;
          }
        }
      }
      epoch_loss += step.loss;
      optimizer.step(model.params, step.grads, config.freeze_embeddings);
    }

    EpochRecord record{epoch, epoch_loss, corpus_nll(data.dev, model),
                       corpus_f1(data.dev, model)};
    report.epochs.push_back(record);
    if (progress) *progress << format_epoch(record) << '\n' << std::flush;
    if (stopper.observe(record.dev_loss)) best = model.params;
    if (stopper.should_stop()) break;
  }

  model.params = std::move(best);
  report.best_epoch = stopper.best_epoch();
  report.stop_epoch = static_cast<int>(report.epochs.size());
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace cwsd
