#pragma once

// Loss functions and the training loop.
//
//   baseline:  sum of CRF negative log-likelihoods over gold sentences
//   pseudo:    gold loss + lambda1 * pseudo-sentence loss
//   multitask: (1 - lambda2) * gold loss + lambda2 * word classification loss
//
// Losses are summed (not averaged) over a batch.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cwsd/model.hpp"
#include "cwsd/wordclf.hpp"

namespace cwsd {

struct LossGrad {
  double loss = 0.0;
  Params grads;
};

// Adds weight * d(nll)/dparams for one sentence to `grads`; returns the
// unweighted nll.
double accumulate_sentence(const LabeledSentence& sentence, const Model& model,
                           const DropoutSpec& dropout, Rng& rng, Params& grads,
                           double weight = 1.0);

LossGrad batch_loss_cws(std::span<const LabeledSentence> batch, const Model& model,
                        const DropoutSpec& dropout, Rng& rng);

// The pseudo batch is always evaluated (same random-number consumption for
// every lambda1) but contributes nothing when lambda1 == 0.
LossGrad loss_pseudo(std::span<const LabeledSentence> gold,
                     std::span<const LabeledSentence> pseudo, double lambda1,
                     const Model& model, const DropoutSpec& dropout, Rng& rng);

struct WeightedSentence {
  const LabeledSentence* sentence = nullptr;
  double weight = 1.0;
};

// Single-pool variant of the pseudo objective: sum of weight * nll.
LossGrad loss_weighted(std::span<const WeightedSentence> batch, const Model& model,
                       const DropoutSpec& dropout, Rng& rng);

// The CWS branch runs first, then the word branch; a branch whose weight is
// zero is evaluated but not accumulated.
LossGrad loss_multitask(std::span<const LabeledSentence> cws,
                        std::span<const WordSample> words, double lambda2,
                        const Model& model, const DropoutSpec& dropout, Rng& rng);

// Inference-mode nll summed over a corpus.
double corpus_nll(std::span<const LabeledSentence> corpus, const Model& model);

// Word-level F of Viterbi output against gold tags.
double corpus_f1(std::span<const LabeledSentence> corpus, const Model& model);

enum class TrainMode { kBaseline, kPseudo, kMultitask };
enum class PseudoSchedule { kPaired, kMixed };

struct TrainConfig {
  TrainMode mode = TrainMode::kBaseline;
  double lambda1 = 1.0;
  double lambda2 = 0.3;
  RmsPropConfig optimizer;
  size_t batch_size = 64;
  double dropout = 0.3;
  int patience = 3;
  int max_epochs = 200;
  std::uint64_t seed = 1;
  bool freeze_embeddings = false;
  PseudoSchedule pseudo_schedule = PseudoSchedule::kPaired;

  // Throws Error(kInvalidInput) on out-of-range settings.
  void validate() const;
};

struct TrainData {
  std::span<const LabeledSentence> train;
  std::span<const LabeledSentence> dev;
  std::span<const LabeledSentence> pseudo;
  std::span<const WordSample> words;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_loss = 0.0;
  double dev_f1 = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  int stop_epoch = 0;
  double wall_seconds = 0.0;
};

// "epoch\ttrain_loss\tdev_loss\tdev_F"
std::string format_epoch(const EpochRecord& r);

// Dev-loss early stopping: stop once `patience` consecutive epochs fail to
// improve on the best loss so far.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience) : patience_(patience) {}

  // Returns true when `dev_loss` is a new best.
  bool observe(double dev_loss);
  bool should_stop() const { return stale_ >= patience_; }
  int best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_; }

 private:
  int patience_;
  int epoch_ = 0;
  int stale_ = 0;
  int best_epoch_ = 0;
  double best_ = 0.0;
};

class RmsProp {
 public:
  RmsProp(const Params& like, RmsPropConfig config);

  void step(Params& params, const Params& grads, bool freeze_embeddings = false);

  const Params& accumulators() const { return acc_; }

 private:
  Params acc_;
  RmsPropConfig config_;
};

// Trains in place. On return `model` holds the best dev-loss snapshot.
// `progress`, when non-null, receives one format_epoch line per epoch.
TrainReport train(Model& model, const TrainData& data, const TrainConfig& config,
                  std::ostream* progress = nullptr);

}  // namespace cwsd
