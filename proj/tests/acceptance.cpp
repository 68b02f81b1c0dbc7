// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
//
// Criterion 9 uses real SIGHAN-format data when CWSD_SIGHAN_TRAIN,
// CWSD_SIGHAN_TEST and CWSD_SIGHAN_DICT are set (CWSD_SIGHAN_DEV optional);
// otherwise it runs on generated files in the same format.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "cwsd/cli.hpp"
#include "cwsd/corpus.hpp"
#include "cwsd/crf.hpp"
#include "cwsd/dictgen.hpp"
#include "cwsd/eval.hpp"
#include "cwsd/model_io.hpp"
#include "cwsd/trainer.hpp"
#include "cwsd/utf8.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace cwsd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome crf_oracle() {
  Stopwatch clock;
  Rng rng(101);
  std::uniform_real_distribution<double> real(-3.0, 3.0);
  std::uniform_int_distribution<int> small(-1, 1), length(1, 6);
  double worst = 0.0;
  int viterbi_mismatch = 0;
  for (int n = 0; n < 200; ++n) {
    const int m = length(rng);
    // Every fourth instance uses a handful of integer scores so that ties
    // between paths are common.
    const bool ties = n % 4 == 3;
    auto draw = [&] { return ties ? static_cast<double>(small(rng)) : real(rng); };
    Matrix S(m, kNumTags);
    Matrix A(kNumTags, kNumTags);
    Vector start(kNumTags);
    for (Eigen::Index i = 0; i < S.size(); ++i) S.data()[i] = draw();
    for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = draw();
    for (Eigen::Index i = 0; i < start.size(); ++i) start(i) = draw();
    const crf::Transitions<double> trans{A, start, {}};
    worst = std::max(worst, std::abs(crf::log_partition(S, trans) -
                                     oracle::brute_log_partition(S, A, start)));
    if (crf::viterbi(S, trans) != oracle::brute_argmax(S, A, start)) ++viterbi_mismatch;
  }
  const double t = clock.seconds();
  return {worst <= 1e-9 && viterbi_mismatch == 0 && t < 5.0,
          "max |logZ - brute| = " + fmt("%.3g", worst) + ", viterbi mismatches " +
              std::to_string(viterbi_mismatch) + ", " + fmt("%.2f s", t)};
}

// ---------------------------------------------------------------------------

std::vector<LabeledSentence> random_batch(Rng& rng, const Model& m, int n) {
  std::vector<LabeledSentence> out;
  for (int i = 0; i < n; ++i) out.push_back(testing::random_labeled(rng, m.vocab.size() - 2, 5));
  return out;
}

std::vector<WordSample> random_words(Rng& rng, const Model& m, int n) {
  std::vector<WordSample> out;
  for (int i = 0; i < n; ++i) {
    auto s = testing::random_labeled(rng, m.vocab.size() - 2, 5);
    out.push_back({s.chars, i % 2 ? 1 : -1});
  }
  return out;
}

// Word classification loss alone, summed over samples.
LossGrad word_loss(std::span<const WordSample> words, const Model& model,
                   const DropoutSpec& dropout, Rng& rng) {
  LossGrad out{0.0, zeros_like(model.params)};
  for (const auto& w : words) {
    ClfCache cache;
    const auto ids = model.vocab.lookup(w.chars);
    out.loss += clf_loss(score_word_ids(ids, model.params, dropout, rng, &cache), w.label);
    clf_backward(cache, w.label, model.params, out.grads);
  }
  return out;
}

Outcome gradient_suite() {
  Stopwatch clock;
  Rng rng(202);
  const DropoutSpec dropout{0.3, true};
  double worst = 0.0;
  std::string worst_where = "-";
  size_t entries = 0;
  for (int config = 0; config < 50; ++config) {
    Model m = testing::random_tiny_model(rng, config % 2 == 1);
    const auto gold = random_batch(rng, m, 2);
    const auto pseudo = random_batch(rng, m, 2);
    const auto words = random_words(rng, m, 3);
    const std::uint64_t seed = 5000 + config;

    using LossFn = std::function<LossGrad(Rng&)>;
    std::vector<std::pair<std::string, LossFn>> losses = {
        {"cws", [&](Rng& r) { return batch_loss_cws(gold, m, dropout, r); }},
        {"word", [&](Rng& r) { return word_loss(words, m, dropout, r); }},
    };
    for (double l1 : {0.0, 0.5, 1.0}) {
      losses.push_back({"pseudo l1=" + fmt("%.1f", l1),
                        [&, l1](Rng& r) { return loss_pseudo(gold, pseudo, l1, m, dropout, r); }});
    }
    for (double l2 : {0.0, 0.3, 1.0}) {
      losses.push_back({"multitask l2=" + fmt("%.1f", l2),
                        [&, l2](Rng& r) { return loss_multitask(gold, words, l2, m, dropout, r); }});
    }
    for (const auto& [name, fn] : losses) {
      Rng r(seed);
      const LossGrad analytic = fn(r);
      const auto check = oracle::check_gradients(m.params, analytic.grads, [&, f = fn] {
        Rng replay(seed);
        return f(replay).loss;
      });
      entries += check.entries;
      if (check.max_rel_error > worst) {
        worst = check.max_rel_error;
        worst_where = name + " config " + std::to_string(config);
      }
    }
  }
  const double t = clock.seconds();
  return {worst <= 1e-6 && t < 60.0,
          "max rel error " + fmt("%.3g", worst) + " (" + worst_where + ") over " +
              std::to_string(entries) + " entries, " + fmt("%.1f s", t)};
}

// ---------------------------------------------------------------------------

Outcome reduction_identities() {
  Rng rng(303);
  const DropoutSpec dropout{0.3, true};
  int failures = 0;
  int cases = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Model m = testing::random_tiny_model(rng, trial % 2 == 0);
    const auto gold = random_batch(rng, m, 3);
    const auto pseudo = random_batch(rng, m, 3);
    const auto words = random_words(rng, m, 4);
    const std::uint64_t seed = 900 + trial;
    Rng a(seed), b(seed), c(seed);
    const auto base = batch_loss_cws(gold, m, dropout, a);
    const auto eq7 = loss_pseudo(gold, pseudo, 0.0, m, dropout, b);
    const auto eq9 = loss_multitask(gold, words, 0.0, m, dropout, c);
    cases += 2;
    failures += !(eq7.loss == base.loss && bitwise_equal(eq7.grads, base.grads));
    failures += !(eq9.loss == base.loss && bitwise_equal(eq9.grads, base.grads));
  }
  return {failures == 0, std::to_string(cases - failures) + "/" + std::to_string(cases) +
                             " bitwise-identical loss and gradient pairs"};
}

// ---------------------------------------------------------------------------

Outcome codec_and_generators() {
  Stopwatch clock;
  Rng rng(404);
  const std::u32string alphabet = U"人工智能最近很火作为一种新";
  int codec_failures = 0;
  for (int n = 0; n < 10000; ++n) {
    const auto words = testing::random_segmentation(rng, alphabet, 8, 5);
    const auto labeled = label_sentence(words);
    if (!is_valid_sequence(labeled.tags) || tags_to_words(labeled.chars, labeled.tags) != words) {
      ++codec_failures;
    }
  }

  const auto world = synthetic::make_world(60, 200, 40, 404);
  int pseudo_failures = 0;
  std::uniform_int_distribution<int> count(1, 10);
  for (int n = 0; n < 1000; ++n) {
    Sentence sampled;
    const auto s = gen_pseudo_sentence(world.dictionary, count(rng), rng, &sampled);
    if (!is_valid_sequence(s.tags) || tags_to_words(s.chars, s.tags) != sampled) ++pseudo_failures;
  }

  const auto charset = world.dictionary.charset();
  const auto samples = gen_classification_set(world.dictionary, 2000, {}, charset, rng);
  int negatives = 0;
  int member_negatives = 0;
  for (const auto& w : samples) {
    if (w.label != -1) continue;
    ++negatives;
    member_negatives += world.dictionary.contains(w.chars);
  }
  const double t = clock.seconds();
  return {codec_failures == 0 && pseudo_failures == 0 && member_negatives == 0 && negatives == 2000 &&
              t < 10.0,
          "codec failures " + std::to_string(codec_failures) + "/10000, pseudo failures " +
              std::to_string(pseudo_failures) + "/1000, negatives in dictionary " +
              std::to_string(member_negatives) + "/" + std::to_string(negatives) + ", " +
              fmt("%.2f s", t)};
}

// ---------------------------------------------------------------------------

Architecture scaled_architecture() {
  Architecture arch;
  arch.embedding_dim = 32;
  for (auto& k : arch.kernels) k.filters = 16;
  return arch;
}

struct Corpora {
  std::vector<Sentence> train, dev, test;
};

Corpora draw_corpora(const synthetic::World& world, size_t train, size_t dev, size_t test,
                     std::uint64_t seed) {
  Rng rng(seed);
  Corpora c;
  c.train = synthetic::make_sentences(world, train, rng);
  c.dev = synthetic::make_sentences(world, dev, rng);
  c.test = synthetic::make_sentences(world, test, rng);
  return c;
}

double heldout_f1(const Model& model, const std::vector<Sentence>& test) {
  std::vector<Sentence> pred;
  for (const auto& s : test) pred.push_back(segment(model, join_words(s)));
  return score(test, pred).f1;
}

Vocab vocab_of(const std::vector<Sentence>& corpus, const Dictionary* dict) {
  Vocab v;
  for (const auto& s : corpus) {
    for (const auto& w : s) v.add_all(w);
  }
  if (dict) v.add_all(dict->charset());
  return v;
}

Outcome synthetic_end_to_end() {
  Stopwatch clock;
  const auto world = synthetic::make_world(60, 200, 40, 505);
  const auto data = draw_corpora(world, 500, 200, 200, 506);
  const auto gold = to_labeled(data.train);
  const auto dev = to_labeled(data.dev);

  Rng rng(507);
  Model model = make_model(vocab_of(data.train, nullptr), scaled_architecture(), true, rng);
  TrainConfig cfg;
  cfg.seed = 508;
  const auto report = cwsd::train(model, {gold, dev, {}, {}}, cfg);
  const double f1 = heldout_f1(model, data.test);
  const double t = clock.seconds();
  return {f1 >= 0.90 && t < 600.0,
          "held-out F " + fmt("%.4f", f1) + " after " + std::to_string(report.stop_epoch) +
              " epochs (best " + std::to_string(report.best_epoch) + "), " + fmt("%.1f s", t)};
}

// ---------------------------------------------------------------------------

Outcome dictionary_benefit() {
  const auto world = synthetic::make_world(60, 200, 40, 606);
  std::vector<double> base_f, pseudo_f, multi_f;
  std::ostringstream per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto data = draw_corpora(world, 50, 50, 200, 6000 + seed);
    const auto gold = to_labeled(data.train);
    const auto dev = to_labeled(data.dev);

    TrainConfig cfg;
    cfg.seed = seed;

    Rng base_rng(seed);
    Model base = make_model(vocab_of(data.train, nullptr), scaled_architecture(), true, base_rng);
    const auto rb = cwsd::train(base, {gold, dev, {}, {}}, cfg);
    base_f.push_back(heldout_f1(base, data.test));

    Rng pseudo_rng(seed);
    Model pm = make_model(vocab_of(data.train, &world.dictionary), scaled_architecture(), true, pseudo_rng);
    const auto pseudo = gen_pseudo_corpus(world.dictionary, 500, {}, pseudo_rng);
    TrainConfig pcfg = cfg;
    pcfg.mode = TrainMode::kPseudo;
    pcfg.lambda1 = 1.0;
    const auto rp = cwsd::train(pm, {gold, dev, pseudo, {}}, pcfg);
    pseudo_f.push_back(heldout_f1(pm, data.test));

    Rng multi_rng(seed);
    Model mm = make_model(vocab_of(data.train, &world.dictionary), scaled_architecture(), true, multi_rng);
    const auto words = gen_classification_set(world.dictionary, world.dictionary.size(), {},
                                              world.dictionary.charset(), multi_rng);
    TrainConfig mcfg = cfg;
    mcfg.mode = TrainMode::kMultitask;
    mcfg.lambda2 = 0.3;
    const auto rm = cwsd::train(mm, {gold, dev, {}, words}, mcfg);
    multi_f.push_back(heldout_f1(mm, data.test));

    per_seed << "    seed " << seed << ": baseline " << fmt("%.4f", base_f.back()) << " (epoch "
             << rb.best_epoch << ")  pseudo " << fmt("%.4f", pseudo_f.back()) << " (epoch "
             << rp.best_epoch << ")  multitask " << fmt("%.4f", multi_f.back()) << " (epoch "
             << rm.best_epoch << ")\n";
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const double b = mean(base_f), p = mean(pseudo_f), mt = mean(multi_f);
  std::cout << per_seed.str();
  return {p > b && mt >= b - 0.005,
          "mean F baseline " + fmt("%.4f", b) + ", pseudo " + fmt("%.4f", p) + ", multitask " +
              fmt("%.4f", mt)};
}

// ---------------------------------------------------------------------------

Outcome eval_correctness() {
  const std::vector<Sentence> gold = {{U"AB", U"C", U"D"}};
  const std::vector<Sentence> pred = {{U"AB", U"CD"}};
  const Score hand = score(gold, pred);
  const bool hand_ok = hand.precision == 0.5 && hand.recall == 1.0 / 3.0 && hand.f1 == 0.4;

  std::vector<std::vector<Sentence>> corpora = {gold, pred};
  Rng rng(707);
  std::vector<Sentence> random;
  for (int i = 0; i < 500; ++i) random.push_back(testing::random_segmentation(rng, U"abcdef", 8, 4));
  corpora.push_back(random);
  const auto world = synthetic::make_world(60, 200, 40, 505);
  const auto data = draw_corpora(world, 500, 200, 200, 506);
  corpora.push_back(data.train);
  corpora.push_back(data.dev);
  corpora.push_back(data.test);
  int identity_failures = 0;
  for (const auto& c : corpora) {
    const Score s = score(c, c);
    identity_failures += !(s.precision == 1.0 && s.recall == 1.0 && s.f1 == 1.0);
  }
  return {hand_ok && identity_failures == 0,
          "hand case P=" + fmt("%.17g", hand.precision) + " R=" + fmt("%.17g", hand.recall) +
              " F=" + fmt("%.17g", hand.f1) + "; score(x,x) failures " +
              std::to_string(identity_failures) + "/" + std::to_string(corpora.size())};
}

// ---------------------------------------------------------------------------

std::string corpus_text(const std::vector<Sentence>& corpus) {
  std::ostringstream s;
  write_segmented(s, corpus);
  return s.str();
}

int quiet_cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int status = run_cli(args, o, e);
  if (out) *out = o.str();
  if (status != 0) std::cerr << "cwsd " << args.front() << ": " << e.str();
  return status;
}

Outcome determinism_and_serialization() {
  testing::TempDir dir;
  const auto world = synthetic::make_world(30, 40, 10, 808);
  const auto data = draw_corpora(world, 60, 20, 50, 809);
  const auto train_path = dir.write("train.txt", corpus_text(data.train));
  const auto dev_path = dir.write("dev.txt", corpus_text(data.dev));
  std::string dict;
  for (const auto& w : world.dictionary.words()) dict += utf8::encode(w) + "\n";
  const auto dict_path = dir.write("dict.txt", dict);

  bool identical = true;
  for (const std::string mode : {"baseline", "pseudo", "multitask"}) {
    std::vector<std::string> files;
    for (int run = 0; run < 2; ++run) {
      const auto out = dir.file(mode + std::to_string(run) + ".bin");
      std::vector<std::string> args = {"train", "--train", train_path.string(), "--dev",
                                       dev_path.string(), "--out", out.string(), "--mode", mode,
                                       "--dim", "16", "--filters", "8", "--max-epochs", "4",
                                       "--seed", "42"};
      if (mode != "baseline") {
        args.push_back("--dict");
        args.push_back(dict_path.string());
      }
      if (quiet_cli(args) != 0) return {false, mode + " training failed"};
      files.push_back(testing::read_file(out));
    }
    identical = identical && files[0] == files[1];
  }

  const Model m = load_model(dir.file("pseudo0.bin"));
  const auto path = dir.file("resaved.bin");
  save_model(m, path);
  const Model back = load_model(path);
  int decode_mismatch = 0;
  std::vector<std::u32string> sentences;
  for (const auto* c : {&data.train, &data.dev, &data.test}) {
    for (const auto& s : *c) sentences.push_back(join_words(s));
  }
  sentences.push_back(U"未见字符" + sentences.front());
  for (const auto& s : sentences) decode_mismatch += decode_tags(m, s) != decode_tags(back, s);
  const bool same_bytes = testing::read_file(path) == testing::read_file(dir.file("pseudo0.bin"));
  return {identical && decode_mismatch == 0 && same_bytes,
          std::string("repeated training byte-identical: ") + (identical ? "yes" : "no") +
              "; reload decode mismatches " + std::to_string(decode_mismatch) + "/" +
              std::to_string(sentences.size())};
}

// ---------------------------------------------------------------------------

std::string strip_spaces(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c != ' ' && c != '\t') out.push_back(c);
  }
  return out;
}

Outcome full_pipeline() {
  testing::TempDir dir;
  const char* env_train = std::getenv("CWSD_SIGHAN_TRAIN");
  const char* env_test = std::getenv("CWSD_SIGHAN_TEST");
  const char* env_dict = std::getenv("CWSD_SIGHAN_DICT");
  const char* env_dev = std::getenv("CWSD_SIGHAN_DEV");
  const bool user_data = env_train && env_test && env_dict;

  std::string train_path, dev_path, test_path, dict_path;
  std::vector<std::string> extra;
  if (user_data) {
    train_path = env_train;
    test_path = env_test;
    dict_path = env_dict;
    if (env_dev) {
      dev_path = env_dev;
    } else {
      // Hold out every tenth training line for early stopping.
      const auto all = read_segmented_corpus(train_path);
      std::vector<Sentence> tr, dv;
      for (size_t i = 0; i < all.size(); ++i) (i % 10 == 9 ? dv : tr).push_back(all[i]);
      train_path = dir.write("train.txt", corpus_text(tr)).string();
      dev_path = dir.write("dev.txt", corpus_text(dv)).string();
    }
  } else {
    const auto world = synthetic::make_world(60, 200, 40, 909);
    const auto data = draw_corpora(world, 300, 60, 100, 910);
    train_path = dir.write("train.txt", corpus_text(data.train)).string();
    dev_path = dir.write("dev.txt", corpus_text(data.dev)).string();
    test_path = dir.write("test.txt", corpus_text(data.test)).string();
    std::string dict;
    for (const auto& w : world.dictionary.words()) dict += utf8::encode(w) + "\n";
    dict_path = dir.write("dict.txt", dict).string();
    extra = {"--dim", "32", "--filters", "16"};
  }

  const auto raw = dir.write("raw.txt", strip_spaces(testing::read_file(test_path)));
  const auto model = dir.file("model.bin");
  const auto pred = dir.file("pred.txt");
  std::vector<std::string> train_args = {"train", "--train", train_path, "--dev", dev_path,
                                         "--out", model.string(), "--mode", "pseudo",
                                         "--dict", dict_path};
  train_args.insert(train_args.end(), extra.begin(), extra.end());
  if (quiet_cli(train_args) != 0) return {false, "train failed"};
  if (quiet_cli({"segment", "--model", model.string(), "--input", raw.string(), "--out",
                 pred.string()}) != 0) {
    return {false, "segment failed"};
  }
  std::string report;
  if (quiet_cli({"eval", "--gold", test_path, "--pred", pred.string()}, &report) != 0) {
    return {false, "eval failed"};
  }
  static const std::regex format(R"(\d\.\d{4}\t\d\.\d{4}\t\d\.\d{4}\t\d+\t\d+\t\d+\n)");
  const bool ok = std::regex_match(report, format);
  std::string shown = report;
  for (auto& c : shown) {
    if (c == '\t') c = ' ';
  }
  while (!shown.empty() && shown.back() == '\n') shown.pop_back();
  return {ok, std::string(user_data ? "user data" : "generated data") + ", P R F gold pred correct = " +
                  shown};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"crf oracle equivalence", crf_oracle},
      {"gradient suite", gradient_suite},
      {"reduction identities", reduction_identities},
      {"codec and generator properties", codec_and_generators},
      {"synthetic end-to-end", synthetic_end_to_end},
      {"dictionary benefit trend", dictionary_benefit},
      {"eval correctness", eval_correctness},
      {"determinism and serialization", determinism_and_serialization},
      {"full pipeline", full_pipeline},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first
              << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
