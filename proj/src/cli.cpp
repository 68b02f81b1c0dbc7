#include "cwsd/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "cwsd/corpus.hpp"
#include "cwsd/dictgen.hpp"
#include "cwsd/eval.hpp"
#include "cwsd/model_io.hpp"
#include "cwsd/trainer.hpp"
#include "cwsd/utf8.hpp"

namespace cwsd {

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CWS_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      fail(ErrorKind::kUsage, std::string("CWS_SEED is not an unsigned integer: ") + env);
    }
  }
  return 1;
}

std::vector<int> parse_kernel_list(const std::string& text) {
  std::vector<int> widths;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      widths.push_back(std::stoi(item));
    } catch (const std::exception&) {
      fail(ErrorKind::kUsage, "--kernels expects comma-separated integers, got '" + text + "'");
    }
  }
  if (widths.empty()) fail(ErrorKind::kUsage, "--kernels is empty");
  return widths;
}

Dictionary load_dictionaries(const std::vector<std::string>& paths) {
  Dictionary dict;
  for (const auto& p : paths) dict.merge(load_dictionary(p));
  return dict;
}

// Writes to --out when given, else to `fallback`.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) fail(ErrorKind::kIo, "cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

struct TrainArgs {
  std::string train, dev, out, mode = "baseline", embeddings, mask = "on";
  std::string kernels = "2,3,4,5", schedule = "paired";
  std::vector<std::string> dicts;
  bool internal_dict = false;
  bool freeze = false;
  double lambda1 = 1.0, lambda2 = 0.3, p_replace = 0.5;
  double lr = 0.001, dropout = 0.3;
  std::optional<size_t> np, nneg;
  int u_min = 3, u_max = 8, patience = 3, max_epochs = 200;
  int filters = 100;
  std::optional<int> dim;
  size_t batch = 64;
  std::uint64_t seed = 1;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  TrainConfig config;
  if (a.mode == "baseline") {
    config.mode = TrainMode::kBaseline;
  } else if (a.mode == "pseudo") {
    config.mode = TrainMode::kPseudo;
  } else if (a.mode == "multitask") {
    config.mode = TrainMode::kMultitask;
  } else {
    fail(ErrorKind::kUsage, "--mode must be baseline, pseudo or multitask");
  }
  if (a.mask != "on" && a.mask != "off") fail(ErrorKind::kUsage, "--mask must be on or off");
  if (a.schedule != "paired" && a.schedule != "mixed") {
    fail(ErrorKind::kUsage, "--pseudo-schedule must be paired or mixed");
  }
  config.lambda1 = a.lambda1;
  config.lambda2 = a.lambda2;
  config.optimizer.learning_rate = a.lr;
  config.batch_size = a.batch;
  config.dropout = a.dropout;
  config.patience = a.patience;
  config.max_epochs = a.max_epochs;
  config.seed = a.seed;
  config.freeze_embeddings = a.freeze;
  config.pseudo_schedule = a.schedule == "mixed" ? PseudoSchedule::kMixed : PseudoSchedule::kPaired;
  try {
    config.validate();
  } catch (const Error& e) {
    fail(ErrorKind::kUsage, e.what());
  }

  const auto train_corpus = read_segmented_corpus(a.train);
  const auto dev_corpus = read_segmented_corpus(a.dev);
  if (train_corpus.empty()) fail(ErrorKind::kInvalidInput, a.train + ": no sentences");
  if (dev_corpus.empty()) fail(ErrorKind::kInvalidInput, a.dev + ": no sentences");

  Dictionary dict = load_dictionaries(a.dicts);
  if (a.internal_dict) dict.merge(build_internal_dictionary(train_corpus));
  const bool needs_dict = config.mode != TrainMode::kBaseline;
  if (needs_dict && dict.empty()) {
    fail(ErrorKind::kUsage, "--mode " + a.mode + " needs --dict or --internal-dict");
  }

  std::optional<PretrainedEmbeddings> pretrained;
  if (!a.embeddings.empty()) pretrained = load_word2vec_text(a.embeddings);
  int dim = a.dim.value_or(pretrained ? pretrained->dim : 200);
  if (pretrained && pretrained->dim != dim) {
    fail(ErrorKind::kUsage, "--dim " + std::to_string(dim) + " conflicts with embeddings dimension " +
                                std::to_string(pretrained->dim));
  }

  Vocab vocab;
  for (const auto& s : train_corpus) {
    for (const auto& w : s) vocab.add_all(w);
  }
  if (needs_dict) {
    for (const auto& w : dict.words()) vocab.add_all(w);
  }
  if (pretrained) {
    for (const auto& [c, v] : pretrained->vectors) vocab.add(c);
  }

  Architecture arch;
  arch.embedding_dim = dim;
  arch.kernels.clear();
  for (int w : parse_kernel_list(a.kernels)) arch.kernels.push_back({w, a.filters});

  Rng rng(a.seed);
  Model model;
  try {
    model = make_model(std::move(vocab), arch, a.mask == "on", rng);
  } catch (const Error& e) {
    fail(ErrorKind::kUsage, e.what());
  }
  if (pretrained) apply_pretrained(model.params, model.vocab, *pretrained);

  const auto train_set = to_labeled(train_corpus);
  const auto dev_set = to_labeled(dev_corpus);
  std::vector<LabeledSentence> pseudo;
  std::vector<WordSample> words;
  if (config.mode == TrainMode::kPseudo) {
    if (a.u_min < 1 || a.u_max < a.u_min) fail(ErrorKind::kUsage, "need 1 <= --u-min <= --u-max");
    pseudo = gen_pseudo_corpus(dict, a.np.value_or(train_set.size()), {a.u_min, a.u_max}, rng);
    if (pseudo.empty()) fail(ErrorKind::kUsage, "--np must be >= 1 in pseudo mode");
  } else if (config.mode == TrainMode::kMultitask) {
    NegativeConfig neg;
    neg.replace_prob = a.p_replace;
    words = gen_classification_set(dict, a.nneg.value_or(dict.size()), neg, dict.charset(), rng);
  }

  TrainData data{train_set, dev_set, pseudo, words};
  train(model, data, config, &out);
  save_model(model, a.out);
  return kExitOk;
}

int cmd_segment(const std::string& model_path, const std::string& input,
                const std::string& output, std::ostream& out) {
  const Model model = load_model(model_path);
  const auto lines = read_raw_lines(input);
  Output sink(output, out);
  for (const auto& line : lines) *sink << format_segmented(segment_line(model, line)) << '\n';
  return kExitOk;
}

int cmd_eval(const std::string& gold_path, const std::string& pred_path, std::ostream& out) {
  const auto gold = read_segmented_lines(gold_path);
  const auto pred = read_segmented_lines(pred_path);
  if (gold.size() != pred.size()) {
    fail(ErrorKind::kInvalidInput, "line count mismatch: " + gold_path + " has " +
                                       std::to_string(gold.size()) + ", " + pred_path +
                                       " has " + std::to_string(pred.size()));
  }
  try {
    out << format_score(score(gold, pred)) << '\n';
  } catch (const Error& e) {
    fail(ErrorKind::kInvalidInput, std::string(e.what()) + " (line numbers refer to " +
                                       gold_path + ")");
  }
  return kExitOk;
}

struct GenerateArgs {
  std::vector<std::string> dicts;
  std::string out;
  size_t np = 1000;
  std::optional<size_t> nneg;
  double p_replace = 0.5;
  int u_min = 3, u_max = 8;
  std::uint64_t seed = 1;
};

int cmd_generate_pseudo(const GenerateArgs& a, std::ostream& out) {
  const Dictionary dict = load_dictionaries(a.dicts);
  if (dict.empty()) fail(ErrorKind::kUsage, "dictionary is empty");
  if (a.u_min < 1 || a.u_max < a.u_min) fail(ErrorKind::kUsage, "need 1 <= --u-min <= --u-max");
  Rng rng(a.seed);
  const auto corpus = gen_pseudo_corpus(dict, a.np, {a.u_min, a.u_max}, rng);
  Output sink(a.out, out);
  for (const auto& s : corpus) *sink << format_segmented(tags_to_words(s.chars, s.tags)) << '\n';
  return kExitOk;
}

int cmd_generate_clfdata(const GenerateArgs& a, std::ostream& out) {
  const Dictionary dict = load_dictionaries(a.dicts);
  if (dict.empty()) fail(ErrorKind::kUsage, "dictionary is empty");
  if (!(a.p_replace > 0.0 && a.p_replace <= 1.0)) fail(ErrorKind::kUsage, "--p-replace must be in (0, 1]");
  Rng rng(a.seed);
  NegativeConfig neg;
  neg.replace_prob = a.p_replace;
  const auto samples =
      gen_classification_set(dict, a.nneg.value_or(dict.size()), neg, dict.charset(), rng);
  Output sink(a.out, out);
  for (const auto& s : samples) {
    *sink << (s.label > 0 ? "+1" : "-1") << '\t' << utf8::encode(s.chars) << '\n';
  }
  return kExitOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
      return kExitUsage;
    case ErrorKind::kIo:
      return kExitIo;
    default:
      return kExitData;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chinese word segmentation with a CNN-CRF tagger and dictionary-driven training"};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a model and write a model file");
  train->add_option("--train", ta.train, "Segmented training corpus")->required();
  train->add_option("--dev", ta.dev, "Segmented development corpus")->required();
  train->add_option("--out", ta.out, "Output model file")->required();
  train->add_option("--mode", ta.mode, "baseline | pseudo | multitask")->capture_default_str();
  train->add_option("--dict", ta.dicts, "Dictionary file (repeatable)");
  train->add_flag("--internal-dict", ta.internal_dict, "Add every word of the training corpus to the dictionary");
  train->add_option("--embeddings", ta.embeddings, "Pretrained character vectors, word2vec text format");
  train->add_flag("--freeze-embeddings", ta.freeze, "Do not update the embedding table");
  train->add_option("--lambda1", ta.lambda1, "Weight of the pseudo labeled loss")->capture_default_str();
  train->add_option("--lambda2", ta.lambda2, "Weight of the word classification loss")->capture_default_str();
  train->add_option("--np", ta.np, "Pseudo sentences to generate (default: training size)");
  train->add_option("--nneg", ta.nneg, "Negative words to generate (default: dictionary size)");
  train->add_option("--p-replace", ta.p_replace, "Per-character replacement probability")->capture_default_str();
  train->add_option("--u-min", ta.u_min, "Minimum words per pseudo sentence")->capture_default_str();
  train->add_option("--u-max", ta.u_max, "Maximum words per pseudo sentence")->capture_default_str();
  train->add_option("--pseudo-schedule", ta.schedule, "paired | mixed")->capture_default_str();
  auto* train_seed = train->add_option("--seed", ta.seed, "Random seed (default: $CWS_SEED or 1)");
  train->add_option("--lr", ta.lr, "RMSProp learning rate")->capture_default_str();
  train->add_option("--batch", ta.batch, "Sentences per batch")->capture_default_str();
  train->add_option("--dropout", ta.dropout, "Dropout rate")->capture_default_str();
  train->add_option("--patience", ta.patience, "Early-stopping patience in epochs")->capture_default_str();
  train->add_option("--max-epochs", ta.max_epochs, "Epoch limit")->capture_default_str();
  train->add_option("--mask", ta.mask, "on | off: hard-mask illegal tag transitions")->capture_default_str();
  train->add_option("--dim", ta.dim, "Embedding dimension (default 200, or the embeddings file's)");
  train->add_option("--kernels", ta.kernels, "Comma-separated kernel widths")->capture_default_str();
  train->add_option("--filters", ta.filters, "Filters per kernel width")->capture_default_str();

  std::string model_path, input_path, output_path;
  auto* seg = app.add_subcommand("segment", "Segment raw text, one sentence per line");
  seg->add_option("--model", model_path, "Model file")->required();
  seg->add_option("--input", input_path, "Raw text file")->required();
  seg->add_option("--out", output_path, "Output file (default: stdout)");

  std::string gold_path, pred_path;
  auto* ev = app.add_subcommand("eval", "Word-level precision, recall and F");
  ev->add_option("--gold", gold_path, "Gold segmented file")->required();
  ev->add_option("--pred", pred_path, "Predicted segmented file")->required();

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Generate training data from dictionaries");
  gen->require_subcommand(1);
  auto add_common = [&ga](CLI::App* cmd) {
    cmd->add_option("--dict", ga.dicts, "Dictionary file (repeatable)")->required();
    cmd->add_option("--out", ga.out, "Output file (default: stdout)");
    return cmd->add_option("--seed", ga.seed, "Random seed (default: $CWS_SEED or 1)");
  };
  auto* pseudo = gen->add_subcommand("pseudo", "Pseudo labeled sentences");
  auto* pseudo_seed = add_common(pseudo);
  pseudo->add_option("--np", ga.np, "Number of sentences")->capture_default_str();
  pseudo->add_option("--u-min", ga.u_min, "Minimum words per sentence")->capture_default_str();
  pseudo->add_option("--u-max", ga.u_max, "Maximum words per sentence")->capture_default_str();
  auto* clf = gen->add_subcommand("clfdata", "Word classification samples");
  auto* clf_seed = add_common(clf);
  clf->add_option("--nneg", ga.nneg, "Negative samples (default: dictionary size)");
  clf->add_option("--p-replace", ga.p_replace, "Per-character replacement probability")->capture_default_str();

  std::vector<std::string> argv_storage{"cwsd"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) {
      if (train_seed->count() == 0) ta.seed = default_seed();
      return cmd_train(ta, out);
    }
    if (*seg) return cmd_segment(model_path, input_path, output_path, out);
    if (*ev) return cmd_eval(gold_path, pred_path, out);
    if (*pseudo) {
      if (pseudo_seed->count() == 0) ga.seed = default_seed();
      return cmd_generate_pseudo(ga, out);
    }
    if (*clf) {
      if (clf_seed->count() == 0) ga.seed = default_seed();
      return cmd_generate_clfdata(ga, out);
    }
  } catch (const Error& e) {
    err << "cwsd: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "cwsd: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace cwsd
