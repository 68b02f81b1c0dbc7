#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <unistd.h>

#include "cwsd/model.hpp"
#include "cwsd/tagcodec.hpp"

namespace cwsd::testing {

// Random non-empty segmentation of a random string over `alphabet`.
inline Sentence random_segmentation(Rng& rng, std::u32string_view alphabet, int max_words = 6,
                                    int max_word_len = 4) {
  std::uniform_int_distribution<int> n_words(1, max_words);
  std::uniform_int_distribution<int> len(1, max_word_len);
  std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
  Sentence words(static_cast<size_t>(n_words(rng)));
  for (auto& w : words) {
    const int n = len(rng);
    for (int i = 0; i < n; ++i) w.push_back(alphabet[pick(rng)]);
  }
  return words;
}

struct TinyConfig {
  int vocab_chars = 6;  // excluding PAD/UNK
  int dim = 3;
  std::vector<KernelSpec> kernels = {{1, 2}, {2, 3}, {3, 2}};
  bool mask = false;
};

inline Model tiny_model(const TinyConfig& cfg, Rng& rng) {
  Vocab vocab;
  for (int i = 0; i < cfg.vocab_chars; ++i) vocab.add(U'a' + i);
  Architecture arch;
  arch.embedding_dim = cfg.dim;
  arch.kernels = cfg.kernels;
  Model m = make_model(std::move(vocab), arch, cfg.mask, rng);
  // Non-zero biases so bias gradients are exercised away from the origin.
  for (auto& bank : m.params.conv) bank.bias.setRandom();
  m.params.proj_bias.setRandom();
  m.params.clf_bias.setConstant(0.3);
  m.params.trans *= 10;
  m.params.start *= 10;
  return m;
}

// Random model with V<=10, D<=4, at most 3 filters per kernel.
inline Model random_tiny_model(Rng& rng, bool mask = false) {
  std::uniform_int_distribution<int> chars(1, 8), dim(1, 4), filters(1, 3), coin(0, 1);
  TinyConfig cfg;
  cfg.vocab_chars = chars(rng);
  cfg.dim = dim(rng);
  cfg.kernels.clear();
  for (int k = 1; k <= 5; ++k) {
    if (coin(rng) || (k == 5 && cfg.kernels.empty())) cfg.kernels.push_back({k, filters(rng)});
  }
  cfg.mask = mask;
  return tiny_model(cfg, rng);
}

inline LabeledSentence random_labeled(Rng& rng, int vocab_chars, int max_len = 5) {
  std::u32string alphabet;
  for (int i = 0; i < vocab_chars; ++i) alphabet.push_back(U'a' + i);
  alphabet.push_back(U'z');  // never in the vocabulary: maps to UNK
  while (true) {
    auto words = random_segmentation(rng, alphabet, 3, 3);
    auto s = label_sentence(words);
    if (static_cast<int>(s.chars.size()) <= max_len) return s;
  }
}

// Temporary directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("cwsd_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path file(const std::string& name) const { return path_ / name; }

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = file(name);
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Sentence words_of(std::initializer_list<const char32_t*> ws) {
  Sentence out;
  for (const auto* w : ws) out.emplace_back(w);
  return out;
}

}  // namespace cwsd::testing
