#pragma once

// Character embedding + multi-width convolution encoder and the per-tag
// emission projection, with hand-written reverse passes.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cwsd/params.hpp"

namespace cwsd {

class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  Vocab() = default;

  // Returns the index of `c`, inserting it if absent.
  int add(char32_t c);
  void add_all(std::u32string_view text);

  // Unknown characters map to kUnk.
  int index(char32_t c) const;
  bool contains(char32_t c) const { return index_.count(c) != 0; }

  // Character stored at a non-reserved index.
  char32_t char_at(int idx) const;

  // Total size including the two reserved entries.
  int size() const { return static_cast<int>(chars_.size()) + 2; }

  std::vector<int> lookup(std::u32string_view text) const;

  // Non-reserved characters in index order (index = position + 2).
  const std::vector<char32_t>& chars() const { return chars_; }

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.chars_ == b.chars_;
  }

 private:
  std::vector<char32_t> chars_;
  std::unordered_map<char32_t, int> index_;
};

struct DropoutSpec {
  double rate = 0.0;
  bool training = false;

  static DropoutSpec inference() { return {}; }
};

// Window offsets for kernel width k: [i - ceil((k-1)/2), i + floor((k-1)/2)].
constexpr int window_left(int width) { return width / 2; }
constexpr int window_right(int width) { return (width - 1) / 2; }

// Activations kept by the forward pass for the reverse pass.
struct EncoderCache {
  std::vector<int> ids;
  Matrix emb_mask;              // M x D dropout multipliers
  std::vector<Matrix> windows;  // per bank: M x (k*D) gathered inputs
  std::vector<Matrix> preact;   // per bank: M x n_k before ReLU
  Matrix hidden_mask;           // M x F dropout multipliers
  Matrix hidden;                // M x F encoder output
  bool ready = false;
};

Matrix embed(std::u32string_view chars, const Vocab& vocab, const Params& params);

// Flattened windows: row i is the concatenation of the embedding rows at
// positions i-left .. i+right, with `pad_row` outside [0, M).
Matrix gather_windows(const Matrix& emb, const Eigen::RowVectorXd& pad_row,
                      int width);

// One convolution bank with ReLU; output is M x n_k for every width.
Matrix conv_forward(const Matrix& emb, const Eigen::RowVectorXd& pad_row,
                    const ConvBank& bank);

// Concatenated bank outputs (ascending width), M x F. Dropout is applied to
// the sentence embeddings and to the concatenated hidden layer when
// `dropout.training` is set; padding uses the PAD row undropped.
Matrix encode_ids(std::span<const int> ids, const Params& params,
                  const DropoutSpec& dropout, Rng& rng,
                  EncoderCache* cache = nullptr);

Matrix encode(std::u32string_view chars, const Vocab& vocab, const Params& params,
              const DropoutSpec& dropout, Rng& rng, EncoderCache* cache = nullptr);

// S = H * W + b, one row per position.
Matrix emission_scores(const Matrix& hidden, const Params& params);

// Accumulates into `grads` the gradient given dL/dH (M x F).
void encoder_backward_hidden(const EncoderCache& cache, const Matrix& d_hidden,
                             const Params& params, Params& grads);

// Accumulates into `grads` the gradient given dL/dS (M x T), including the
// projection parameters.
void encoder_backward(const EncoderCache& cache, const Matrix& d_emissions,
                      const Params& params, Params& grads);

struct PretrainedEmbeddings {
  int dim = 0;
  std::vector<std::pair<char32_t, Vector>> vectors;
};

// word2vec text format: a "count dim" header line, then one entry per line:
// the token followed by `dim` decimal numbers. Tokens that are not a single
// character are skipped.
PretrainedEmbeddings load_word2vec_text(const std::filesystem::path& path);

// Copies pretrained rows into the embedding table for characters present in
// both; PAD and UNK are never overwritten. Returns the number of rows copied.
int apply_pretrained(Params& params, const Vocab& vocab,
                     const PretrainedEmbeddings& pretrained);

}  // namespace cwsd
