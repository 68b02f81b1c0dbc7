#pragma once

#include <string>
#include <vector>

#include "cwsd/crf.hpp"
#include "cwsd/numkit.hpp"

namespace cwsd {

struct ConvBank {
  int width = 0;    // kernel size k
  Matrix weights;   // n_k x (k*D); row f is one filter over the flattened window
  Vector bias;      // n_k
};

// Every trainable array of the model. Gradients and optimizer accumulators
// reuse this struct with identical shapes.
struct Params {
  Matrix embedding;            // V x D; row 0 is PAD, row 1 is UNK
  std::vector<ConvBank> conv;  // ascending kernel width
  Matrix proj;                 // F x T
  Vector proj_bias;            // T
  Matrix trans;                // T x T
  Vector start;                // T
  Vector clf_u;                // F
  Vector clf_bias;             // 1

  Eigen::Index vocab_size() const { return embedding.rows(); }
  Eigen::Index embedding_dim() const { return embedding.cols(); }
  Eigen::Index hidden_dim() const { return proj.rows(); }
  Eigen::Index num_tags() const { return proj.cols(); }

  crf::Transitions<double> transitions() const { return {trans, start, {}}; }
};

struct KernelSpec {
  int width = 0;
  int filters = 0;
};

struct Architecture {
  int vocab_size = 2;
  int embedding_dim = 200;
  std::vector<KernelSpec> kernels = {{2, 100}, {3, 100}, {4, 100}, {5, 100}};
  int num_tags = kNumTags;

  int hidden_dim() const;
};

// Glorot-uniform weights and embeddings, zero biases, uniform(+-0.05)
// transitions and start scores. Kernels are sorted by width.
Params init_params(const Architecture& arch, Rng& rng);

// Same shapes as `like`, all zero.
Params zeros_like(const Params& like);

Architecture architecture_of(const Params& p);

// Visits (name, array) for every parameter array in serialization order.
template <typename P, typename F>
void for_each_array(P& p, F&& fn) {
  fn(std::string("embedding"), p.embedding);
  for (auto& bank : p.conv) {
    fn("conv" + std::to_string(bank.width) + ".weights", bank.weights);
  }
  for (auto& bank : p.conv) {
    fn("conv" + std::to_string(bank.width) + ".bias", bank.bias);
  }
  fn(std::string("proj"), p.proj);
  fn(std::string("proj_bias"), p.proj_bias);
  fn(std::string("trans"), p.trans);
  fn(std::string("start"), p.start);
  fn(std::string("clf_u"), p.clf_u);
  fn(std::string("clf_bias"), p.clf_bias);
}

// Visits matching arrays of two same-shaped parameter sets.
template <typename P, typename Q, typename F>
void for_each_array_pair(P& a, Q& b, F&& fn) {
  fn(a.embedding, b.embedding);
  for (size_t i = 0; i < a.conv.size(); ++i) fn(a.conv[i].weights, b.conv[i].weights);
  for (size_t i = 0; i < a.conv.size(); ++i) fn(a.conv[i].bias, b.conv[i].bias);
  fn(a.proj, b.proj);
  fn(a.proj_bias, b.proj_bias);
  fn(a.trans, b.trans);
  fn(a.start, b.start);
  fn(a.clf_u, b.clf_u);
  fn(a.clf_bias, b.clf_bias);
}

// dst += scale * src
void add_scaled(Params& dst, const Params& src, double scale);

size_t parameter_count(const Params& p);

bool bitwise_equal(const Params& a, const Params& b);

}  // namespace cwsd
