#pragma once

#include <string_view>
#include <vector>

#include "cwsd/encoder.hpp"

namespace cwsd {

struct Model {
  Vocab vocab;
  Params params;
  // Hard-mask illegal BMES transitions and start tags to -inf.
  bool mask = true;
};

// `arch.vocab_size` is overwritten with vocab.size().
Model make_model(Vocab vocab, Architecture arch, bool mask, Rng& rng);

// Transitions as seen by the CRF, masked when the model says so.
crf::Transitions<double> crf_transitions(const Model& model);

// Inference-mode emissions, M x T.
Matrix sentence_emissions(const Model& model, std::u32string_view chars);

std::vector<Tag> decode_tags(const Model& model, std::u32string_view chars);

// Viterbi segmentation; the empty string yields no words.
Sentence segment(const Model& model, std::u32string_view chars);

// Segments each ASCII-whitespace-delimited chunk independently.
Sentence segment_line(const Model& model, std::u32string_view line);

}  // namespace cwsd
