#include "cwsd/model.hpp"

namespace cwsd {

Model make_model(Vocab vocab, Architecture arch, bool mask, Rng& rng) {
  arch.vocab_size = vocab.size();
  Model m;
  m.params = init_params(arch, rng);
  m.vocab = std::move(vocab);
  m.mask = mask;
  return m;
}

crf::Transitions<double> crf_transitions(const Model& model) {
  auto trans = model.params.transitions();
  return model.mask ? crf::masked(trans) : trans;
}

Matrix sentence_emissions(const Model& model, std::u32string_view chars) {
  Rng unused;
  const Matrix hidden =
      encode(chars, model.vocab, model.params, DropoutSpec::inference(), unused);
  return emission_scores(hidden, model.params);
}

std::vector<Tag> decode_tags(const Model& model, std::u32string_view chars) {
  if (chars.empty()) return {};
  return crf::viterbi(sentence_emissions(model, chars), crf_transitions(model));
}

Sentence segment(const Model& model, std::u32string_view chars) {
  if (chars.empty()) return {};
  return tags_to_words(chars, decode_tags(model, chars));
}

Sentence segment_line(const Model& model, std::u32string_view line) {
  Sentence out;
  size_t i = 0;
  auto is_space = [](char32_t c) { return c == U' ' || c == U'\t' || c == U'\r'; };
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) {
      auto words = segment(model, line.substr(i, j - i));
      out.insert(out.end(), words.begin(), words.end());
    }
    i = j;
  }
  return out;
}

}  // namespace cwsd
