#include "cwsd/encoder.hpp"

#include <charconv>
#include <fstream>

#include "cwsd/utf8.hpp"

namespace cwsd {

int Vocab::add(char32_t c) {
  auto [it, inserted] = index_.emplace(c, static_cast<int>(chars_.size()) + 2);
  if (inserted) chars_.push_back(c);
  return it->second;
}

void Vocab::add_all(std::u32string_view text) {
  for (char32_t c : text) add(c);
}

int Vocab::index(char32_t c) const {
  auto it = index_.find(c);
  return it == index_.end() ? kUnk : it->second;
}

char32_t Vocab::char_at(int idx) const {
  if (idx < 2 || idx >= size()) {
    fail(ErrorKind::kInvalidInput, "vocab index " + std::to_string(idx) +
                                       " is reserved or out of range");
  }
  return chars_[static_cast<size_t>(idx - 2)];
}

std::vector<int> Vocab::lookup(std::u32string_view text) const {
  std::vector<int> ids;
  ids.reserve(text.size());
  for (char32_t c : text) ids.push_back(index(c));
  return ids;
}

Matrix embed(std::u32string_view chars, const Vocab& vocab, const Params& params) {
  const auto ids = vocab.lookup(chars);
  Matrix out(static_cast<Eigen::Index>(ids.size()), params.embedding_dim());
  for (size_t i = 0; i < ids.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = params.embedding.row(ids[i]);
  }
  return out;
}

Matrix gather_windows(const Matrix& emb, const Eigen::RowVectorXd& pad_row,
                      int width) {
  const Eigen::Index M = emb.rows();
  const Eigen::Index D = emb.cols();
  const int left = window_left(width);
  Matrix windows(M, width * D);
  for (Eigen::Index i = 0; i < M; ++i) {
    for (int j = 0; j < width; ++j) {
      const Eigen::Index src = i - left + j;
      auto slot = windows.row(i).segment(j * D, D);
      if (src < 0 || src >= M) {
        slot = pad_row;
      } else {
        slot = emb.row(src);
      }
    }
  }
  return windows;
}

Matrix conv_forward(const Matrix& emb, const Eigen::RowVectorXd& pad_row,
                    const ConvBank& bank) {
  if (bank.width < 1) fail(ErrorKind::kInvalidInput, "conv_forward: width must be >= 1");
  const Matrix windows = gather_windows(emb, pad_row, bank.width);
  Matrix pre = windows * bank.weights.transpose();
  pre.rowwise() += bank.bias.transpose();
  return relu(pre);
}

Matrix encode_ids(std::span<const int> ids, const Params& params,
                  const DropoutSpec& dropout, Rng& rng, EncoderCache* cache) {
  const auto M = static_cast<Eigen::Index>(ids.size());
  const Eigen::Index D = params.embedding_dim();
  const Eigen::Index F = params.hidden_dim();

  Matrix emb(M, D);
  for (Eigen::Index i = 0; i < M; ++i) emb.row(i) = params.embedding.row(ids[i]);
  auto emb_drop = dropout_apply<double>(emb, dropout.rate, rng, dropout.training);
  const Eigen::RowVectorXd pad_row = params.embedding.row(Vocab::kPad);

  Matrix hidden(M, F);
  std::vector<Matrix> windows;
  std::vector<Matrix> preacts;
  Eigen::Index col = 0;
  for (const auto& bank : params.conv) {
    Matrix win = gather_windows(emb_drop.output, pad_row, bank.width);
    Matrix pre = win * bank.weights.transpose();
    pre.rowwise() += bank.bias.transpose();
    hidden.middleCols(col, bank.weights.rows()) = relu(pre);
    col += bank.weights.rows();
    if (cache) {
      windows.push_back(std::move(win));
      preacts.push_back(std::move(pre));
    }
  }
  auto hid_drop = dropout_apply<double>(hidden, dropout.rate, rng, dropout.training);

  if (cache) {
    cache->ids.assign(ids.begin(), ids.end());
    cache->emb_mask = std::move(emb_drop.mask);
    cache->windows = std::move(windows);
    cache->preact = std::move(preacts);
    cache->hidden_mask = std::move(hid_drop.mask);
    cache->hidden = hid_drop.output;
    cache->ready = true;
  }
  return std::move(hid_drop.output);
}

Matrix encode(std::u32string_view chars, const Vocab& vocab, const Params& params,
              const DropoutSpec& dropout, Rng& rng, EncoderCache* cache) {
  const auto ids = vocab.lookup(chars);
  return encode_ids(ids, params, dropout, rng, cache);
}

Matrix emission_scores(const Matrix& hidden, const Params& params) {
  if (hidden.cols() != params.proj.rows()) {
    fail(ErrorKind::kInvalidInput, "emission_scores: hidden width " +
                                       std::to_string(hidden.cols()) +
                                       " != projection rows " +
                                       std::to_string(params.proj.rows()));
  }
  Matrix S = hidden * params.proj;
  S.rowwise() += params.proj_bias.transpose();
  return S;
}

void encoder_backward_hidden(const EncoderCache& cache, const Matrix& d_hidden,
                             const Params& params, Params& grads) {
  if (!cache.ready) fail(ErrorKind::kInvalidState, "encoder_backward: no cached forward pass");
  const auto M = static_cast<Eigen::Index>(cache.ids.size());
  const Eigen::Index D = params.embedding_dim();
  if (d_hidden.rows() != M || d_hidden.cols() != params.hidden_dim()) {
    fail(ErrorKind::kInvalidInput, "encoder_backward: gradient shape mismatch");
  }

  const Matrix d_relu_out = d_hidden.cwiseProduct(cache.hidden_mask);
  Matrix d_emb = Matrix::Zero(M, D);
  Eigen::RowVectorXd d_pad = Eigen::RowVectorXd::Zero(D);

  Eigen::Index col = 0;
  for (size_t b = 0; b < params.conv.size(); ++b) {
    const auto& bank = params.conv[b];
    const Eigen::Index n = bank.weights.rows();
    const Matrix d_pre =
        d_relu_out.middleCols(col, n).cwiseProduct(
            (cache.preact[b].array() > 0.0).cast<double>().matrix());
    col += n;

    grads.conv[b].weights.noalias() += d_pre.transpose() * cache.windows[b];
    grads.conv[b].bias += d_pre.colwise().sum().transpose();

    const Matrix d_win = d_pre * bank.weights;
    const int left = window_left(bank.width);
    for (Eigen::Index i = 0; i < M; ++i) {
      for (int j = 0; j < bank.width; ++j) {
        const Eigen::Index src = i - left + j;
        const auto slot = d_win.row(i).segment(j * D, D);
        if (src < 0 || src >= M) {
          d_pad += slot;
        } else {
          d_emb.row(src) += slot;
        }
      }
    }
  }

  d_emb = d_emb.cwiseProduct(cache.emb_mask);
  for (Eigen::Index i = 0; i < M; ++i) grads.embedding.row(cache.ids[i]) += d_emb.row(i);
  grads.embedding.row(Vocab::kPad) += d_pad;
}

void encoder_backward(const EncoderCache& cache, const Matrix& d_emissions,
                      const Params& params, Params& grads) {
  if (!cache.ready) fail(ErrorKind::kInvalidState, "encoder_backward: no cached forward pass");
  grads.proj.noalias() += cache.hidden.transpose() * d_emissions;
  grads.proj_bias += d_emissions.colwise().sum().transpose();
  const Matrix d_hidden = d_emissions * params.proj.transpose();
  encoder_backward_hidden(cache, d_hidden, params, grads);
}

namespace {

bool parse_double(std::string_view tok, double& out) {
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

PretrainedEmbeddings load_word2vec_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open embeddings file " + path.string());

  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorKind::kFormat, path.string() + ": missing word2vec header line");
  }
  const auto header = split_ws(utf8::trim(line));
  double count_d = 0;
  double dim_d = 0;
  if (header.size() != 2 || !parse_double(header[0], count_d) ||
      !parse_double(header[1], dim_d) || dim_d < 1 || count_d < 0) {
    fail(ErrorKind::kFormat, path.string() + ": header must be \"count dim\"");
  }

  PretrainedEmbeddings out;
  out.dim = static_cast<int>(dim_d);
  const auto count = static_cast<long>(count_d);
  long seen = 0;
  long lineno = 1;
  while (seen < count && std::getline(in, line)) {
    ++lineno;
    const auto fields = split_ws(utf8::trim(line));
    if (fields.empty()) continue;
    if (static_cast<int>(fields.size()) != out.dim + 1) {
      fail(ErrorKind::kFormat, path.string() + ":" + std::to_string(lineno) +
                                   ": expected token and " +
                                   std::to_string(out.dim) + " values");
    }
    Vector v(out.dim);
    for (int d = 0; d < out.dim; ++d) {
      if (!parse_double(fields[d + 1], v(d))) {
        fail(ErrorKind::kFormat, path.string() + ":" + std::to_string(lineno) +
                                     ": malformed number");
      }
    }
    ++seen;
    std::u32string token;
    try {
      token = utf8::decode(fields[0]);
    } catch (const Error& e) {
      fail(ErrorKind::kEncoding,
           path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (token.size() == 1) out.vectors.emplace_back(token[0], std::move(v));
  }
  if (seen != count) {
    fail(ErrorKind::kFormat, path.string() + ": header declares " +
                                 std::to_string(count) + " entries, found " +
                                 std::to_string(seen));
  }
  return out;
}

int apply_pretrained(Params& params, const Vocab& vocab,
                     const PretrainedEmbeddings& pretrained) {
  if (pretrained.dim != params.embedding_dim()) {
    fail(ErrorKind::kFormat, "pretrained dimension " + std::to_string(pretrained.dim) +
                                 " != model embedding dimension " +
                                 std::to_string(params.embedding_dim()));
  }
  int copied = 0;
  for (const auto& [c, v] : pretrained.vectors) {
    if (!vocab.contains(c)) continue;
    params.embedding.row(vocab.index(c)) = v.transpose();
    ++copied;
  }
  return copied;
}

}  // namespace cwsd
