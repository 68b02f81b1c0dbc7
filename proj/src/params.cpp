#include "cwsd/params.hpp"

#include <algorithm>
#include <cstring>

namespace cwsd {

int Architecture::hidden_dim() const {
  int f = 0;
  for (const auto& k : kernels) f += k.filters;
  return f;
}

Params init_params(const Architecture& arch, Rng& rng) {
  if (arch.vocab_size < 2 || arch.embedding_dim < 1 || arch.num_tags < 1 ||
      arch.kernels.empty()) {
    fail(ErrorKind::kInvalidInput, "init_params: degenerate architecture");
  }
  auto kernels = arch.kernels;
  std::sort(kernels.begin(), kernels.end(),
            [](const KernelSpec& a, const KernelSpec& b) { return a.width < b.width; });
  for (size_t i = 0; i < kernels.size(); ++i) {
    if (kernels[i].width < 1 || kernels[i].filters < 1) {
      fail(ErrorKind::kInvalidInput, "init_params: kernel width and filter count must be >= 1");
    }
    if (i > 0 && kernels[i].width == kernels[i - 1].width) {
      fail(ErrorKind::kInvalidInput, "init_params: duplicate kernel width");
    }
  }

  const int D = arch.embedding_dim;
  const int F = arch.hidden_dim();
  const int T = arch.num_tags;
  Params p;
  p.embedding = init_uniform<double>(arch.vocab_size, D,
                                     glorot_scale(arch.vocab_size, D), rng);
  for (const auto& k : kernels) {
    ConvBank bank;
    bank.width = k.width;
    bank.weights = init_uniform<double>(k.filters, k.width * D,
                                        glorot_scale(k.width * D, k.filters), rng);
    bank.bias = Vector::Zero(k.filters);
    p.conv.push_back(std::move(bank));
  }
  p.proj = init_uniform<double>(F, T, glorot_scale(F, T), rng);
  p.proj_bias = Vector::Zero(T);
  p.trans = init_uniform<double>(T, T, 0.05, rng);
  p.start = init_uniform<double>(T, 1, 0.05, rng);
  p.clf_u = init_uniform<double>(F, 1, glorot_scale(F, 1), rng);
  p.clf_bias = Vector::Zero(1);
  return p;
}

Params zeros_like(const Params& like) {
  Params z = like;
  for_each_array(z, [](const std::string&, auto& a) { a.setZero(); });
  return z;
}

Architecture architecture_of(const Params& p) {
  Architecture arch;
  arch.vocab_size = static_cast<int>(p.vocab_size());
  arch.embedding_dim = static_cast<int>(p.embedding_dim());
  arch.num_tags = static_cast<int>(p.num_tags());
  arch.kernels.clear();
  for (const auto& bank : p.conv) {
    arch.kernels.push_back({bank.width, static_cast<int>(bank.weights.rows())});
  }
  return arch;
}

void add_scaled(Params& dst, const Params& src, double scale) {
  for_each_array_pair(dst, src, [scale](auto& d, const auto& s) { d += scale * s; });
}

size_t parameter_count(const Params& p) {
  size_t n = 0;
  for_each_array(p, [&n](const std::string&, const auto& a) { n += a.size(); });
  return n;
}

bool bitwise_equal(const Params& a, const Params& b) {
  if (a.conv.size() != b.conv.size()) return false;
  for (size_t i = 0; i < a.conv.size(); ++i) {
    if (a.conv[i].width != b.conv[i].width) return false;
  }
  bool equal = true;
  for_each_array_pair(a, b, [&equal](const auto& x, const auto& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols() ||
        std::memcmp(x.data(), y.data(), sizeof(double) * x.size()) != 0) {
      equal = false;
    }
  });
  return equal;
}

}  // namespace cwsd
