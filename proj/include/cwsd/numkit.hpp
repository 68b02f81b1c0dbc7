#pragma once

// Dense numeric kernels shared by the encoder, CRF and trainer. Everything is
// an Eigen type templated on the scalar; the rest of the library uses the
// double aliases below.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "cwsd/error.hpp"

namespace cwsd {

template <typename Scalar>
using MatrixX =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

using Rng = std::mt19937_64;

template <typename Derived>
auto relu(const Eigen::MatrixBase<Derived>& x) {
  return x.cwiseMax(typename Derived::Scalar(0));
}

// Max-shifted log-sum-exp. All -inf input yields -inf.
template <typename Derived>
typename Derived::Scalar logsumexp(const Eigen::DenseBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  if (v.size() == 0) fail(ErrorKind::kInvalidInput, "logsumexp of empty vector");
  const Scalar top = v.maxCoeff();
  if (top == -std::numeric_limits<Scalar>::infinity()) return top;
  return top + std::log((v.derived().array() - top).exp().sum());
}

// log(1 + exp(x)) without overflow.
template <typename Scalar>
Scalar softplus(Scalar x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  if (x >= 0) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

template <typename Scalar>
struct DropoutResult {
  MatrixX<Scalar> output;
  // Per-entry multiplier: 0 for dropped entries, 1/(1-rate) for survivors.
  MatrixX<Scalar> mask;
};

// Inverted dropout. Inference mode (or rate 0) is the identity and consumes
// no random numbers.
template <typename Scalar>
DropoutResult<Scalar> dropout_apply(const MatrixX<Scalar>& x, double rate,
                                    Rng& rng, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    fail(ErrorKind::kInvalidInput,
         "dropout rate must be in [0, 1), got " + std::to_string(rate));
  }
  DropoutResult<Scalar> r;
  r.mask = MatrixX<Scalar>::Ones(x.rows(), x.cols());
  if (training && rate > 0.0) {
    std::bernoulli_distribution keep(1.0 - rate);
    const Scalar scale = Scalar(1) / Scalar(1.0 - rate);
    for (Eigen::Index i = 0; i < r.mask.size(); ++i) {
      r.mask.data()[i] = keep(rng) ? scale : Scalar(0);
    }
  }
  r.output = x.cwiseProduct(r.mask);
  return r;
}

template <typename Scalar>
MatrixX<Scalar> init_uniform(Eigen::Index rows, Eigen::Index cols, double scale,
                             Rng& rng) {
  if (!(scale > 0.0)) fail(ErrorKind::kInvalidInput, "init scale must be > 0");
  std::uniform_real_distribution<double> dist(-scale, scale);
  MatrixX<Scalar> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = static_cast<Scalar>(dist(rng));
  }
  return m;
}

inline double glorot_scale(Eigen::Index fan_in, Eigen::Index fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

struct RmsPropConfig {
  double learning_rate = 0.001;
  double decay = 0.9;
  double epsilon = 1e-8;
};

// acc <- decay*acc + (1-decay)*grad^2; param <- param - lr*grad/sqrt(acc+eps).
template <typename Derived, typename GradDerived, typename AccDerived>
void rmsprop_step(Eigen::DenseBase<Derived>& param,
                  const Eigen::DenseBase<GradDerived>& grad,
                  Eigen::DenseBase<AccDerived>& acc, const RmsPropConfig& cfg) {
  if (param.rows() != grad.rows() || param.cols() != grad.cols() ||
      param.rows() != acc.rows() || param.cols() != acc.cols()) {
    fail(ErrorKind::kInvalidInput, "rmsprop_step: shape mismatch");
  }
  using Scalar = typename Derived::Scalar;
  const auto g = grad.derived().array();
  acc.derived().array() = Scalar(cfg.decay) * acc.derived().array() +
                          Scalar(1.0 - cfg.decay) * g.square();
  param.derived().array() -= Scalar(cfg.learning_rate) * g /
                             (acc.derived().array() + Scalar(cfg.epsilon)).sqrt();
}

}  // namespace cwsd
