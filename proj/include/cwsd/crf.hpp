#pragma once

// Linear-chain CRF over BMES tags, computed entirely in log space.
//
//   score(y)  = start[y_0] + sum_i S(i, y_i) + sum_{i>0} A(y_{i-1}, y_i)
//               + end[y_{M-1}]   (end is a fixed mask, empty when unused)
//   log Z     = logsumexp over all T^M tag sequences of score(y)
//   nll(y)    = log Z - score(y)
//
// Emission matrices are M x T with one row per character.

#include <limits>
#include <span>
#include <vector>

#include "cwsd/numkit.hpp"
#include "cwsd/tagcodec.hpp"

namespace cwsd::crf {

template <typename Scalar>
struct Transitions {
  MatrixX<Scalar> A;    // A(a, b): score of moving from tag a to tag b
  VectorX<Scalar> start;
  VectorX<Scalar> end;  // not learned; empty, or 0 / -inf per final tag
};

template <typename Scalar>
struct Gradients {
  MatrixX<Scalar> dS;
  MatrixX<Scalar> dA;
  VectorX<Scalar> dstart;
};

template <typename Scalar>
struct LossAndGradients {
  Scalar nll;
  Gradients<Scalar> grads;
};

// Copy of `trans` with illegal BMES moves, start tags and final tags set to
// -inf.
template <typename Scalar>
Transitions<Scalar> masked(const Transitions<Scalar>& trans) {
  constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();
  Transitions<Scalar> out = trans;
  out.end = VectorX<Scalar>::Zero(kNumTags);
  for (Tag a : kAllTags) {
    if (!is_valid_start(a)) out.start(index_of(a)) = kNegInf;
    if (!is_valid_end(a)) out.end(index_of(a)) = kNegInf;
    for (Tag b : kAllTags) {
      if (!is_valid_transition(a, b)) out.A(index_of(a), index_of(b)) = kNegInf;
    }
  }
  return out;
}

namespace detail {

template <typename Scalar>
void check_shapes(const MatrixX<Scalar>& S, const Transitions<Scalar>& trans) {
  const auto T = S.cols();
  if (trans.A.rows() != T || trans.A.cols() != T || trans.start.size() != T ||
      (trans.end.size() != 0 && trans.end.size() != T)) {
    fail(ErrorKind::kInvalidInput, "crf: transition shape does not match tag count");
  }
}

template <typename Scalar>
void check_path(const MatrixX<Scalar>& S, std::span<const Tag> y) {
  if (static_cast<Eigen::Index>(y.size()) != S.rows()) {
    fail(ErrorKind::kInvalidInput, "crf: tag sequence length " +
                                       std::to_string(y.size()) +
                                       " != emission rows " +
                                       std::to_string(S.rows()));
  }
  if (y.empty()) fail(ErrorKind::kInvalidInput, "crf: empty sequence");
}

template <typename Scalar>
VectorX<Scalar> end_scores(const Transitions<Scalar>& trans, Eigen::Index T) {
  return trans.end.size() == 0 ? VectorX<Scalar>::Zero(T) : trans.end;
}

// Row i holds log-sum of all prefixes ending in each tag at position i.
template <typename Scalar>
MatrixX<Scalar> forward(const MatrixX<Scalar>& S,
                        const Transitions<Scalar>& trans) {
  const auto M = S.rows();
  const auto T = S.cols();
  MatrixX<Scalar> alpha(M, T);
  alpha.row(0) = trans.start.transpose() + S.row(0);
  for (Eigen::Index i = 1; i < M; ++i) {
    for (Eigen::Index b = 0; b < T; ++b) {
      alpha(i, b) =
          S(i, b) + logsumexp(alpha.row(i - 1).transpose() + trans.A.col(b));
    }
  }
  return alpha;
}

// Row i holds log-sum of all suffixes after position i given each tag at i.
template <typename Scalar>
MatrixX<Scalar> backward(const MatrixX<Scalar>& S,
                         const Transitions<Scalar>& trans) {
  const auto M = S.rows();
  const auto T = S.cols();
  MatrixX<Scalar> beta(M, T);
  beta.row(M - 1) = end_scores(trans, T).transpose();
  for (Eigen::Index i = M - 2; i >= 0; --i) {
    for (Eigen::Index a = 0; a < T; ++a) {
      beta(i, a) = logsumexp(trans.A.row(a).transpose() +
                             S.row(i + 1).transpose() +
                             beta.row(i + 1).transpose());
    }
  }
  return beta;
}

// exp(x) for a log-probability that may be -inf.
template <typename Scalar>
Scalar prob(Scalar log_p) {
  return log_p == -std::numeric_limits<Scalar>::infinity() ? Scalar(0)
                                                           : std::exp(log_p);
}

}  // namespace detail

template <typename Scalar>
Scalar path_score(const MatrixX<Scalar>& S, const Transitions<Scalar>& trans,
                  std::span<const Tag> y) {
  detail::check_shapes(S, trans);
  detail::check_path(S, y);
  Scalar score = trans.start(index_of(y[0]));
  for (size_t i = 0; i < y.size(); ++i) {
    score += S(static_cast<Eigen::Index>(i), index_of(y[i]));
    if (i > 0) score += trans.A(index_of(y[i - 1]), index_of(y[i]));
  }
  if (trans.end.size() != 0) score += trans.end(index_of(y.back()));
  return score;
}

template <typename Scalar>
Scalar log_partition(const MatrixX<Scalar>& S, const Transitions<Scalar>& trans) {
  detail::check_shapes(S, trans);
  if (S.rows() == 0) fail(ErrorKind::kInvalidInput, "crf: empty sequence");
  const auto alpha = detail::forward(S, trans);
  return logsumexp(alpha.row(S.rows() - 1).transpose() +
                   detail::end_scores(trans, S.cols()));
}

template <typename Scalar>
Scalar nll(const MatrixX<Scalar>& S, const Transitions<Scalar>& trans,
           std::span<const Tag> y) {
  const Scalar gold = path_score(S, trans, y);
  return log_partition(S, trans) - gold;
}

// Negative log-likelihood and its gradient: posterior marginals minus gold
// indicators, with marginals from forward-backward.
template <typename Scalar>
LossAndGradients<Scalar> nll_and_gradients(const MatrixX<Scalar>& S,
                                           const Transitions<Scalar>& trans,
                                           std::span<const Tag> y) {
  const Scalar gold = path_score(S, trans, y);
  const auto M = S.rows();
  const auto T = S.cols();
  const auto alpha = detail::forward(S, trans);
  const auto beta = detail::backward(S, trans);
  const Scalar log_z = logsumexp(alpha.row(M - 1).transpose() +
                                 detail::end_scores(trans, T));

  LossAndGradients<Scalar> out;
  out.nll = log_z - gold;
  auto& g = out.grads;
  g.dS.resize(M, T);
  g.dA = MatrixX<Scalar>::Zero(T, T);
  g.dstart.resize(T);

  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index t = 0; t < T; ++t) {
      g.dS(i, t) = detail::prob(alpha(i, t) + beta(i, t) - log_z);
    }
  }
  g.dstart = g.dS.row(0).transpose();
  for (Eigen::Index i = 1; i < M; ++i) {
    for (Eigen::Index a = 0; a < T; ++a) {
      for (Eigen::Index b = 0; b < T; ++b) {
        g.dA(a, b) += detail::prob(alpha(i - 1, a) + trans.A(a, b) + S(i, b) +
                                   beta(i, b) - log_z);
      }
    }
  }

  g.dstart(index_of(y[0])) -= Scalar(1);
  for (Eigen::Index i = 0; i < M; ++i) {
    g.dS(i, index_of(y[i])) -= Scalar(1);
    if (i > 0) g.dA(index_of(y[i - 1]), index_of(y[i])) -= Scalar(1);
  }
  return out;
}

template <typename Scalar>
Gradients<Scalar> gradients(const MatrixX<Scalar>& S,
                            const Transitions<Scalar>& trans,
                            std::span<const Tag> y) {
  return nll_and_gradients(S, trans, y).grads;
}

// Max-product decoding. Every argmax (backpointers and final tag) resolves
// ties toward the lowest tag index.
template <typename Scalar>
std::vector<Tag> viterbi(const MatrixX<Scalar>& S,
                         const Transitions<Scalar>& trans) {
  detail::check_shapes(S, trans);
  const auto M = S.rows();
  const auto T = S.cols();
  if (M == 0) fail(ErrorKind::kInvalidInput, "crf: empty sequence");

  VectorX<Scalar> best = trans.start + S.row(0).transpose();
  VectorX<Scalar> next(T);
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> back(M, T);
  back.row(0).setZero();
  for (Eigen::Index i = 1; i < M; ++i) {
    for (Eigen::Index b = 0; b < T; ++b) {
      Eigen::Index arg = 0;
      Scalar top = best(0) + trans.A(0, b);
      for (Eigen::Index a = 1; a < T; ++a) {
        const Scalar cand = best(a) + trans.A(a, b);
        if (cand > top) top = cand, arg = a;
      }
      next(b) = top + S(i, b);
      back(i, b) = static_cast<int>(arg);
    }
    best.swap(next);
  }
  best += detail::end_scores(trans, T);

  Eigen::Index last = 0;
  for (Eigen::Index t = 1; t < T; ++t) {
    if (best(t) > best(last)) last = t;
  }
  std::vector<Tag> path(static_cast<size_t>(M));
  for (Eigen::Index i = M - 1; i >= 0; --i) {
    path[static_cast<size_t>(i)] = tag_from_index(static_cast<int>(last));
    last = back(i, last);
  }
  return path;
}

}  // namespace cwsd::crf
