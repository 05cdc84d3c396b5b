#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clickgraph/click_graph.hpp"
#include "clickgraph/error.hpp"
#include "clickgraph/weighting.hpp"

namespace clickgraph {

/// Row-stochastic walk matrices of a weighted click graph. A row whose
/// weights sum to zero stays all-zero and is flagged instead.
template <typename Scalar = double>
struct TransitionMatrices {
  using Matrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

  Matrix q2d;  // M x N, p(d | q)
  Matrix d2q;  // N x M, p(q | d)
  std::vector<bool> zero_query_rows;
  std::vector<bool> zero_url_rows;

  Eigen::Index num_queries() const { return q2d.rows(); }
  Eigen::Index num_urls() const { return q2d.cols(); }
};

enum class SimilarityMethod { kCosine, kJaccard, kJaccardBinary, kPpr };

std::string_view method_name(SimilarityMethod method);
std::optional<SimilarityMethod> parse_method(std::string_view name);
std::string valid_method_names();

struct PprParams {
  double alpha = 0.5;
  int steps = 1;
  QueryId source = 0;

  void validate(Eigen::Index num_queries) const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    if (steps < 0) throw InvalidArgument("steps must be >= 0");
    if (source >= num_queries) throw UnknownQuery("query id " + std::to_string(source) + " out of range");
  }
};

struct ScoredQuery {
  QueryId query;
  double score;

  friend bool operator==(const ScoredQuery&, const ScoredQuery&) = default;
};

/// Descending by score, ties by ascending query id; never contains the source.
using SimilarityResult = std::vector<ScoredQuery>;

namespace detail {

template <typename Matrix>
std::vector<bool> normalize_rows(Matrix& m) {
  using Scalar = typename Matrix::Scalar;
  std::vector<bool> zero(static_cast<std::size_t>(m.rows()), false);
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    Scalar sum = 0;
    for (typename Matrix::InnerIterator it(m, r); it; ++it) sum += it.value();
    if (sum == Scalar(0)) {
      zero[static_cast<std::size_t>(r)] = true;
      continue;
    }
    for (typename Matrix::InnerIterator it(m, r); it; ++it) it.valueRef() /= sum;
  }
  return zero;
}

template <typename Scalar>
void require_row(const TransitionMatrices<Scalar>& t, QueryId q) {
  if (q >= t.num_queries()) throw UnknownQuery("query id " + std::to_string(q) + " out of range");
  if (t.zero_query_rows[q]) throw ZeroVector("query id " + std::to_string(q) + " has an all-zero representation");
}

// Walks two sparse rows in ascending column order, calling f(a, b) for every
// column present in either (missing side is zero).
template <typename Matrix, typename F>
void merge_rows(const Matrix& m, Eigen::Index i, Eigen::Index j, F&& f) {
  using Scalar = typename Matrix::Scalar;
  typename Matrix::InnerIterator a(m, i), b(m, j);
  while (a || b) {
    if (a && (!b || a.index() < b.index())) {
      f(a.value(), Scalar(0));
      ++a;
    } else if (b && (!a || b.index() < a.index())) {
      f(Scalar(0), b.value());
      ++b;
    } else {
      f(a.value(), b.value());
      ++a;
      ++b;
    }
  }
}

inline bool ranks_before(const ScoredQuery& x, const ScoredQuery& y) {
  return x.score > y.score || (x.score == y.score && x.query < y.query);
}

inline SimilarityResult take_top(std::vector<ScoredQuery> scored, std::size_t k) {
  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), ranks_before);
  scored.resize(keep);
  return scored;
}

}  // namespace detail

template <typename Scalar>
TransitionMatrices<Scalar> normalize(const WeightedGraph<Scalar>& w) {
  TransitionMatrices<Scalar> t;
  t.q2d = w.values();
  t.zero_query_rows = detail::normalize_rows(t.q2d);
  t.d2q = w.values().transpose();
  t.zero_url_rows = detail::normalize_rows(t.d2q);
  return t;
}

/// Cosine of the angle between two rows of q2d. Throws ZeroVector for an
/// all-zero row.
template <typename Scalar>
Scalar cosine_similarity(const TransitionMatrices<Scalar>& t, QueryId i, QueryId j) {
  detail::require_row(t, i);
  detail::require_row(t, j);
  Scalar dot = 0, norm_i = 0, norm_j = 0;
  detail::merge_rows(t.q2d, i, j, [&](Scalar a, Scalar b) {
    dot += a * b;
    norm_i += a * a;
    norm_j += b * b;
  });
  using std::sqrt;
  const Scalar denom = sqrt(norm_i) * sqrt(norm_j);
  if (denom == Scalar(0)) throw ZeroVector("zero-norm representation");
  return std::clamp(dot / denom, Scalar(0), Scalar(1));
}

/// Generalized Jaccard: sum of elementwise minima over sum of maxima. With
/// `binary` the supports (entries > 0) are compared as sets instead.
template <typename Scalar>
Scalar jaccard_similarity(const TransitionMatrices<Scalar>& t, QueryId i, QueryId j, bool binary = false) {
  detail::require_row(t, i);
  detail::require_row(t, j);
  Scalar num = 0, den = 0;
  detail::merge_rows(t.q2d, i, j, [&](Scalar a, Scalar b) {
    if (binary) {
      const bool in_a = a > Scalar(0), in_b = b > Scalar(0);
      num += (in_a && in_b) ? Scalar(1) : Scalar(0);
      den += (in_a || in_b) ? Scalar(1) : Scalar(0);
    } else {
      num += std::min(a, b);
      den += std::max(a, b);
    }
  });
  if (den == Scalar(0)) throw ZeroVector("zero-mass representation");
  return num / den;
}

/// Two-step query-to-query walk, q2d * d2q (M x M).
template <typename Scalar>
typename TransitionMatrices<Scalar>::Matrix q2q_step(const TransitionMatrices<Scalar>& t) {
  typename TransitionMatrices<Scalar>::Matrix p = t.q2d * t.d2q;
  p.makeCompressed();
  return p;
}

/// Iterates R <- (1 - alpha) R + alpha * q2q^T R `steps` times from the
/// indicator of the source query. A query with an all-zero row keeps the mass
/// it would have propagated, so the total stays 1.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> personalized_pagerank(const TransitionMatrices<Scalar>& t,
                                                               const typename TransitionMatrices<Scalar>::Matrix& q2q,
                                                               const PprParams& params) {
  params.validate(t.num_queries());
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Scalar alpha = static_cast<Scalar>(params.alpha);
  Vector r = Vector::Zero(t.num_queries());
  r(params.source) = Scalar(1);

  Vector dangling = Vector::Zero(t.num_queries());
  for (std::size_t i = 0; i < t.zero_query_rows.size(); ++i) {
    if (t.zero_query_rows[i]) dangling(static_cast<Eigen::Index>(i)) = Scalar(1);
  }
  const bool has_dangling = dangling.any();

  for (int step = 0; step < params.steps; ++step) {
    Vector next = (Scalar(1) - alpha) * r + alpha * (q2q.transpose() * r);
    if (has_dangling) next += alpha * dangling.cwiseProduct(r);
    r.swap(next);
  }
  return r;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> personalized_pagerank(const TransitionMatrices<Scalar>& t,
                                                               const PprParams& params) {
  return personalized_pagerank(t, q2q_step(t), params);
}

/// Top-k queries most similar to `source`. Cosine and Jaccard score only the
/// queries that share a URL with positive weight; zero scores are dropped.
/// PPR ranks every other query with positive mass. `q2q` may be passed to
/// reuse a precomputed walk matrix.
template <typename Scalar>
SimilarityResult top_k_similar(const TransitionMatrices<Scalar>& t, QueryId source, SimilarityMethod method,
                               std::size_t k, const PprParams& ppr = {},
                               const typename TransitionMatrices<Scalar>::Matrix* q2q = nullptr) {
  using Matrix = typename TransitionMatrices<Scalar>::Matrix;
  if (source >= t.num_queries()) throw UnknownQuery("query id " + std::to_string(source) + " out of range");
  if (k < 1) throw InvalidArgument("k must be >= 1");

  std::vector<ScoredQuery> scored;
  if (method == SimilarityMethod::kPpr) {
    PprParams params = ppr;
    params.source = source;
    const auto r = q2q ? personalized_pagerank(t, *q2q, params) : personalized_pagerank(t, params);
    for (Eigen::Index j = 0; j < r.size(); ++j) {
      if (static_cast<QueryId>(j) != source && r(j) > Scalar(0)) {
        scored.push_back({static_cast<QueryId>(j), static_cast<double>(r(j))});
      }
    }
    return detail::take_top(std::move(scored), k);
  }

  if (t.zero_query_rows[source]) return {};
  std::vector<QueryId> candidates;
  for (typename Matrix::InnerIterator d(t.q2d, source); d; ++d) {
    if (d.value() <= Scalar(0)) continue;
    for (typename Matrix::InnerIterator q(t.d2q, d.index()); q; ++q) {
      if (q.value() > Scalar(0) && static_cast<QueryId>(q.index()) != source) {
        candidates.push_back(static_cast<QueryId>(q.index()));
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  scored.reserve(candidates.size());
  for (QueryId c : candidates) {
    Scalar s = 0;
    switch (method) {
      case SimilarityMethod::kCosine:
        s = cosine_similarity(t, source, c);
        break;
      case SimilarityMethod::kJaccard:
        s = jaccard_similarity(t, source, c);
        break;
      case SimilarityMethod::kJaccardBinary:
        s = jaccard_similarity(t, source, c, true);
        break;
      case SimilarityMethod::kPpr:
        break;
    }
    if (s > Scalar(0)) scored.push_back({c, static_cast<double>(s)});
  }
  return detail::take_top(std::move(scored), k);
}

}  // namespace clickgraph
