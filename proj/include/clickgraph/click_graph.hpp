#pragma once

#include <Eigen/SparseCore>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clickgraph/log_ingest.hpp"

namespace clickgraph {

using QueryId = std::uint32_t;
using UrlId = std::uint32_t;

/// Dense id <-> string mapping.
class StringDictionary {
 public:
  StringDictionary() = default;
  /// `sorted_unique` must be strictly increasing; ids follow that order.
  explicit StringDictionary(std::vector<std::string> sorted_unique);

  std::optional<std::uint32_t> find(std::string_view s) const;
  const std::string& operator[](std::uint32_t id) const { return strings_[id]; }
  std::size_t size() const { return strings_.size(); }
  const std::vector<std::string>& strings() const { return strings_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };
  std::vector<std::string> strings_;
  std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> index_;
};

/// One adjacency entry: the neighbour id and the user frequency of the edge.
struct Adjacency {
  std::uint32_t target;
  std::uint32_t uf;

  friend bool operator==(const Adjacency&, const Adjacency&) = default;
};

/// Per-URL neighbourhood sizes. q_of_d counts distinct incident queries;
/// u_of_d counts distinct URLs one query-hop away, the URL itself included.
struct UrlDegreeProfile {
  std::vector<std::uint32_t> q_of_d;
  std::vector<std::uint32_t> u_of_d;
};

/// Immutable query x URL click graph. Both adjacency views are stored in CSR
/// form and are transposes of each other. Ids are assigned in lexicographic
/// order of the strings.
class BipartiteClickGraph {
 public:
  /// Throws DuplicateEdge for a repeated (query, url) pair and
  /// InvalidArgument for uf == 0.
  static BipartiteClickGraph build(std::span<const EdgeTriple> triples, unsigned threads = 1);

  std::size_t num_queries() const { return queries_.size(); }
  std::size_t num_urls() const { return urls_.size(); }
  std::size_t num_edges() const { return query_adj_.size(); }

  const StringDictionary& queries() const { return queries_; }
  const StringDictionary& urls() const { return urls_; }

  /// Sorted by URL id.
  std::span<const Adjacency> urls_of(QueryId q) const {
    return {query_adj_.data() + query_offsets_[q], query_adj_.data() + query_offsets_[q + 1]};
  }
  /// Sorted by query id.
  std::span<const Adjacency> queries_of(UrlId d) const {
    return {url_adj_.data() + url_offsets_[d], url_adj_.data() + url_offsets_[d + 1]};
  }

  /// Offset of the first edge of query q in the row-major edge order.
  std::size_t row_offset(QueryId q) const { return query_offsets_[q]; }

  /// S_i: total user frequency of a query over all its URLs.
  std::uint64_t query_uf_sum(QueryId q) const { return query_uf_sums_[q]; }
  std::uint64_t total_uf() const { return total_uf_; }

  const UrlDegreeProfile& degree_profile() const { return profile_; }

  /// Row-major sparse M x N matrix of user frequencies.
  template <typename Scalar = double>
  Eigen::SparseMatrix<Scalar, Eigen::RowMajor> uf_matrix() const;

  std::vector<EdgeTriple> triples() const;

 private:
  StringDictionary queries_;
  StringDictionary urls_;
  std::vector<std::size_t> query_offsets_;
  std::vector<Adjacency> query_adj_;
  std::vector<std::size_t> url_offsets_;
  std::vector<Adjacency> url_adj_;
  std::vector<std::uint64_t> query_uf_sums_;
  std::uint64_t total_uf_ = 0;
  UrlDegreeProfile profile_;
};

UrlDegreeProfile compute_degree_profile(const BipartiteClickGraph& g, unsigned threads = 1);

template <typename Scalar>
Eigen::SparseMatrix<Scalar, Eigen::RowMajor> BipartiteClickGraph::uf_matrix() const {
  std::vector<Eigen::Triplet<Scalar>> entries;
  entries.reserve(num_edges());
  for (QueryId q = 0; q < num_queries(); ++q) {
    for (const auto& e : urls_of(q)) entries.emplace_back(q, e.target, static_cast<Scalar>(e.uf));
  }
  Eigen::SparseMatrix<Scalar, Eigen::RowMajor> m(static_cast<Eigen::Index>(num_queries()),
                                                 static_cast<Eigen::Index>(num_urls()));
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

}  // namespace clickgraph
