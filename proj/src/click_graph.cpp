#include "clickgraph/click_graph.hpp"

#include <algorithm>
#include <tuple>

#include "clickgraph/error.hpp"
#include "clickgraph/parallel.hpp"

namespace clickgraph {

namespace {

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

StringDictionary::StringDictionary(std::vector<std::string> sorted_unique)
    : strings_(std::move(sorted_unique)) {
  index_.reserve(strings_.size());
  for (std::uint32_t i = 0; i < strings_.size(); ++i) {
    if (i > 0 && !(strings_[i - 1] < strings_[i])) {
      throw InvalidArgument("dictionary strings must be strictly increasing");
    }
    index_.emplace(strings_[i], i);
  }
}

std::optional<std::uint32_t> StringDictionary::find(std::string_view s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

BipartiteClickGraph BipartiteClickGraph::build(std::span<const EdgeTriple> triples, unsigned threads) {
  BipartiteClickGraph g;
  {
    std::vector<std::string> qs, us;
    qs.reserve(triples.size());
    us.reserve(triples.size());
    for (const auto& t : triples) {
      if (t.uf == 0) throw InvalidArgument("edge (" + t.query + ", " + t.url + ") has uf = 0");
      qs.push_back(t.query);
      us.push_back(t.url);
    }
    g.queries_ = StringDictionary(sorted_unique(std::move(qs)));
    g.urls_ = StringDictionary(sorted_unique(std::move(us)));
  }

  struct Edge {
    QueryId q;
    UrlId d;
    std::uint32_t uf;
  };
  std::vector<Edge> edges;
  edges.reserve(triples.size());
  for (const auto& t : triples) edges.push_back({*g.queries_.find(t.query), *g.urls_.find(t.url), t.uf});
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.q, a.d) < std::tie(b.q, b.d); });
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (edges[k].q == edges[k - 1].q && edges[k].d == edges[k - 1].d) {
      throw DuplicateEdge("duplicate edge (" + g.queries_[edges[k].q] + ", " + g.urls_[edges[k].d] + ")");
    }
  }

  const std::size_t m = g.queries_.size();
  const std::size_t n = g.urls_.size();
  g.query_offsets_.assign(m + 1, 0);
  g.url_offsets_.assign(n + 1, 0);
  g.query_uf_sums_.assign(m, 0);
  g.query_adj_.reserve(edges.size());
  for (const auto& e : edges) {
    ++g.query_offsets_[e.q + 1];
    ++g.url_offsets_[e.d + 1];
    g.query_adj_.push_back({e.d, e.uf});
    g.query_uf_sums_[e.q] += e.uf;
    g.total_uf_ += e.uf;
  }
  for (std::size_t i = 0; i < m; ++i) g.query_offsets_[i + 1] += g.query_offsets_[i];
  for (std::size_t j = 0; j < n; ++j) g.url_offsets_[j + 1] += g.url_offsets_[j];

  // Edges are visited in query order, so each URL's list comes out sorted.
  g.url_adj_.resize(edges.size());
  std::vector<std::size_t> cursor(g.url_offsets_.begin(), g.url_offsets_.end() - 1);
  for (const auto& e : edges) g.url_adj_[cursor[e.d]++] = {e.q, e.uf};

  g.profile_ = compute_degree_profile(g, threads);
  return g;
}

std::vector<EdgeTriple> BipartiteClickGraph::triples() const {
  std::vector<EdgeTriple> out;
  out.reserve(num_edges());
  for (QueryId q = 0; q < num_queries(); ++q) {
    for (const auto& e : urls_of(q)) out.push_back({queries_[q], urls_[e.target], e.uf});
  }
  return out;
}

UrlDegreeProfile compute_degree_profile(const BipartiteClickGraph& g, unsigned threads) {
  const std::size_t n = g.num_urls();
  UrlDegreeProfile p;
  p.q_of_d.resize(n);
  p.u_of_d.resize(n);

  // One visit-stamp array per worker, indexed by URL.
  std::vector<std::vector<std::uint32_t>> stamps(worker_count(n, std::max(1u, threads)));

  parallel_for_workers(n, std::max(1u, threads), [&](std::size_t w, std::size_t j) {
    if (stamps[w].empty()) stamps[w].assign(n, 0);
    auto& stamp = stamps[w];
    const auto mark = static_cast<std::uint32_t>(j + 1);
    std::uint32_t reach = 0;
    auto incident = g.queries_of(static_cast<UrlId>(j));
    for (const auto& qe : incident) {
      for (const auto& de : g.urls_of(qe.target)) {
        if (stamp[de.target] != mark) {
          stamp[de.target] = mark;
          ++reach;
        }
      }
    }
    p.q_of_d[j] = static_cast<std::uint32_t>(incident.size());
    p.u_of_d[j] = reach;
  });
  return p;
}

}  // namespace clickgraph
