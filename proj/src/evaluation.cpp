#include "clickgraph/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "clickgraph/error.hpp"
#include "clickgraph/parallel.hpp"

namespace clickgraph {

namespace {

std::string_view trim(std::string_view s) {
  auto space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? s.size() - start : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::size_t common_prefix(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t n = 0;
  while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
  return n;
}

std::size_t longest_common_run(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
      best = std::max(best, cur[j]);
    }
    std::swap(prev, cur);
  }
  return best;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    std::uint64_t x = rng();
    if (x < limit) return x % bound;
  }
}

}  // namespace

CategoryPath CategoryPath::parse(std::string_view text) {
  CategoryPath path;
  for (auto part : split(text, '>')) {
    part = trim(part);
    if (part.empty()) continue;
    std::string seg(part);
    for (auto& c : seg) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    path.segments.push_back(std::move(seg));
  }
  if (path.segments.empty()) throw FormatError("empty category path '" + std::string(text) + "'");
  return path;
}

std::string CategoryPath::to_string() const {
  std::string out;
  for (const auto& s : segments) {
    if (!out.empty()) out += " > ";
    out += s;
  }
  return out;
}

double path_similarity(const CategoryPath& a, const CategoryPath& b, PathMatch match) {
  if (a.segments.empty() || b.segments.empty()) throw InvalidArgument("category paths must be non-empty");
  const std::size_t shared = match == PathMatch::kPrefix ? common_prefix(a.segments, b.segments)
                                                         : longest_common_run(a.segments, b.segments);
  return static_cast<double>(shared) / static_cast<double>(std::max(a.segments.size(), b.segments.size()));
}

void CategoryCatalog::add(std::string query, std::vector<CategoryPath> paths) {
  auto& list = entries_[std::move(query)];
  for (auto& p : paths) {
    if (list.size() >= max_paths_) break;
    list.push_back(std::move(p));
  }
}

CategoryCatalog CategoryCatalog::load(std::istream& in, const CleaningConfig& config, std::size_t max_paths) {
  CategoryCatalog catalog(max_paths);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (trim(view).empty() || trim(view).front() == '#') continue;
    const auto tab = view.find('\t');
    if (tab == std::string_view::npos) {
      throw FormatError("catalog line " + std::to_string(line_no) + ": expected 'query<TAB>paths'");
    }
    std::string query = normalize_query(view.substr(0, tab), config);
    if (query.empty()) continue;
    std::vector<CategoryPath> paths;
    for (auto part : split(view.substr(tab + 1), '|')) {
      if (trim(part).empty()) continue;
      paths.push_back(CategoryPath::parse(part));
    }
    if (paths.empty()) {
      throw FormatError("catalog line " + std::to_string(line_no) + ": no category paths");
    }
    catalog.add(std::move(query), std::move(paths));
  }
  if (in.bad()) throw IoError("read failure in catalog", 0);
  return catalog;
}

CategoryCatalog CategoryCatalog::load_file(const std::filesystem::path& path, const CleaningConfig& config,
                                           std::size_t max_paths) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open catalog " + path.string(), 0);
  return load(in, config, max_paths);
}

const std::vector<CategoryPath>* CategoryCatalog::find(std::string_view query) const {
  auto it = entries_.find(query);
  return it == entries_.end() ? nullptr : &it->second;
}

double query_pair_similarity(const CategoryCatalog& catalog, std::string_view q, std::string_view r,
                             PathMatch match) {
  const auto* a = catalog.find(q);
  if (a == nullptr) throw MissingCategory("no category for query '" + std::string(q) + "'");
  const auto* b = catalog.find(r);
  if (b == nullptr) throw MissingCategory("no category for query '" + std::string(r) + "'");
  double best = 0.0;
  for (const auto& pa : *a) {
    for (const auto& pb : *b) best = std::max(best, path_similarity(pa, pb, match));
  }
  return best;
}

double precision_at_n(const CategoryCatalog& catalog, std::string_view q, std::span<const std::string> results,
                      std::size_t n, PathMatch match) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  if (!catalog.contains(q)) throw MissingCategory("no category for query '" + std::string(q) + "'");
  double sum = 0.0;
  const std::size_t m = std::min(n, results.size());
  for (std::size_t r = 0; r < m; ++r) {
    if (catalog.contains(results[r])) sum += query_pair_similarity(catalog, q, results[r], match);
  }
  return sum / static_cast<double>(n);
}

std::size_t query_length(std::string_view query) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : query) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

double length_at_n(std::span<const std::string> results, std::size_t n) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  const std::size_t m = std::min(n, results.size());
  if (m == 0) return 0.0;
  std::size_t total = 0;
  for (std::size_t r = 0; r < m; ++r) total += query_length(results[r]);
  return static_cast<double>(total) / static_cast<double>(m);
}

std::string MethodSpec::label() const {
  if (method != SimilarityMethod::kPpr) return std::string(method_name(method));
  std::ostringstream os;
  os << "ppr(alpha=" << ppr.alpha << ",steps=" << ppr.steps << ")";
  return os.str();
}

const EvalRow* EvalReport::find(WeightModel model, std::string_view method) const {
  for (const auto& row : rows) {
    if (row.model == model && row.method == method) return &row;
  }
  return nullptr;
}

std::vector<std::size_t> seeded_sample(std::size_t population, std::size_t count, std::uint64_t seed) {
  count = std::min(count, population);
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(rng, population - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return idx;
}

EvalReport run_evaluation(std::span<const WeightedGraph<double>* const> graphs, std::span<const MethodSpec> methods,
                          const CategoryCatalog& catalog, const EvalConfig& config) {
  if (graphs.empty()) throw InvalidArgument("no weighted graphs to evaluate");
  if (methods.empty()) throw InvalidArgument("no similarity methods to evaluate");
  if (config.k < 1) throw InvalidArgument("k must be >= 1");
  const BipartiteClickGraph& base = graphs.front()->base();
  for (const auto* g : graphs) {
    if (&g->base() != &base) throw InvalidArgument("weighted graphs must share one base graph");
  }
  for (const auto& m : methods) {
    if (m.method == SimilarityMethod::kPpr) {
      PprParams probe = m.ppr;
      probe.source = 0;
      probe.validate(static_cast<Eigen::Index>(std::max<std::size_t>(1, base.num_queries())));
    }
  }

  std::vector<QueryId> pool;
  for (QueryId q = 0; q < base.num_queries(); ++q) {
    if (!config.restrict_to_catalog || catalog.contains(base.queries()[q])) pool.push_back(q);
  }

  EvalReport report;
  report.seed = config.seed;
  report.k = config.k;
  report.match = config.match;
  std::vector<QueryId> evaluated;
  for (std::size_t i : seeded_sample(pool.size(), config.sample_size, config.seed)) {
    const QueryId q = pool[i];
    ++report.sampled;
    report.sample.push_back(base.queries()[q]);
    if (catalog.contains(base.queries()[q])) {
      evaluated.push_back(q);
    } else {
      ++report.skipped;
    }
  }
  report.evaluated = evaluated.size();
  if (evaluated.empty()) throw EmptySample("no sampled query has a catalog entry");

  std::vector<TransitionMatrices<double>> walks;
  std::vector<TransitionMatrices<double>::Matrix> q2q(graphs.size());
  walks.reserve(graphs.size());
  const bool needs_q2q =
      std::any_of(methods.begin(), methods.end(), [](const MethodSpec& m) { return m.method == SimilarityMethod::kPpr; });
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    walks.push_back(normalize(*graphs[g]));
    if (needs_q2q) q2q[g] = q2q_step(walks.back());
  }

  const std::size_t cells = graphs.size() * methods.size();
  const std::size_t k = config.k;
  struct Partial {
    std::vector<double> precision;
    double length = 0.0;
    bool has_results = false;
  };
  std::vector<std::vector<Partial>> partials(evaluated.size(), std::vector<Partial>(cells));

  parallel_for(evaluated.size(), config.threads, [&](std::size_t s) {
    const QueryId source = evaluated[s];
    const std::string& source_name = base.queries()[source];
    for (std::size_t g = 0; g < graphs.size(); ++g) {
      for (std::size_t m = 0; m < methods.size(); ++m) {
        const auto result = top_k_similar(walks[g], source, methods[m].method, k, methods[m].ppr, &q2q[g]);
        std::vector<std::string> names;
        names.reserve(result.size());
        for (const auto& r : result) names.push_back(base.queries()[r.query]);
        Partial& p = partials[s][g * methods.size() + m];
        p.precision.resize(k);
        for (std::size_t n = 1; n <= k; ++n) {
          p.precision[n - 1] = precision_at_n(catalog, source_name, names, n, config.match);
        }
        p.has_results = !names.empty();
        p.length = length_at_n(names, k);
      }
    }
  });

  for (std::size_t g = 0; g < graphs.size(); ++g) {
    for (std::size_t m = 0; m < methods.size(); ++m) {
      EvalRow row{graphs[g]->model(), methods[m].label(), std::vector<double>(k, 0.0), 0.0, 0};
      double length_sum = 0.0;
      for (const auto& per_query : partials) {
        const Partial& p = per_query[g * methods.size() + m];
        for (std::size_t n = 0; n < k; ++n) row.precision[n] += p.precision[n];
        if (p.has_results) {
          length_sum += p.length;
          ++row.queries_with_results;
        }
      }
      for (auto& v : row.precision) v /= static_cast<double>(evaluated.size());
      row.length_at_k = row.queries_with_results > 0 ? length_sum / static_cast<double>(row.queries_with_results) : 0.0;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace clickgraph
