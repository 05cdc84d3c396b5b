#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clickgraph/log_ingest.hpp"
#include "clickgraph/similarity.hpp"
#include "clickgraph/weighting.hpp"

namespace clickgraph {

/// A taxonomy path such as Regional > Caribbean > Haiti. Segments are stored
/// trimmed and lowercased so comparisons are case-insensitive.
struct CategoryPath {
  std::vector<std::string> segments;

  /// Splits on '>'. Throws FormatError when no segment is left.
  static CategoryPath parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const CategoryPath&, const CategoryPath&) = default;
};

/// How two paths are matched. kPrefix counts the leading segments they share.
/// kContiguous counts the longest run of consecutive segments they share at
/// any position.
enum class PathMatch { kPrefix, kContiguous };

/// Shared segments divided by the longer path's length, in [0, 1].
double path_similarity(const CategoryPath& a, const CategoryPath& b, PathMatch match = PathMatch::kPrefix);

/// Query -> up to max_paths category paths. Catalog files are UTF-8 TSV:
///   query <TAB> path1 | path2 | ...      with segments joined by '>'.
class CategoryCatalog {
 public:
  explicit CategoryCatalog(std::size_t max_paths = 5) : max_paths_(max_paths) {}

  /// `query` must already be normalized. Paths beyond max_paths are dropped;
  /// a repeated query appends to its existing list.
  void add(std::string query, std::vector<CategoryPath> paths);

  /// Queries are normalized with `config` so they line up with ingested ones.
  static CategoryCatalog load(std::istream& in, const CleaningConfig& config, std::size_t max_paths = 5);
  static CategoryCatalog load_file(const std::filesystem::path& path, const CleaningConfig& config,
                                   std::size_t max_paths = 5);

  const std::vector<CategoryPath>* find(std::string_view query) const;
  bool contains(std::string_view query) const { return find(query) != nullptr; }
  std::size_t size() const { return entries_.size(); }
  std::size_t max_paths() const { return max_paths_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };
  std::size_t max_paths_;
  std::unordered_map<std::string, std::vector<CategoryPath>, Hash, std::equal_to<>> entries_;
};

/// Best path_similarity over all path pairs. Throws MissingCategory when
/// either query has no entry.
double query_pair_similarity(const CategoryCatalog& catalog, std::string_view q, std::string_view r,
                             PathMatch match = PathMatch::kPrefix);

/// Mean similarity of the top-n results to q. Missing results and results
/// absent from the catalog count as 0. Throws MissingCategory if q itself is
/// absent.
double precision_at_n(const CategoryCatalog& catalog, std::string_view q, std::span<const std::string> results,
                      std::size_t n, PathMatch match = PathMatch::kPrefix);

/// Whitespace token count.
std::size_t query_length(std::string_view query);

/// Mean token count over the first min(n, |results|) results; 0 for none.
double length_at_n(std::span<const std::string> results, std::size_t n);

struct MethodSpec {
  SimilarityMethod method = SimilarityMethod::kCosine;
  PprParams ppr;

  /// "cosine", "jaccard", or e.g. "ppr(alpha=0.5,steps=2)".
  std::string label() const;
};

struct EvalConfig {
  std::size_t sample_size = 500;
  std::size_t k = 10;
  std::uint64_t seed = 0;
  // Draw the sample only from queries that have a catalog entry.
  bool restrict_to_catalog = true;
  PathMatch match = PathMatch::kPrefix;
  unsigned threads = 1;
};

struct EvalRow {
  WeightModel model;
  std::string method;
  std::vector<double> precision;  // P@1 .. P@k
  double length_at_k = 0.0;       // averaged over queries with >= 1 result
  std::size_t queries_with_results = 0;
};

struct EvalReport {
  std::uint64_t seed = 0;
  std::size_t k = 0;
  std::size_t sampled = 0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  PathMatch match = PathMatch::kPrefix;
  std::vector<std::string> sample;
  std::vector<EvalRow> rows;

  const EvalRow* find(WeightModel model, std::string_view method) const;
};

/// Uniform sample of `count` distinct indices from [0, population), in draw
/// order. Uses mt19937_64 with explicit rejection sampling so the result is
/// identical across standard libraries.
std::vector<std::size_t> seeded_sample(std::size_t population, std::size_t count, std::uint64_t seed);

/// Evaluates every graph x method on one shared query sample. All graphs must
/// share the same base graph. Throws EmptySample when no sampled query has a
/// catalog entry.
EvalReport run_evaluation(std::span<const WeightedGraph<double>* const> graphs, std::span<const MethodSpec> methods,
                          const CategoryCatalog& catalog, const EvalConfig& config);

}  // namespace clickgraph
