#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "clickgraph/log_ingest.hpp"
#include "clickgraph/power_law.hpp"

namespace clickgraph::fixtures {

/// The four-query, three-URL example graph. Queries q1..q4 and URLs d1..d3
/// map to ids 0..3 and 0..2.
std::vector<EdgeTriple> example_triples();

/// Three AOL-format lines with a header row.
std::string sample_log();

struct SyntheticLogSpec {
  std::uint64_t lines = 1'000'000;  // including the header, if any
  std::uint32_t users = 50'000;
  std::uint32_t queries = 40'000;
  std::uint32_t urls = 60'000;
  double no_click_fraction = 0.15;
  double malformed_fraction = 0.01;
  double empty_query_fraction = 0.005;
  bool header = true;
  std::uint64_t seed = 1;
  std::uint32_t min_user_clicks_per_query = 4;
};

/// What an ingest of the generated log must report, computed by the generator
/// from its own canonical ids.
struct SyntheticLogTruth {
  IngestStats stats;
  std::uint64_t distinct_combinations = 0;  // (user, query, url)
  std::uint64_t deduped_edges = 0;
  std::uint64_t deduped_total_uf = 0;
  std::uint64_t filtered_queries = 0;
  std::uint64_t filtered_urls = 0;
  std::uint64_t filtered_edges = 0;
  std::uint64_t filtered_total_uf = 0;
};

/// Writes a tab-separated log whose queries carry random case, punctuation
/// and spacing noise around canonical forms made of non-stop-words.
SyntheticLogTruth generate_synthetic_log(std::ostream& out, const SyntheticLogSpec& spec);

/// A 20-query corpus with a hand-built category catalog.
struct MiniCorpus {
  std::vector<EdgeTriple> edges;
  std::string catalog_tsv;
};
MiniCorpus mini_corpus();

/// Exact samples of y = amplitude * x^(-exponent) at x = 1..max_x.
std::vector<Point> power_law_points(double amplitude, double exponent, int max_x);

}  // namespace clickgraph::fixtures
