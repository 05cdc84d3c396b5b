#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "clickgraph/click_graph.hpp"
#include "clickgraph/evaluation.hpp"
#include "clickgraph/log_ingest.hpp"
#include "clickgraph/power_law.hpp"
#include "clickgraph/similarity.hpp"
#include "clickgraph/weighting.hpp"

namespace clickgraph {

inline constexpr int kSnapshotVersion = 1;

/// printf("%.6g").
std::string format_sig6(double value);

/// `query \t url \t uf`, LF endings, in the order given.
void write_edge_tsv(std::ostream& out, std::span<const EdgeTriple> triples);
/// Throws FormatError naming the line on malformed input.
std::vector<EdgeTriple> read_edge_tsv(std::istream& in);

/// Writes edges.tsv, queries.tsv and urls.tsv (`id \t string`) plus a
/// VERSION file into `dir`.
void save_snapshot(const std::filesystem::path& dir, const BipartiteClickGraph& g);
/// Accepts a snapshot directory or a bare edge TSV file.
BipartiteClickGraph load_graph(const std::filesystem::path& path, unsigned threads = 1);

nlohmann::json to_json(const IngestStats& stats);
nlohmann::json to_json(const PowerLawFit& fit);
nlohmann::json to_json(std::span<const HistogramBin> hist);

/// M, N, edge count, total uf, average clicks per query and per URL,
/// q(d) and u(d) histograms and their power-law fits (null when degenerate).
nlohmann::json graph_stats_json(const BipartiteClickGraph& g);

/// `query \t url \t v` with a leading `# model=... q_total=... u_total=...` line.
void write_weighted_tsv(std::ostream& out, const WeightedGraph<double>& w);

void write_similar_tsv(std::ostream& out, const BipartiteClickGraph& g, const SimilarityResult& result);
nlohmann::json similar_json(const BipartiteClickGraph& g, const SimilarityResult& result);

nlohmann::json to_json(const EvalReport& report);
/// Models as columns; P@1, P@k and L@k rows per method.
std::string format_report_table(const EvalReport& report);

/// `x \t y` pairs; blank and '#' lines skipped.
std::vector<Point> read_points_tsv(std::istream& in);

}  // namespace clickgraph
