#include "clickgraph/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "clickgraph/error.hpp"

namespace clickgraph {

namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? line.size() - start : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string(), 0);
  return out;
}

std::vector<std::string> read_dictionary(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string(), 0);
  std::vector<std::string> strings;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_tabs(line);
    std::size_t id = 0;
    if (fields.size() != 2 || !parse_number(fields[0], id) || id != strings.size()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected 'id<TAB>string' in id order");
    }
    strings.emplace_back(fields[1]);
  }
  return strings;
}

}  // namespace

std::string format_sig6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

void write_edge_tsv(std::ostream& out, std::span<const EdgeTriple> triples) {
  for (const auto& t : triples) out << t.query << '\t' << t.url << '\t' << t.uf << '\n';
}

std::vector<EdgeTriple> read_edge_tsv(std::istream& in) {
  std::vector<EdgeTriple> triples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_tabs(line);
    std::uint32_t uf = 0;
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || !parse_number(fields[2], uf) || uf == 0) {
      throw FormatError("edge file line " + std::to_string(line_no) + ": expected 'query<TAB>url<TAB>uf' with uf >= 1");
    }
    triples.push_back({std::string(fields[0]), std::string(fields[1]), uf});
  }
  if (in.bad()) throw IoError("read failure in edge file", 0);
  return triples;
}

void save_snapshot(const fs::path& dir, const BipartiteClickGraph& g) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "VERSION");
    out << "clickgraph-snapshot " << kSnapshotVersion << '\n';
  }
  {
    auto out = open_out(dir / "edges.tsv");
    write_edge_tsv(out, g.triples());
  }
  auto write_dict = [](const fs::path& path, const StringDictionary& dict) {
    auto out = open_out(path);
    for (std::size_t i = 0; i < dict.size(); ++i) out << i << '\t' << dict[static_cast<std::uint32_t>(i)] << '\n';
  };
  write_dict(dir / "queries.tsv", g.queries());
  write_dict(dir / "urls.tsv", g.urls());
}

BipartiteClickGraph load_graph(const fs::path& path, unsigned threads) {
  if (!fs::is_directory(path)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open graph " + path.string(), 0);
    auto triples = read_edge_tsv(in);
    return BipartiteClickGraph::build(triples, threads);
  }

  std::ifstream version(path / "VERSION");
  std::string tag;
  int number = 0;
  if (!(version >> tag >> number) || tag != "clickgraph-snapshot") {
    throw FormatError(path.string() + " is not a clickgraph snapshot");
  }
  if (number != kSnapshotVersion) {
    throw FormatError("unsupported snapshot version " + std::to_string(number));
  }
  std::ifstream edges(path / "edges.tsv", std::ios::binary);
  if (!edges) throw IoError("cannot open " + (path / "edges.tsv").string(), 0);
  auto g = BipartiteClickGraph::build(read_edge_tsv(edges), threads);
  if (read_dictionary(path / "queries.tsv") != g.queries().strings() ||
      read_dictionary(path / "urls.tsv") != g.urls().strings()) {
    throw FormatError("snapshot dictionaries do not match its edge list");
  }
  return g;
}

nlohmann::json to_json(const IngestStats& s) {
  return {{"total_lines", s.total_lines},         {"header_lines", s.header_lines},
          {"malformed_lines", s.malformed_lines}, {"no_click_lines", s.no_click_lines},
          {"empty_query_lines", s.empty_query_lines}, {"latin1_lines", s.latin1_lines},
          {"records", s.records}};
}

nlohmann::json to_json(const PowerLawFit& fit) {
  return {{"A", fit.amplitude}, {"B", fit.exponent}, {"r_squared", fit.r_squared}, {"points", fit.points_used}};
}

nlohmann::json to_json(std::span<const HistogramBin> hist) {
  auto arr = nlohmann::json::array();
  for (const auto& b : hist) arr.push_back({b.value, b.count});
  return arr;
}

nlohmann::json graph_stats_json(const BipartiteClickGraph& g) {
  const auto& profile = g.degree_profile();
  auto q_hist = degree_histogram(profile.q_of_d);
  auto u_hist = degree_histogram(profile.u_of_d);
  auto fit_or_null = [](std::span<const HistogramBin> hist) -> nlohmann::json {
    try {
      return to_json(fit_power_law(hist));
    } catch (const DegenerateFit&) {
      return nullptr;
    }
  };
  const double m = static_cast<double>(g.num_queries());
  const double n = static_cast<double>(g.num_urls());
  const double total = static_cast<double>(g.total_uf());
  return {{"M", g.num_queries()},
          {"N", g.num_urls()},
          {"edges", g.num_edges()},
          {"total_uf", g.total_uf()},
          {"avg_clicks_per_query", m > 0 ? total / m : 0.0},
          {"avg_clicks_per_url", n > 0 ? total / n : 0.0},
          {"q_of_d_histogram", to_json(q_hist)},
          {"u_of_d_histogram", to_json(u_hist)},
          {"q_of_d_fit", fit_or_null(q_hist)},
          {"u_of_d_fit", fit_or_null(u_hist)}};
}

void write_weighted_tsv(std::ostream& out, const WeightedGraph<double>& w) {
  const auto& g = w.base();
  out << "# model=" << model_name(w.model()) << " q_total=" << format_sig6(w.q_total())
      << " u_total=" << format_sig6(w.u_total()) << '\n';
  const double* values = w.values().valuePtr();
  for (QueryId q = 0; q < g.num_queries(); ++q) {
    std::size_t k = g.row_offset(q);
    for (const auto& e : g.urls_of(q)) {
      out << g.queries()[q] << '\t' << g.urls()[e.target] << '\t' << format_sig6(values[k++]) << '\n';
    }
  }
}

void write_similar_tsv(std::ostream& out, const BipartiteClickGraph& g, const SimilarityResult& result) {
  for (std::size_t r = 0; r < result.size(); ++r) {
    out << (r + 1) << '\t' << g.queries()[result[r].query] << '\t' << format_sig6(result[r].score) << '\n';
  }
}

nlohmann::json similar_json(const BipartiteClickGraph& g, const SimilarityResult& result) {
  auto arr = nlohmann::json::array();
  for (std::size_t r = 0; r < result.size(); ++r) {
    arr.push_back({{"rank", r + 1}, {"query", g.queries()[result[r].query]}, {"score", result[r].score}});
  }
  return arr;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"model", model_name(row.model)},
                    {"method", row.method},
                    {"precision", row.precision},
                    {"L@" + std::to_string(report.k), row.length_at_k},
                    {"queries_with_results", row.queries_with_results}});
  }
  return {{"seed", report.seed},
          {"k", report.k},
          {"path_match", report.match == PathMatch::kPrefix ? "prefix" : "contiguous"},
          {"sampled", report.sampled},
          {"evaluated", report.evaluated},
          {"skipped", report.skipped},
          {"rows", rows}};
}

std::string format_report_table(const EvalReport& report) {
  std::vector<WeightModel> models;
  std::vector<std::string> methods;
  for (const auto& row : report.rows) {
    if (std::find(models.begin(), models.end(), row.model) == models.end()) models.push_back(row.model);
    if (std::find(methods.begin(), methods.end(), row.method) == methods.end()) methods.push_back(row.method);
  }
  std::size_t method_width = 6;
  for (const auto& m : methods) method_width = std::max(method_width, m.size());

  std::ostringstream os;
  os << "# seed=" << report.seed << " sampled=" << report.sampled << " evaluated=" << report.evaluated
     << " skipped=" << report.skipped << '\n';
  os << std::left << std::setw(static_cast<int>(method_width)) << "method" << "  " << std::setw(6) << "";
  for (auto m : models) os << std::right << std::setw(9) << model_name(m);
  os << '\n';

  const std::string k = std::to_string(report.k);
  for (const auto& method : methods) {
    const std::array<std::string, 3> metrics = {"P@1", "P@" + k, "L@" + k};
    for (std::size_t i = 0; i < metrics.size(); ++i) {
      os << std::left << std::setw(static_cast<int>(method_width)) << (i == 0 ? method : "") << "  " << std::setw(6)
         << metrics[i];
      for (auto m : models) {
        const EvalRow* row = report.find(m, method);
        double v = 0.0;
        if (row != nullptr) v = i == 0 ? row->precision.front() : i == 1 ? row->precision.back() : row->length_at_k;
        os << std::right << std::setw(9) << std::fixed << std::setprecision(4) << v;
      }
      os << '\n';
    }
  }
  return os.str();
}

std::vector<Point> read_points_tsv(std::istream& in) {
  std::vector<Point> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_tabs(line);
    Point p{};
    if (fields.size() != 2 || !parse_number(fields[0], p.x) || !parse_number(fields[1], p.y)) {
      throw FormatError("points line " + std::to_string(line_no) + ": expected 'x<TAB>y'");
    }
    points.push_back(p);
  }
  return points;
}

}  // namespace clickgraph
