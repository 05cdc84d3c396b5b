#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "clickgraph/error.hpp"
#include "clickgraph/fixtures.hpp"
#include "clickgraph/io.hpp"

using namespace clickgraph;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("edge TSV round-trips and rejects bad lines") {
  const auto triples = fixtures::example_triples();
  std::stringstream buf;
  write_edge_tsv(buf, triples);
  CHECK(read_edge_tsv(buf) == triples);

  std::istringstream comments("# header\n\nq\td\t3\r\n");
  CHECK(read_edge_tsv(comments) == std::vector<EdgeTriple>{{"q", "d", 3}});

  for (const char* bad : {"q\td\n", "q\td\t0\n", "q\td\tx\n", "\td\t1\n", "q\td\t1\textra\n"}) {
    std::istringstream in(std::string("a\tb\t1\n") + bad);
    CHECK_THROWS_WITH_AS(read_edge_tsv(in), doctest::Contains("line 2"), FormatError);
  }
}

TEST_CASE("snapshots round-trip and are versioned") {
  TempDir dir("clickgraph_io_snapshot");
  const auto g = BipartiteClickGraph::build(fixtures::mini_corpus().edges);
  save_snapshot(dir.path / "snap", g);
  const auto loaded = load_graph(dir.path / "snap");
  CHECK(loaded.triples() == g.triples());
  CHECK(loaded.queries().strings() == g.queries().strings());

  const auto from_file = load_graph(dir.path / "snap" / "edges.tsv");
  CHECK(from_file.triples() == g.triples());

  std::ofstream(dir.path / "snap" / "VERSION") << "clickgraph-snapshot 99\n";
  CHECK_THROWS_WITH_AS(load_graph(dir.path / "snap"), doctest::Contains("version"), FormatError);
  fs::create_directories(dir.path / "empty");
  CHECK_THROWS_AS(load_graph(dir.path / "empty"), FormatError);
  CHECK_THROWS_AS(load_graph(dir.path / "missing.tsv"), IoError);
}

TEST_CASE("weighted TSV header and values") {
  const auto g = BipartiteClickGraph::build(fixtures::example_triples());
  const auto w = weigh_edges(g, WeightModel::kUFWIQF, WeightOptions{5.0, std::nullopt, std::nullopt});
  std::ostringstream out;
  write_weighted_tsv(out, w);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# model=ufw-iqf q_total=5 u_total=3");
  std::getline(in, line);
  CHECK(line == "q1\td1\t0.169916");
  std::size_t rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == g.num_edges());
}

TEST_CASE("graph stats JSON") {
  const auto g = BipartiteClickGraph::build(fixtures::example_triples());
  const auto j = graph_stats_json(g);
  CHECK(j["M"] == 4);
  CHECK(j["N"] == 3);
  CHECK(j["edges"] == 7);
  CHECK(j["total_uf"] == 67);
  CHECK(j["avg_clicks_per_query"].get<double>() == doctest::Approx(67.0 / 4));
  CHECK(j["avg_clicks_per_url"].get<double>() == doctest::Approx(67.0 / 3));
  CHECK(j["q_of_d_histogram"] == nlohmann::json::parse("[[1,1],[2,1],[4,1]]"));
  CHECK(j["q_of_d_fit"].is_object());
  CHECK(j["u_of_d_fit"].is_null());
}

TEST_CASE("report table layout") {
  EvalReport report;
  report.seed = 3;
  report.k = 2;
  report.sampled = 4;
  report.evaluated = 3;
  report.skipped = 1;
  report.rows.push_back({WeightModel::kUF, "cosine", {0.5, 0.25}, 1.5, 3});
  report.rows.push_back({WeightModel::kUFWIUF, "cosine", {0.75, 0.125}, 2.0, 3});
  const std::string expected =
      "# seed=3 sampled=4 evaluated=3 skipped=1\n"
      "method               uf  ufw-iuf\n"
      "cosine  P@1      0.5000   0.7500\n"
      "        P@2      0.2500   0.1250\n"
      "        L@2      1.5000   2.0000\n";
  CHECK(format_report_table(report) == expected);
  const auto j = to_json(report);
  CHECK(j["rows"][1]["model"] == "ufw-iuf");
  CHECK(j["rows"][0]["L@2"] == 1.5);
}

TEST_CASE("points TSV") {
  std::istringstream in("# x y\n1\t10\n\n2\t5.5\n");
  const auto points = read_points_tsv(in);
  REQUIRE(points.size() == 2);
  CHECK(points[1].x == 2.0);
  CHECK(points[1].y == 5.5);
  std::istringstream bad("1\n");
  CHECK_THROWS_AS(read_points_tsv(bad), FormatError);
}
