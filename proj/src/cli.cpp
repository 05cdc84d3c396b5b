#include "clickgraph/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "clickgraph/click_graph.hpp"
#include "clickgraph/error.hpp"
#include "clickgraph/evaluation.hpp"
#include "clickgraph/fixtures.hpp"
#include "clickgraph/io.hpp"
#include "clickgraph/log_ingest.hpp"
#include "clickgraph/parallel.hpp"
#include "clickgraph/power_law.hpp"
#include "clickgraph/similarity.hpp"
#include "clickgraph/weighting.hpp"

namespace clickgraph::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

struct Globals {
  unsigned threads = default_thread_count();
  std::string format = "tsv";
  std::uint64_t seed = 0;
};

struct WeightFlags {
  std::string model = "ufw-iqf";
  std::optional<double> q_total;
  std::optional<double> u_total;
  std::optional<int> decimals;

  void attach(CLI::App* cmd, bool required_model) {
    auto* opt = cmd->add_option("--model", model, "Weighting model: " + valid_model_names())
                    ->check(CLI::Validator(
                        [](std::string& v) {
                          return parse_model(v) ? std::string{} : "unknown model '" + v + "'; valid: " + valid_model_names();
                        },
                        "MODEL"));
    if (required_model) opt->required();
    cmd->add_option("--q-total", q_total, "|Q| used by IQF (default: number of queries)")->check(CLI::PositiveNumber);
    cmd->add_option("--u-total", u_total, "|U| used by IUF (default: number of URLs)")->check(CLI::PositiveNumber);
    cmd->add_option("--round-global-weights", decimals, "Round IQF/IUF to this many decimals")
        ->check(CLI::Range(0, 15));
  }

  WeightOptions options() const { return WeightOptions{q_total, u_total, decimals}; }
};

CLI::Validator method_validator() {
  return CLI::Validator(
      [](std::string& v) {
        return parse_method(v) ? std::string{} : "unknown method '" + v + "'; valid: " + valid_method_names();
      },
      "METHOD");
}

// Writes to the named file, or to `fallback` when the path is empty.
template <typename Writer>
void emit(const std::string& path, std::ostream& fallback, Writer&& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write " + path, 0);
  write(file);
  if (!file) throw IoError("write failure in " + path, 0);
}

QueryId resolve_query(const BipartiteClickGraph& g, const std::string& text) {
  if (auto id = g.queries().find(text)) return *id;
  for (const auto& config : {CleaningConfig::without_stopwords(), CleaningConfig::defaults()}) {
    if (auto id = g.queries().find(normalize_query(text, config))) return *id;
  }
  throw UnknownQuery("query '" + text + "' is not in the graph");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_json(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << '\n'; }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Query-URL click graph toolkit: ingest logs, weight edges, find similar queries, evaluate."};
  app.name("clickgraph");
  app.require_subcommand(1);
  app.fallthrough();

  Globals globals;
  app.add_option("--threads", globals.threads, "Worker threads (default: available parallelism)")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", globals.format, "Output format")->check(CLI::IsMember({"tsv", "json"}));
  app.add_option("--seed", globals.seed, "Random seed");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse AOL-format logs into a deduplicated edge file");
  std::vector<std::string> log_paths;
  std::string ingest_out, ingest_stats, ingest_snapshot, stopword_file;
  bool no_stopwords = false;
  std::uint32_t min_clicks = 4;
  ingest->add_option("logs", log_paths, "Log files (plain or gzip)")->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", ingest_out, "Edge file to write (query<TAB>url<TAB>uf)")->required();
  ingest->add_option("--stats", ingest_stats, "Write ingest statistics JSON here (default: stdout)");
  ingest->add_option("--snapshot", ingest_snapshot, "Also write a graph snapshot directory");
  auto* stop_opt = ingest->add_option("--stopwords", stopword_file, "Stop-word file, one word per line")
                       ->check(CLI::ExistingFile);
  ingest->add_flag("--no-stopwords", no_stopwords, "Do not remove stop words")->excludes(stop_opt);
  ingest->add_option("--min-user-clicks", min_clicks, "Drop queries with fewer total user clicks")
      ->check(CLI::Range(1u, std::numeric_limits<std::uint32_t>::max()));

  // stats
  auto* stats = app.add_subcommand("stats", "Graph size, degree histograms and power-law fits as JSON");
  std::string stats_graph, stats_out;
  stats->add_option("--graph", stats_graph, "Edge file or snapshot directory")->required()->check(CLI::ExistingPath);
  stats->add_option("--out", stats_out, "Output file (default: stdout)");

  // weight
  auto* weight = app.add_subcommand("weight", "Write per-edge values under a weighting model");
  std::string weight_graph, weight_out;
  WeightFlags weight_flags;
  weight->add_option("--graph", weight_graph, "Edge file or snapshot directory")->required()->check(CLI::ExistingPath);
  weight_flags.attach(weight, true);
  weight->add_option("--out", weight_out, "Output file (default: stdout)");

  // similar
  auto* similar = app.add_subcommand("similar", "Top-k similar queries");
  std::string similar_graph, similar_query, similar_method = "cosine", similar_out;
  WeightFlags similar_flags;
  std::size_t similar_k = 10;
  double similar_alpha = 0.5;
  int similar_steps = 1;
  similar->add_option("--graph", similar_graph, "Edge file or snapshot directory")->required()->check(CLI::ExistingPath);
  similar_flags.attach(similar, false);
  similar->add_option("--method", similar_method, "Similarity: " + valid_method_names())->check(method_validator());
  similar->add_option("--query", similar_query, "Source query")->required();
  similar->add_option("--k", similar_k, "Number of results")->check(CLI::PositiveNumber);
  similar->add_option("--alpha", similar_alpha, "PPR jumping constant in (0,1)")->check(CLI::Range(0.0, 1.0));
  similar->add_option("--steps", similar_steps, "PPR iterations")->check(CLI::NonNegativeNumber);
  similar->add_option("--out", similar_out, "Output file (default: stdout)");

  // ppr
  auto* ppr = app.add_subcommand("ppr", "Personalized PageRank score vector from one query");
  std::string ppr_graph, ppr_query, ppr_out;
  WeightFlags ppr_flags;
  double ppr_alpha = 0.5;
  int ppr_steps = 1;
  ppr->add_option("--graph", ppr_graph, "Edge file or snapshot directory")->required()->check(CLI::ExistingPath);
  ppr_flags.attach(ppr, false);
  ppr->add_option("--query", ppr_query, "Source query")->required();
  ppr->add_option("--alpha", ppr_alpha, "Jumping constant in (0,1)")->check(CLI::Range(0.0, 1.0));
  ppr->add_option("--steps", ppr_steps, "Iterations")->check(CLI::NonNegativeNumber);
  ppr->add_option("--out", ppr_out, "Output file (default: stdout)");

  // eval
  auto* eval = app.add_subcommand("eval", "P@n / L@n report over a seeded query sample");
  std::string eval_graph, eval_catalog, eval_models = "uf,uf-iqf,ufw-iqf,ufw-iuf", eval_methods = "cosine,jaccard",
                                        eval_out, eval_match = "prefix";
  std::size_t eval_sample = 500, eval_k = 10, eval_max_paths = 5;
  double eval_alpha = 0.5;
  int eval_steps = 1;
  bool eval_all_queries = false;
  eval->add_option("--graph", eval_graph, "Edge file or snapshot directory")->required()->check(CLI::ExistingPath);
  eval->add_option("--catalog", eval_catalog, "Category file: query<TAB>path | path ...")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--models", eval_models, "Comma-separated models");
  eval->add_option("--methods", eval_methods, "Comma-separated methods");
  eval->add_option("--sample-size", eval_sample, "Queries to sample")->check(CLI::PositiveNumber);
  eval->add_option("--k", eval_k, "Results per query")->check(CLI::PositiveNumber);
  eval->add_option("--alpha", eval_alpha, "PPR jumping constant")->check(CLI::Range(0.0, 1.0));
  eval->add_option("--steps", eval_steps, "PPR iterations")->check(CLI::NonNegativeNumber);
  eval->add_option("--max-paths", eval_max_paths, "Category paths kept per query")->check(CLI::PositiveNumber);
  eval->add_option("--path-match", eval_match, "Path matching rule")->check(CLI::IsMember({"prefix", "contiguous"}));
  eval->add_flag("--all-queries", eval_all_queries,
                 "Sample from every graph query and skip those without a catalog entry");
  WeightFlags eval_flags;
  eval->add_option("--q-total", eval_flags.q_total, "|Q| used by IQF")->check(CLI::PositiveNumber);
  eval->add_option("--u-total", eval_flags.u_total, "|U| used by IUF")->check(CLI::PositiveNumber);
  eval->add_option("--out", eval_out, "Output file (default: stdout)");

  // fit-powerlaw
  auto* fit = app.add_subcommand("fit-powerlaw", "Fit y = A x^-B by log-log least squares");
  std::string fit_input, fit_graph, fit_degree = "q", fit_out;
  auto* fit_input_opt = fit->add_option("--input", fit_input, "x<TAB>y points")->check(CLI::ExistingFile);
  auto* fit_graph_opt = fit->add_option("--graph", fit_graph, "Fit a degree histogram of this graph")
                            ->check(CLI::ExistingPath)
                            ->excludes(fit_input_opt);
  fit->add_option("--degree", fit_degree, "Which degree histogram: q or u")->check(CLI::IsMember({"q", "u"}));
  fit->add_option("--out", fit_out, "Output file (default: stdout)");

  // gen-fixture
  auto* gen = app.add_subcommand("gen-fixture", "Write built-in fixtures");
  std::string gen_kind, gen_out, gen_truth;
  std::uint64_t gen_lines = 1'000'000;
  double gen_amplitude = 31395, gen_exponent = 1.45;
  int gen_max_x = 100;
  gen->add_option("--kind", gen_kind, "example | sample-log | log | mini | powerlaw")
      ->required()
      ->check(CLI::IsMember({"example", "sample-log", "log", "mini", "powerlaw"}));
  gen->add_option("--out", gen_out, "Output file (directory for mini)")->required();
  gen->add_option("--lines", gen_lines, "Synthetic log length")->check(CLI::PositiveNumber);
  gen->add_option("--truth", gen_truth, "Ground-truth JSON for the synthetic log");
  gen->add_option("--amplitude", gen_amplitude, "Power-law A")->check(CLI::PositiveNumber);
  gen->add_option("--exponent", gen_exponent, "Power-law B");
  gen->add_option("--max-x", gen_max_x, "Largest x for power-law points")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  const bool json = globals.format == "json";

  // Cross-flag checks that CLI11 cannot express; all run before any work.
  if (*fit && fit_input_opt->count() == 0 && fit_graph_opt->count() == 0) {
    err << "fit-powerlaw: one of --input or --graph is required\n";
    return kUsageError;
  }
  std::vector<WeightModel> models;
  std::vector<MethodSpec> methods;
  if (*eval) {
    for (const auto& name : split_list(eval_models)) {
      auto m = parse_model(name);
      if (!m) {
        err << "eval: unknown model '" << name << "'; valid: " << valid_model_names() << '\n';
        return kUsageError;
      }
      models.push_back(*m);
    }
    for (const auto& name : split_list(eval_methods)) {
      auto m = parse_method(name);
      if (!m) {
        err << "eval: unknown method '" << name << "'; valid: " << valid_method_names() << '\n';
        return kUsageError;
      }
      methods.push_back(MethodSpec{*m, PprParams{eval_alpha, eval_steps, 0}});
    }
    if (models.empty() || methods.empty()) {
      err << "eval: --models and --methods must name at least one entry\n";
      return kUsageError;
    }
  }
  for (double alpha : {similar_alpha, ppr_alpha, eval_alpha}) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      err << "--alpha must lie strictly between 0 and 1\n";
      return kUsageError;
    }
  }

  try {
    if (*ingest) {
      CleaningConfig config = no_stopwords ? CleaningConfig::without_stopwords() : CleaningConfig::defaults();
      if (!stopword_file.empty()) config.stopwords = load_stopwords(stopword_file);
      config.min_user_clicks_per_query = min_clicks;

      UserFrequencyAccumulator acc;
      IngestStats total;
      for (const auto& path : log_paths) {
        total += parse_log_file(path, config, [&](ClickRecord&& r) { acc.add(r); });
        err << "ingest: " << path << ": " << total.total_lines << " lines so far\n";
      }
      const auto deduped = acc.finish();
      const auto kept = filter_rare_queries(deduped, config);
      emit(ingest_out, out, [&](std::ostream& os) { write_edge_tsv(os, kept); });
      if (!ingest_snapshot.empty()) {
        save_snapshot(ingest_snapshot, BipartiteClickGraph::build(kept, globals.threads));
      }
      auto report = to_json(total);
      report["distinct_user_query_url"] = acc.distinct_combinations();
      report["deduped_edges"] = deduped.size();
      report["filtered_edges"] = kept.size();
      report["min_user_clicks_per_query"] = config.min_user_clicks_per_query;
      emit(ingest_stats, out, [&](std::ostream& os) { write_json(os, report); });
      return 0;
    }

    if (*stats) {
      const auto g = load_graph(stats_graph, globals.threads);
      emit(stats_out, out, [&](std::ostream& os) { write_json(os, graph_stats_json(g)); });
      return 0;
    }

    if (*weight) {
      const auto g = load_graph(weight_graph, globals.threads);
      const auto w = weigh_edges<double>(g, *parse_model(weight_flags.model), weight_flags.options(), globals.threads);
      emit(weight_out, out, [&](std::ostream& os) { write_weighted_tsv(os, w); });
      return 0;
    }

    if (*similar) {
      const auto g = load_graph(similar_graph, globals.threads);
      const QueryId source = resolve_query(g, similar_query);
      const auto w = weigh_edges<double>(g, *parse_model(similar_flags.model), similar_flags.options(), globals.threads);
      const auto t = normalize(w);
      const auto result =
          top_k_similar(t, source, *parse_method(similar_method), similar_k, PprParams{similar_alpha, similar_steps, source});
      emit(similar_out, out, [&](std::ostream& os) {
        if (json) {
          write_json(os, similar_json(g, result));
        } else {
          write_similar_tsv(os, g, result);
        }
      });
      return 0;
    }

    if (*ppr) {
      const auto g = load_graph(ppr_graph, globals.threads);
      const QueryId source = resolve_query(g, ppr_query);
      const auto w = weigh_edges<double>(g, *parse_model(ppr_flags.model), ppr_flags.options(), globals.threads);
      const auto t = normalize(w);
      const auto r = personalized_pagerank(t, PprParams{ppr_alpha, ppr_steps, source});
      emit(ppr_out, out, [&](std::ostream& os) {
        if (json) {
          auto arr = nlohmann::json::array();
          for (Eigen::Index j = 0; j < r.size(); ++j) {
            if (r(j) != 0.0) arr.push_back({{"query", g.queries()[static_cast<QueryId>(j)]}, {"score", r(j)}});
          }
          write_json(os, arr);
        } else {
          for (Eigen::Index j = 0; j < r.size(); ++j) {
            if (r(j) != 0.0) os << g.queries()[static_cast<QueryId>(j)] << '\t' << format_sig6(r(j)) << '\n';
          }
        }
      });
      return 0;
    }

    if (*eval) {
      const auto g = load_graph(eval_graph, globals.threads);
      const auto catalog = CategoryCatalog::load_file(eval_catalog, CleaningConfig::without_stopwords(), eval_max_paths);
      WeightCache cache(g, eval_flags.options(), globals.threads);
      std::vector<const WeightedGraph<double>*> graphs;
      for (auto m : models) graphs.push_back(&cache.get(m));
      EvalConfig config;
      config.sample_size = eval_sample;
      config.k = eval_k;
      config.seed = globals.seed;
      config.restrict_to_catalog = !eval_all_queries;
      config.match = eval_match == "prefix" ? PathMatch::kPrefix : PathMatch::kContiguous;
      config.threads = globals.threads;
      const auto report = run_evaluation(graphs, methods, catalog, config);
      emit(eval_out, out, [&](std::ostream& os) {
        if (json) {
          write_json(os, to_json(report));
        } else {
          os << format_report_table(report);
        }
      });
      return 0;
    }

    if (*fit) {
      PowerLawFit result{};
      if (!fit_input.empty()) {
        std::ifstream in(fit_input);
        if (!in) throw IoError("cannot open " + fit_input, 0);
        result = fit_power_law(read_points_tsv(in));
      } else {
        const auto g = load_graph(fit_graph, globals.threads);
        const auto& p = g.degree_profile();
        result = fit_power_law(degree_histogram(fit_degree == "q" ? p.q_of_d : p.u_of_d));
      }
      emit(fit_out, out, [&](std::ostream& os) {
        if (json) {
          write_json(os, to_json(result));
        } else {
          char line[128];
          std::snprintf(line, sizeof line, "%.10g\t%.10g\t%.10g\n", result.amplitude, result.exponent,
                        result.r_squared);
          os << "A\tB\tr_squared\n" << line;
        }
      });
      return 0;
    }

    if (*gen) {
      if (gen_kind == "example") {
        emit(gen_out, out, [&](std::ostream& os) { write_edge_tsv(os, fixtures::example_triples()); });
      } else if (gen_kind == "sample-log") {
        emit(gen_out, out, [&](std::ostream& os) { os << fixtures::sample_log(); });
      } else if (gen_kind == "log") {
        fixtures::SyntheticLogSpec spec;
        spec.lines = gen_lines;
        spec.seed = globals.seed;
        fixtures::SyntheticLogTruth truth;
        emit(gen_out, out, [&](std::ostream& os) { truth = fixtures::generate_synthetic_log(os, spec); });
        if (!gen_truth.empty()) {
          auto j = to_json(truth.stats);
          j["distinct_user_query_url"] = truth.distinct_combinations;
          j["deduped_edges"] = truth.deduped_edges;
          j["filtered_queries"] = truth.filtered_queries;
          j["filtered_urls"] = truth.filtered_urls;
          j["filtered_edges"] = truth.filtered_edges;
          j["filtered_total_uf"] = truth.filtered_total_uf;
          emit(gen_truth, out, [&](std::ostream& os) { write_json(os, j); });
        }
      } else if (gen_kind == "mini") {
        const auto corpus = fixtures::mini_corpus();
        fs::create_directories(gen_out);
        auto edges = corpus.edges;
        std::sort(edges.begin(), edges.end());
        emit((fs::path(gen_out) / "edges.tsv").string(), out, [&](std::ostream& os) { write_edge_tsv(os, edges); });
        emit((fs::path(gen_out) / "catalog.tsv").string(), out, [&](std::ostream& os) { os << corpus.catalog_tsv; });
      } else {
        const auto points = fixtures::power_law_points(gen_amplitude, gen_exponent, gen_max_x);
        emit(gen_out, out, [&](std::ostream& os) {
          char line[96];
          for (const auto& p : points) {
            std::snprintf(line, sizeof line, "%.17g\t%.17g\n", p.x, p.y);
            os << line;
          }
        });
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << "clickgraph: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kUsageError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("clickgraph");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace clickgraph::cli
