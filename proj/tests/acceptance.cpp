// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "clickgraph/click_graph.hpp"
#include "clickgraph/evaluation.hpp"
#include "clickgraph/fixtures.hpp"
#include "clickgraph/log_ingest.hpp"
#include "clickgraph/parallel.hpp"
#include "clickgraph/power_law.hpp"
#include "clickgraph/similarity.hpp"
#include "clickgraph/weighting.hpp"
#include "oracles.hpp"
#include "rules.hpp"

using namespace clickgraph;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(const char* name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

using Quadrant = std::array<std::array<double, 3>, 4>;

double max_dev(const WeightedGraph<double>& w, const Quadrant& expected) {
  const Eigen::MatrixXd dense(w.values());
  double worst = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(dense(i, j) - expected[i][j]));
  }
  return worst;
}

Outcome worked_example() {
  const Quadrant uf = {{{20, 0, 0}, {10, 10, 0}, {10, 0, 2}, {5, 0, 10}}};
  const Quadrant uf_iqf = {{{4.4, 0, 0}, {2.2, 16.1, 0}, {2.2, 0, 1.84}, {1.1, 0, 9.2}}};
  const Quadrant ufw_iqf = {{{0.17, 0, 0}, {0.14, 1.04, 0}, {0.16, 0, 0.42}, {0.13, 0, 0.64}}};
  const Quadrant ufw_iuf = {{{0.22, 0, 0}, {0.19, 0.45, 0}, {0.21, 0, 0.32}, {0.16, 0, 0.48}}};
  const std::array<double, 3> iqf_row = {0.22, 1.61, 0.92}, iuf_row = {0.29, 0.69, 0.69};
  constexpr double tol = 0.005;

  const auto start = Clock::now();
  const auto g = BipartiteClickGraph::build(fixtures::example_triples());
  const WeightOptions totals{5.0, 4.0, std::nullopt};
  WeightOptions printed = totals;
  printed.global_weight_decimals = 2;

  const auto w_uf = weigh_edges(g, WeightModel::kUF, totals);
  const auto w_iqf_printed = weigh_edges(g, WeightModel::kUFIQF, printed);
  const auto w_iqf_exact = weigh_edges(g, WeightModel::kUFIQF, totals);
  const auto w_ufw_iqf = weigh_edges(g, WeightModel::kUFWIQF, totals);
  const auto w_ufw_iuf = weigh_edges(g, WeightModel::kUFWIUF, totals);
  const auto& gi = *w_ufw_iqf.global_weights();
  const auto& gu = *w_ufw_iuf.global_weights();
  const double elapsed = seconds_since(start);

  double row_dev = 0;
  for (int j = 0; j < 3; ++j) {
    row_dev = std::max({row_dev, std::abs(gi(j) - iqf_row[j]), std::abs(gu(j) - iuf_row[j])});
  }
  const double d_uf = max_dev(w_uf, uf), d_iqf = max_dev(w_iqf_printed, uf_iqf);
  const double d_ufw_iqf = max_dev(w_ufw_iqf, ufw_iqf), d_ufw_iuf = max_dev(w_ufw_iuf, ufw_iuf);
  const bool pass = g.num_edges() == 7 && row_dev <= tol && d_uf <= tol && d_iqf <= tol && d_ufw_iqf <= tol &&
                    d_ufw_iuf <= tol && elapsed < 1.0;
  return {pass, fmt("max|dev| IQF/IUF rows=%.5f uf=%.5f uf-iqf=%.5f ufw-iqf=%.5f ufw-iuf=%.5f; "
                    "uf-iqf uses IQF as printed (2 dp), full-precision IQF gives %.4f; %.3f ms",
                    row_dev, d_uf, d_iqf, d_ufw_iqf, d_ufw_iuf, max_dev(w_iqf_exact, uf_iqf), elapsed * 1e3)};
}

Outcome path_metric() {
  const auto haiti = CategoryPath::parse("Regional > Caribbean > Haiti > Guides-and-Directories");
  const auto news = CategoryPath::parse("Regional > Caribbean > Haiti > News-and-Media");
  const auto history = CategoryPath::parse("Society > History > By-Region > Caribbean > Haiti");
  const double a = path_similarity(haiti, news);
  const double b = path_similarity(haiti, history, PathMatch::kContiguous);
  const double b_prefix = path_similarity(haiti, history, PathMatch::kPrefix);
  return {a == 3.0 / 4.0 && b == 2.0 / 5.0,
          fmt("haiti/haiti news=%.4f haiti/haiti history=%.4f (contiguous; prefix gives %.4f)", a, b, b_prefix)};
}

Outcome rule_suite() {
  std::mt19937_64 rng(20100);
  std::uniform_int_distribution<int> size(1, 50);
  rules::Tally r2, r3, r1s, r1;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto triples = oracle::random_triples(rng, size(rng), size(rng), 20, 0.1);
    const auto g = BipartiteClickGraph::build(triples);
    for (auto model : {WeightModel::kUFWIQF, WeightModel::kUFWIUF}) {
      const auto rep = rules::check(weigh_edges(g, model));
      for (auto [total, part] : {std::pair{&r2, &rep.uf_order}, {&r3, &rep.diversity_order}, {&r1s, &rep.global_order_sufficient},
                                 {&r1, &rep.global_order_any}}) {
        total->checks += part->checks;
        total->violations += part->violations;
      }
    }
  }
  const bool pass = r2.violations == 0 && r3.violations == 0 && r1s.violations == 0 && r2.checks > 0 &&
                    r3.checks > 0 && r1s.checks > 0;
  return {pass, fmt("uf-order %zu/%zu ok, diversity-order %zu/%zu ok, global-order sufficient %zu/%zu ok; "
                    "unconditioned global-order violation rate %.4f (%zu of %zu)",
                    r2.checks - r2.violations, r2.checks, r3.checks - r3.violations, r3.checks,
                    r1s.checks - r1s.violations, r1s.checks, r1.rate(), r1.violations, r1.checks)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(20101);
  std::uniform_int_distribution<int> size(1, 100);
  double worst_cos = 0, worst_jac = 0, worst_q2q = 0, worst_ppr = 0;
  std::size_t zero_row_mismatch = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = size(rng), n = size(rng);
    const auto triples = oracle::random_triples(rng, m, n, 20, 0.05);
    const auto model = kAllModels[static_cast<std::size_t>(trial) % kAllModels.size()];
    const auto g = BipartiteClickGraph::build(triples);
    const auto t = normalize(weigh_edges(g, model));

    const Eigen::MatrixXd v = oracle::dense_weights(oracle::dense_uf(triples, m, n), model, m, n);
    const Eigen::MatrixXd p = oracle::row_normalize(v);
    const Eigen::MatrixXd q2q = p * oracle::row_normalize(v.transpose());

    worst_q2q = std::max(worst_q2q, (Eigen::MatrixXd(q2q_step(t)) - q2q).cwiseAbs().maxCoeff());
    for (int i = 0; i < m; ++i) {
      const bool zero = p.row(i).sum() == 0;
      if (zero != static_cast<bool>(t.zero_query_rows[i])) ++zero_row_mismatch;
    }
    for (int i = 0; i < m; ++i) {
      if (t.zero_query_rows[i]) continue;
      for (int j = i; j < m; ++j) {
        if (t.zero_query_rows[j]) continue;
        worst_cos = std::max(worst_cos, std::abs(cosine_similarity(t, i, j) - std::clamp(oracle::cosine(p, i, j), 0.0, 1.0)));
        worst_jac = std::max(worst_jac, std::abs(jaccard_similarity(t, i, j) - oracle::jaccard(p, i, j)));
      }
    }
    const int source = static_cast<int>(rng() % static_cast<std::uint64_t>(m));
    const auto sparse_q2q = q2q_step(t);
    for (double alpha : {0.1, 0.5}) {
      for (int steps = 0; steps <= 10; ++steps) {
        const auto r = personalized_pagerank(t, sparse_q2q, PprParams{alpha, steps, static_cast<QueryId>(source)});
        worst_ppr = std::max(worst_ppr, (r - oracle::ppr(q2q, alpha, steps, source)).cwiseAbs().maxCoeff());
      }
    }
  }
  constexpr double tol = 1e-10;
  const bool pass = worst_cos <= tol && worst_jac <= tol && worst_q2q <= tol && worst_ppr <= tol && zero_row_mismatch == 0;
  return {pass, fmt("max|dev| cosine=%.2e jaccard=%.2e q2q=%.2e ppr=%.2e over 200 graphs", worst_cos, worst_jac,
                    worst_q2q, worst_ppr)};
}

Outcome stochasticity() {
  std::mt19937_64 rng(20102);
  std::uniform_int_distribution<int> size(2, 100);
  double worst_row = 0, worst_mass = 0;
  std::size_t dangling_graphs = 0;
  auto row_sums = [&](const auto& mat) {
    for (Eigen::Index r = 0; r < mat.outerSize(); ++r) {
      double s = 0;
      bool any = false;
      for (typename std::decay_t<decltype(mat)>::InnerIterator it(mat, r); it; ++it) {
        s += it.value();
        any = any || it.value() != 0.0;
      }
      if (any) worst_row = std::max(worst_row, std::abs(s - 1.0));
    }
  };
  for (int trial = 0; trial < 100; ++trial) {
    const int m = size(rng), n = size(rng);
    const auto model = kAllModels[static_cast<std::size_t>(trial) % kAllModels.size()];
    const auto g = BipartiteClickGraph::build(oracle::random_triples(rng, m, n, 20, 0.05));
    const auto t = normalize(weigh_edges(g, model));
    const auto q2q = q2q_step(t);
    row_sums(t.q2d);
    row_sums(t.d2q);
    row_sums(q2q);
    if (std::find(t.zero_query_rows.begin(), t.zero_query_rows.end(), true) != t.zero_query_rows.end()) ++dangling_graphs;
    const auto source = static_cast<QueryId>(rng() % static_cast<std::uint64_t>(m));
    for (double alpha : {0.1, 0.5, 0.9}) {
      for (int steps = 1; steps <= 50; ++steps) {
        const auto r = personalized_pagerank(t, q2q, PprParams{alpha, steps, source});
        worst_mass = std::max(worst_mass, std::abs(r.sum() - 1.0));
      }
    }
  }
  return {worst_row <= 1e-9 && worst_mass <= 1e-9,
          fmt("max|row sum - 1|=%.2e, max|PPR mass - 1| over 50 iterations=%.2e (%zu graphs with zero rows)",
              worst_row, worst_mass, dangling_graphs)};
}

Outcome power_law() {
  double worst_a = 0, worst_b = 0;
  for (auto [a, b] : {std::pair{31395.0, 1.45}, {33575.0, 1.56}}) {
    const auto fit = fit_power_law(fixtures::power_law_points(a, b, 1000));
    worst_a = std::max(worst_a, std::abs(fit.amplitude - a) / a);
    worst_b = std::max(worst_b, std::abs(fit.exponent - b) / b);
  }
  std::mt19937_64 rng(20103);
  std::uniform_real_distribution<double> noise(-0.1, 0.1);
  double worst_noisy = 0;
  for (int trial = 0; trial < 100; ++trial) {
    for (auto [a, b] : {std::pair{31395.0, 1.45}, {33575.0, 1.56}}) {
      auto points = fixtures::power_law_points(a, b, 1000);
      for (auto& p : points) p.y *= 1.0 + noise(rng);
      worst_noisy = std::max(worst_noisy, std::abs(fit_power_law(points).exponent - b));
    }
  }
  return {worst_a <= 1e-6 && worst_b <= 1e-6 && worst_noisy <= 0.05,
          fmt("noise-free rel err A=%.2e B=%.2e; 10%% noise max|B - B0|=%.4f over 100 trials", worst_a, worst_b,
              worst_noisy)};
}

Outcome ingest_throughput() {
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "clickgraph_acceptance_log.tsv";
  fixtures::SyntheticLogSpec spec;
  fixtures::SyntheticLogTruth truth;
  {
    std::ofstream out(path, std::ios::binary);
    truth = fixtures::generate_synthetic_log(out, spec);
  }
  CleaningConfig config = CleaningConfig::defaults();
  config.min_user_clicks_per_query = spec.min_user_clicks_per_query;

  const auto start = Clock::now();
  UserFrequencyAccumulator acc;
  const auto stats = parse_log_file(path, config, [&](ClickRecord&& r) { acc.add(r); });
  const auto deduped = acc.finish();
  const auto kept = filter_rare_queries(deduped, config);
  const auto g = BipartiteClickGraph::build(kept, default_thread_count());
  const double elapsed = seconds_since(start);
  fs::remove(path);

  std::uint64_t deduped_uf = 0;
  for (const auto& t : deduped) deduped_uf += t.uf;
  const bool exact = stats == truth.stats && acc.distinct_combinations() == truth.distinct_combinations &&
                     deduped.size() == truth.deduped_edges && deduped_uf == truth.deduped_total_uf &&
                     g.num_queries() == truth.filtered_queries && g.num_urls() == truth.filtered_urls &&
                     g.num_edges() == truth.filtered_edges && g.total_uf() == truth.filtered_total_uf;
  return {exact && elapsed < 30.0,
          fmt("%llu lines in %.2f s; records=%llu edges=%zu M=%u N=%u; stats %s ground truth",
              static_cast<unsigned long long>(stats.total_lines), elapsed,
              static_cast<unsigned long long>(stats.records), g.num_edges(), g.num_queries(), g.num_urls(),
              exact ? "match" : "DO NOT match")};
}

}  // namespace

int main() {
  report("worked-example-weights", worked_example);
  report("path-metric", path_metric);
  report("global-consistency-rules", rule_suite);
  report("oracle-equivalence", oracle_equivalence);
  report("stochasticity-mass", stochasticity);
  report("power-law-fit", power_law);
  report("ingest-throughput", ingest_throughput);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
