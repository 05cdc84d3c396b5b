#include <doctest.h>

#include <random>

#include "clickgraph/error.hpp"
#include "clickgraph/fixtures.hpp"
#include "clickgraph/similarity.hpp"
#include "oracles.hpp"

using namespace clickgraph;

namespace {

struct Fixture {
  BipartiteClickGraph graph;
  WeightedGraph<double> weighted;
  TransitionMatrices<double> t;

  Fixture(std::vector<EdgeTriple> triples, WeightModel model, WeightOptions options = {})
      : graph(BipartiteClickGraph::build(triples)),
        weighted(weigh_edges(graph, model, options)),
        t(normalize(weighted)) {}
};

Fixture example_fixture(WeightModel model = WeightModel::kUF) { return Fixture(fixtures::example_triples(), model); }

// Positionwise scores agree; an id may differ only where the oracle scores
// it the same as the expected entry (a near-tie).
template <typename Score>
void check_same_ranking(const SimilarityResult& got, const std::vector<oracle::Scored>& expected, Score&& score,
                        double tol) {
  REQUIRE(got.size() == expected.size());
  for (std::size_t r = 0; r < got.size(); ++r) {
    CHECK(std::abs(got[r].score - expected[r].score) <= tol);
    if (got[r].query != static_cast<QueryId>(expected[r].query)) {
      CHECK(std::abs(score(static_cast<int>(got[r].query)) - expected[r].score) <= tol);
    }
  }
}

}  // namespace

TEST_CASE("normalize builds row-stochastic matrices") {
  auto f = example_fixture();
  const Eigen::MatrixXd q2d(f.t.q2d);
  CHECK(q2d(1, 0) == doctest::Approx(0.5));
  CHECK(q2d(1, 1) == doctest::Approx(0.5));
  CHECK(q2d(1, 2) == 0.0);
  CHECK(q2d(0, 0) == 1.0);
  const Eigen::MatrixXd d2q(f.t.d2q);
  CHECK(d2q(0, 0) == doctest::Approx(20.0 / 45.0));
  for (int i = 0; i < 4; ++i) CHECK(q2d.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
  for (int j = 0; j < 3; ++j) CHECK(d2q.row(j).sum() == doctest::Approx(1.0).epsilon(1e-12));

  Fixture one({{"q", "d", 7}}, WeightModel::kUF);
  CHECK(Eigen::MatrixXd(one.t.q2d)(0, 0) == 1.0);
  CHECK(Eigen::MatrixXd(one.t.d2q)(0, 0) == 1.0);
}

TEST_CASE("cosine and jaccard on small vectors") {
  // q2 = (1/2, 1/2, 0) and q1 = (1, 0, 0).
  auto f = example_fixture();
  CHECK(cosine_similarity(f.t, 0, 1) == doctest::Approx(0.70710678).epsilon(1e-8));
  CHECK(jaccard_similarity(f.t, 0, 1) == doctest::Approx(0.5 / 1.5));
  CHECK(jaccard_similarity(f.t, 0, 1, true) == doctest::Approx(0.5));
  CHECK(cosine_similarity(f.t, 1, 1) == doctest::Approx(1.0));
  CHECK(jaccard_similarity(f.t, 2, 2) == doctest::Approx(1.0));
  CHECK(cosine_similarity(f.t, 1, 2) == doctest::Approx(cosine_similarity(f.t, 2, 1)));
  CHECK(jaccard_similarity(f.t, 1, 3) == doctest::Approx(jaccard_similarity(f.t, 3, 1)));
}

TEST_CASE("q2q walk on the worked example") {
  auto f = example_fixture();
  const Eigen::MatrixXd p(q2q_step(f.t));
  CHECK(p(0, 0) == doctest::Approx(20.0 / 45.0));
  for (int i = 0; i < 4; ++i) CHECK(p.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("personalized_pagerank small cases") {
  auto f = example_fixture();
  SUBCASE("zero steps return the indicator") {
    const auto r = personalized_pagerank(f.t, PprParams{0.5, 0, 2});
    CHECK(r(2) == 1.0);
    CHECK(r.sum() == 1.0);
  }
  SUBCASE("one step matches the dense update") {
    const auto r = personalized_pagerank(f.t, PprParams{0.3, 1, 1});
    const Eigen::MatrixXd p(q2q_step(f.t));
    Eigen::VectorXd e = Eigen::VectorXd::Zero(4);
    e(1) = 1;
    const Eigen::VectorXd expected = 0.7 * e + 0.3 * p.transpose() * e;
    CHECK((r - expected).cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("a single query keeps all its mass") {
    Fixture one({{"q", "d", 1}}, WeightModel::kUF);
    const auto r = personalized_pagerank(one.t, PprParams{0.5, 7, 0});
    CHECK(r(0) == doctest::Approx(1.0));
  }
  SUBCASE("invalid parameters") {
    CHECK_THROWS_AS(personalized_pagerank(f.t, PprParams{0.0, 1, 0}), InvalidArgument);
    CHECK_THROWS_AS(personalized_pagerank(f.t, PprParams{1.0, 1, 0}), InvalidArgument);
    CHECK_THROWS_AS(personalized_pagerank(f.t, PprParams{0.5, -1, 0}), InvalidArgument);
    CHECK_THROWS_AS(personalized_pagerank(f.t, PprParams{0.5, 1, 4}), UnknownQuery);
  }
}

TEST_CASE("all-zero rows raise ZeroVector and keep PPR mass") {
  // d1 is shared by both queries, so with |Q| = 2 its IQF is 0 and qa,
  // which clicks only d1, ends up with an all-zero row.
  Fixture f({{"qa", "d1", 3}, {"qb", "d1", 2}, {"qb", "d2", 5}}, WeightModel::kUFIQF);
  REQUIRE(f.t.zero_query_rows[0]);
  CHECK_THROWS_AS(cosine_similarity(f.t, 0, 1), ZeroVector);
  CHECK_THROWS_AS(jaccard_similarity(f.t, 1, 0), ZeroVector);
  CHECK(top_k_similar(f.t, 0, SimilarityMethod::kCosine, 5).empty());
  const auto r = personalized_pagerank(f.t, PprParams{0.5, 10, 0});
  CHECK(r.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r(0) == doctest::Approx(1.0));
}

TEST_CASE("top_k_similar edge cases") {
  auto f = example_fixture();
  SUBCASE("ranking on the worked example") {
    const auto top = top_k_similar(f.t, 0, SimilarityMethod::kCosine, 10);
    REQUIRE(top.size() == 3);
    CHECK(top[0].query == 2);
    CHECK(top[1].query == 1);
    CHECK(top[2].query == 3);
  }
  SUBCASE("k larger than the candidate set returns every candidate") {
    CHECK(top_k_similar(f.t, 1, SimilarityMethod::kJaccard, 100).size() == 3);
    CHECK(top_k_similar(f.t, 1, SimilarityMethod::kJaccard, 2).size() == 2);
  }
  SUBCASE("a query on a private URL has no neighbours") {
    Fixture g({{"a", "x", 1}, {"b", "y", 1}}, WeightModel::kUF);
    CHECK(top_k_similar(g.t, 0, SimilarityMethod::kCosine, 5).empty());
    CHECK(top_k_similar(g.t, 0, SimilarityMethod::kPpr, 5).empty());
  }
  SUBCASE("bad arguments") {
    CHECK_THROWS_AS(top_k_similar(f.t, 9, SimilarityMethod::kCosine, 5), UnknownQuery);
    CHECK_THROWS_AS(top_k_similar(f.t, 0, SimilarityMethod::kCosine, 0), InvalidArgument);
  }
  SUBCASE("ties are broken by query id") {
    Fixture g({{"a", "x", 1}, {"b", "x", 1}, {"c", "x", 1}, {"d", "x", 1}}, WeightModel::kUF);
    const auto top = top_k_similar(g.t, 2, SimilarityMethod::kCosine, 3);
    REQUIRE(top.size() == 3);
    CHECK(top[0].query == 0);
    CHECK(top[1].query == 1);
    CHECK(top[2].query == 3);
  }
}

TEST_CASE("sparse similarity agrees with the dense oracle on random graphs") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 2 + static_cast<int>(rng() % 40), n = 1 + static_cast<int>(rng() % 40);
    const auto triples = oracle::random_triples(rng, m, n);
    const auto model = kAllModels[rng() % kAllModels.size()];
    Fixture f(triples, model);
    const Eigen::MatrixXd p = oracle::row_normalize(oracle::dense_weights(oracle::dense_uf(triples, m, n), model, m, n));
    const Eigen::MatrixXd d2q = oracle::row_normalize(oracle::dense_weights(oracle::dense_uf(triples, m, n), model, m, n).transpose());
    const Eigen::MatrixXd q2q = p * d2q;

    CHECK((Eigen::MatrixXd(q2q_step(f.t)) - q2q).cwiseAbs().maxCoeff() <= 1e-12);

    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (f.t.zero_query_rows[i] || f.t.zero_query_rows[j]) continue;
        CHECK(cosine_similarity(f.t, i, j) == doctest::Approx(std::clamp(oracle::cosine(p, i, j), 0.0, 1.0)).epsilon(1e-10));
        CHECK(jaccard_similarity(f.t, i, j) == doctest::Approx(oracle::jaccard(p, i, j)).epsilon(1e-10));
      }
    }

    const int source = static_cast<int>(rng() % m);
    const double alpha = trial % 2 ? 0.1 : 0.5;
    const int steps = static_cast<int>(rng() % 11);
    const auto r = personalized_pagerank(f.t, PprParams{alpha, steps, static_cast<QueryId>(source)});
    const auto expected = oracle::ppr(q2q, alpha, steps, source);
    CHECK((r - expected).cwiseAbs().maxCoeff() <= 1e-10);

    if (!f.t.zero_query_rows[source]) {
      auto cos = [&](int j) {
        return f.t.zero_query_rows[j] ? 0.0 : std::clamp(oracle::cosine(p, source, j), 0.0, 1.0);
      };
      check_same_ranking(top_k_similar(f.t, source, SimilarityMethod::kCosine, 5), oracle::rank_all(m, source, 5, cos),
                         cos, 1e-10);
    }
    auto mass = [&](int j) { return expected(j); };
    check_same_ranking(top_k_similar(f.t, source, SimilarityMethod::kPpr, 5, PprParams{alpha, steps, 0}),
                       oracle::rank_all(m, source, 5, mass), mass, 1e-10);
  }
}

TEST_CASE("PPR conserves mass over many iterations") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + static_cast<int>(rng() % 30), n = 1 + static_cast<int>(rng() % 30);
    Fixture f(oracle::random_triples(rng, m, n), trial % 2 ? WeightModel::kUFIQF : WeightModel::kUFWIUF);
    const auto r = personalized_pagerank(f.t, PprParams{0.5, 50, static_cast<QueryId>(rng() % m)});
    CHECK(std::abs(r.sum() - 1.0) <= 1e-9);
    CHECK(r.minCoeff() >= 0.0);
  }
}

TEST_CASE("method names round-trip") {
  CHECK(parse_method("Jaccard_Binary") == SimilarityMethod::kJaccardBinary);
  CHECK(parse_method("ppr") == SimilarityMethod::kPpr);
  CHECK_FALSE(parse_method("euclid").has_value());
}
