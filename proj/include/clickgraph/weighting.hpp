#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "clickgraph/click_graph.hpp"
#include "clickgraph/error.hpp"
#include "clickgraph/parallel.hpp"

namespace clickgraph {

enum class WeightModel { kUF, kUFIQF, kUFWIQF, kUFWIUF };
enum class GlobalWeightKind { kIQF, kIUF };

inline constexpr std::array<WeightModel, 4> kAllModels = {WeightModel::kUF, WeightModel::kUFIQF,
                                                          WeightModel::kUFWIQF, WeightModel::kUFWIUF};

/// "uf", "uf-iqf", "ufw-iqf", "ufw-iuf".
std::string_view model_name(WeightModel model);
/// Case-insensitive; '_' is accepted for '-'.
std::optional<WeightModel> parse_model(std::string_view name);
std::string valid_model_names();

/// The global weight a model uses, if any.
std::optional<GlobalWeightKind> global_weight_kind(WeightModel model);

/// ln(q_total / q(d)) per URL. Requires q_total >= 1 and >= every q(d).
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> iqf(const UrlDegreeProfile& profile, double q_total);

/// ln(u_total / u(d)) per URL. Requires u_total >= 1 and >= every u(d).
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> iuf(const UrlDegreeProfile& profile, double u_total);

struct WeightOptions {
  // |Q| and |U| in the global weights; default to the graph's M and N.
  std::optional<double> q_total;
  std::optional<double> u_total;
  // Round global weights to this many decimals before they enter edge values.
  std::optional<int> global_weight_decimals;
};

/// Edge values v_ij of one model over the base graph's sparsity pattern.
/// Holds a reference to the base graph, which must outlive it.
template <typename Scalar = double>
class WeightedGraph {
 public:
  using Matrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  WeightedGraph(const BipartiteClickGraph& base, WeightModel model, Matrix values,
                std::optional<Vector> global_weights, double q_total, double u_total)
      : base_(&base),
        model_(model),
        values_(std::move(values)),
        global_weights_(std::move(global_weights)),
        q_total_(q_total),
        u_total_(u_total) {}

  const BipartiteClickGraph& base() const { return *base_; }
  WeightModel model() const { return model_; }
  /// M x N, row-major; entry order matches the base graph's edge order.
  const Matrix& values() const { return values_; }
  /// Absent for UF.
  const std::optional<Vector>& global_weights() const { return global_weights_; }
  double q_total() const { return q_total_; }
  double u_total() const { return u_total_; }

 private:
  const BipartiteClickGraph* base_;
  WeightModel model_;
  Matrix values_;
  std::optional<Vector> global_weights_;
  double q_total_;
  double u_total_;
};

template <typename Scalar = double>
WeightedGraph<Scalar> weigh_edges(const BipartiteClickGraph& g, WeightModel model,
                                  const WeightOptions& options = {}, unsigned threads = 1);

/// Builds each model's WeightedGraph on first request and keeps it.
class WeightCache {
 public:
  explicit WeightCache(const BipartiteClickGraph& base, WeightOptions options = {}, unsigned threads = 1)
      : base_(&base), options_(options), threads_(threads) {}

  const WeightedGraph<double>& get(WeightModel model);

 private:
  const BipartiteClickGraph* base_;
  WeightOptions options_;
  unsigned threads_;
  std::mutex mutex_;
  std::map<WeightModel, std::unique_ptr<WeightedGraph<double>>> cache_;
};

namespace detail {

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inverse_frequency(const std::vector<std::uint32_t>& counts, double total,
                                                           const char* what) {
  if (!(total >= 1.0)) throw InvalidArgument(std::string(what) + " total must be >= 1");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> g(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] < 1) throw InvalidArgument(std::string(what) + " count must be >= 1");
    if (counts[j] > total) {
      throw InvalidArgument(std::string(what) + " total " + std::to_string(total) + " is below a URL count of " +
                            std::to_string(counts[j]));
    }
    g(static_cast<Eigen::Index>(j)) = static_cast<Scalar>(std::log(total / static_cast<double>(counts[j])));
  }
  return g;
}

inline double round_to(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(x * scale) / scale;
}

}  // namespace detail

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> iqf(const UrlDegreeProfile& profile, double q_total) {
  return detail::inverse_frequency<Scalar>(profile.q_of_d, q_total, "IQF");
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> iuf(const UrlDegreeProfile& profile, double u_total) {
  return detail::inverse_frequency<Scalar>(profile.u_of_d, u_total, "IUF");
}

template <typename Scalar>
WeightedGraph<Scalar> weigh_edges(const BipartiteClickGraph& g, WeightModel model, const WeightOptions& options,
                                  unsigned threads) {
  using Vector = typename WeightedGraph<Scalar>::Vector;
  const double q_total = options.q_total.value_or(static_cast<double>(g.num_queries()));
  const double u_total = options.u_total.value_or(static_cast<double>(g.num_urls()));

  std::optional<Vector> global;
  if (auto kind = global_weight_kind(model)) {
    global = *kind == GlobalWeightKind::kIQF ? iqf<Scalar>(g.degree_profile(), q_total)
                                             : iuf<Scalar>(g.degree_profile(), u_total);
    if (options.global_weight_decimals) {
      for (auto& w : *global) w = static_cast<Scalar>(detail::round_to(static_cast<double>(w), *options.global_weight_decimals));
    }
  }

  auto values = g.uf_matrix<Scalar>();
  Scalar* out = values.valuePtr();
  parallel_for(g.num_queries(), threads, [&](std::size_t i) {
    const auto q = static_cast<QueryId>(i);
    const double row_sum = static_cast<double>(g.query_uf_sum(q));
    std::size_t k = g.row_offset(q);
    for (const auto& e : g.urls_of(q)) {
      const double uf = e.uf;
      double v = uf;
      switch (model) {
        case WeightModel::kUF:
          break;
        case WeightModel::kUFIQF:
          v = uf * static_cast<double>((*global)(e.target));
          break;
        case WeightModel::kUFWIQF:
        case WeightModel::kUFWIUF:
          v = static_cast<double>((*global)(e.target)) / std::log(std::numbers::e + row_sum / uf);
          break;
      }
      out[k++] = static_cast<Scalar>(v);
    }
  });

  return WeightedGraph<Scalar>(g, model, std::move(values), std::move(global), q_total, u_total);
}

}  // namespace clickgraph
