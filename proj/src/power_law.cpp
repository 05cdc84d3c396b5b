#include "clickgraph/power_law.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "clickgraph/error.hpp"

namespace clickgraph {

std::vector<HistogramBin> degree_histogram(std::span<const std::uint32_t> values) {
  std::vector<std::uint32_t> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<HistogramBin> bins;
  for (std::uint32_t v : sorted) {
    if (bins.empty() || bins.back().value != v) {
      bins.push_back({v, 1});
    } else {
      ++bins.back().count;
    }
  }
  return bins;
}

double PowerLawFit::operator()(double x) const { return amplitude * std::pow(x, -exponent); }

PowerLawFit fit_power_law(std::span<const Point> points) {
  std::vector<Point> usable;
  usable.reserve(points.size());
  for (const auto& p : points) {
    if (p.x > 0 && p.y > 0 && std::isfinite(p.x) && std::isfinite(p.y)) usable.push_back(p);
  }
  if (usable.size() < 3) throw DegenerateFit("power-law fit needs at least 3 positive points");

  const auto n = static_cast<Eigen::Index>(usable.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd log_y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    design(k, 0) = 1.0;
    design(k, 1) = std::log(usable[k].x);
    log_y(k) = std::log(usable[k].y);
  }
  const Eigen::VectorXd log_x = design.col(1);
  if ((log_x.array() - log_x.mean()).square().sum() == 0.0) {
    throw DegenerateFit("power-law fit needs at least two distinct x values");
  }

  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(log_y);
  const Eigen::VectorXd residual = log_y - design * coef;
  const double ss_res = residual.squaredNorm();
  const double ss_tot = (log_y.array() - log_y.mean()).square().sum();

  PowerLawFit fit;
  fit.amplitude = std::exp(coef(0));
  fit.exponent = 0.0 - coef(1);
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.points_used = usable.size();
  return fit;
}

PowerLawFit fit_power_law(std::span<const HistogramBin> hist) {
  std::vector<Point> points;
  points.reserve(hist.size());
  for (const auto& b : hist) points.push_back({static_cast<double>(b.value), static_cast<double>(b.count)});
  return fit_power_law(points);
}

}  // namespace clickgraph
