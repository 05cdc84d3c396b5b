#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace clickgraph {

struct HistogramBin {
  std::uint64_t value;  // x: the degree value
  std::uint64_t count;  // y: how many URLs have it

  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

/// Bins sorted by strictly increasing value; counts sum to values.size().
std::vector<HistogramBin> degree_histogram(std::span<const std::uint32_t> values);

struct Point {
  double x;
  double y;
};

/// y = amplitude * x^(-exponent), fitted by least squares on ln y vs ln x.
struct PowerLawFit {
  double amplitude;
  double exponent;
  double r_squared;
  std::size_t points_used;

  double operator()(double x) const;
};

/// Points with x <= 0 or y <= 0 are ignored. Throws DegenerateFit with fewer
/// than three usable points or when every usable x is the same.
PowerLawFit fit_power_law(std::span<const Point> points);
PowerLawFit fit_power_law(std::span<const HistogramBin> hist);

}  // namespace clickgraph
