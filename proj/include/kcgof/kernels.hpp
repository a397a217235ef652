#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "kcgof/types.hpp"

namespace kcgof {

/// Squared Euclidean distance. Throws InputShapeError on a length mismatch.
double squared_distance(std::span<const double> a, std::span<const double> b);

namespace detail {

inline double squared_distance_unchecked(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t t = 0; t < d; ++t) {
    const double diff = a[t] - b[t];
    s += diff * diff;
  }
  return s;
}

}  // namespace detail

/// Isotropic Gaussian kernel exp(-|a-b|^2 / (2 sigma^2)).
class GaussKernel {
 public:
  /// Throws std::invalid_argument unless bandwidth is finite and > 0.
  explicit GaussKernel(double bandwidth);

  double bandwidth() const { return bandwidth_; }
  double inv_sq_bandwidth() const { return inv_sq_; }

  double eval(std::span<const double> a, std::span<const double> b) const;

  /// Gradient in the second argument: (y - y2) / sigma^2 * l(y, y2).
  Vector grad_second(std::span<const double> y, std::span<const double> y2) const;

  /// sum_i d^2 l / (dy_i dy2_i) = l(y, y2) * (d / sigma^2 - |y - y2|^2 / sigma^4).
  double cross_trace(std::span<const double> y, std::span<const double> y2) const;

  /// Kernel value from an already computed squared distance.
  double from_sq_dist(double sq_dist) const { return std::exp(-sq_dist / two_sq_); }

 private:
  double bandwidth_;
  double two_sq_;
  double inv_sq_;
};

/// Median of the pairwise distances over unordered pairs i < j (lower middle
/// element for an even count). Points are the rows of `points`. Above
/// `max_points` rows a seeded uniform subsample of that size is used.
/// Throws DegenerateDataError for fewer than two points or a zero median.
double median_heuristic(const Matrix& points, Index max_points = 5000,
                        std::uint64_t subsample_seed = 0);

}  // namespace kcgof
