#include "kcgof/kernels.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "kcgof/rng.hpp"

namespace kcgof {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputShapeError("squared_distance: dimension mismatch (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
  }
  return detail::squared_distance_unchecked(a.data(), b.data(), a.size());
}

GaussKernel::GaussKernel(double bandwidth) : bandwidth_(bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw std::invalid_argument("GaussKernel: bandwidth must be finite and positive, got " +
                                std::to_string(bandwidth));
  }
  two_sq_ = 2.0 * bandwidth * bandwidth;
  inv_sq_ = 1.0 / (bandwidth * bandwidth);
}

double GaussKernel::eval(std::span<const double> a, std::span<const double> b) const {
  return from_sq_dist(squared_distance(a, b));
}

Vector GaussKernel::grad_second(std::span<const double> y, std::span<const double> y2) const {
  const double l = eval(y, y2);
  Vector g(static_cast<Index>(y.size()));
  for (std::size_t t = 0; t < y.size(); ++t) g[static_cast<Index>(t)] = (y[t] - y2[t]) * inv_sq_ * l;
  return g;
}

double GaussKernel::cross_trace(std::span<const double> y, std::span<const double> y2) const {
  const double r2 = squared_distance(y, y2);
  const double d = static_cast<double>(y.size());
  return from_sq_dist(r2) * (d * inv_sq_ - r2 * inv_sq_ * inv_sq_);
}

double median_heuristic(const Matrix& points, Index max_points, std::uint64_t subsample_seed) {
  const Index n = points.rows();
  if (n < 2) throw DegenerateDataError("median_heuristic: need at least 2 points");

  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  if (max_points >= 2 && n > max_points) {
    Rng rng = make_rng(subsample_seed, 0x6d656469616eULL);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(static_cast<std::size_t>(max_points));
    std::sort(idx.begin(), idx.end());
  }

  const std::size_t m = idx.size();
  const std::size_t d = static_cast<std::size_t>(points.cols());
  std::vector<double> dists;
  dists.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = points.data() + idx[i] * points.cols();
    for (std::size_t j = i + 1; j < m; ++j) {
      const double* b = points.data() + idx[j] * points.cols();
      dists.push_back(std::sqrt(detail::squared_distance_unchecked(a, b, d)));
    }
  }
  const auto mid = dists.begin() + static_cast<std::ptrdiff_t>((dists.size() - 1) / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  if (!(*mid > 0.0)) {
    throw DegenerateDataError("median_heuristic: median pairwise distance is zero");
  }
  return *mid;
}

}  // namespace kcgof
