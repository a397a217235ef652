#include "kcgof/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "kcgof/kernels.hpp"
#include "kcgof/reduce.hpp"

namespace kcgof {
namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

void check_reps(int reps) {
  if (reps < 1) throw std::invalid_argument("number of bootstrap replicates must be positive");
}

double replicate_unchecked(const GramH& gram, std::span<const int> weights, std::vector<double>& wt,
                           std::vector<double>& inner) {
  const std::size_t n = weights.size();
  const double nd = static_cast<double>(n);
  wt.resize(n);
  inner.resize(n);
  for (std::size_t i = 0; i < n; ++i) wt[i] = (static_cast<double>(weights[i]) - 1.0) / nd;
  const auto weight = [&](std::size_t j) { return wt[j]; };
  for (std::size_t i = 0; i < n; ++i) {
    // wt_i == 0 contributes an exact zero to the outer sum.
    inner[i] = wt[i] == 0.0 ? 0.0 : offdiag_sum(row(gram.h, static_cast<Index>(i)), i, weight);
  }
  const double total = pairwise_sum(n, [&](std::size_t i) { return wt[i] * inner[i]; });
  return nd * total;
}

}  // namespace

std::vector<int> draw_multinomial_weights(Index n, Rng& rng) {
  if (n < 1) throw InputShapeError("draw_multinomial_weights: n must be positive");
  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  for (Index t = 0; t < n; ++t) ++counts[static_cast<std::size_t>(pick(rng))];
  return counts;
}

double bootstrap_replicate(const GramH& gram, std::span<const int> weights) {
  const Index n = gram.size();
  if (static_cast<Index>(weights.size()) != n) {
    throw InputShapeError("bootstrap_replicate: " + std::to_string(weights.size()) +
                          " weights for a gram of size " + std::to_string(n));
  }
  const long long total = std::accumulate(weights.begin(), weights.end(), 0LL);
  if (total != n) {
    throw InputShapeError("bootstrap_replicate: weights sum to " + std::to_string(total) +
                          ", expected " + std::to_string(n));
  }
  std::vector<double> wt, inner;
  return replicate_unchecked(gram, weights, wt, inner);
}

std::vector<double> bootstrap_replicates(const GramH& gram, int reps, std::uint64_t seed) {
  check_reps(reps);
  const Index n = gram.size();
  std::vector<double> out(static_cast<std::size_t>(reps));
#pragma omp parallel
  {
    std::vector<double> wt, inner;
#pragma omp for schedule(dynamic, 4)
    for (int b = 0; b < reps; ++b) {
      Rng rng = make_rng(seed, static_cast<std::uint64_t>(b));
      const std::vector<int> w = draw_multinomial_weights(n, rng);
      out[static_cast<std::size_t>(b)] = replicate_unchecked(gram, w, wt, inner);
    }
  }
  return out;
}

double bootstrap_threshold(std::span<const double> replicates, double alpha) {
  check_alpha(alpha);
  if (replicates.empty()) throw std::invalid_argument("bootstrap_threshold: no replicates");
  std::vector<double> sorted(replicates.begin(), replicates.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * m - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

double monte_carlo_p_value(std::span<const double> replicates, double statistic) {
  const auto exceed = std::count_if(replicates.begin(), replicates.end(),
                                    [statistic](double r) { return r >= statistic; });
  return (1.0 + static_cast<double>(exceed)) / (1.0 + static_cast<double>(replicates.size()));
}

void decide(TestResult& result, std::span<const double> replicates) {
  result.threshold = bootstrap_threshold(replicates, result.alpha);
  result.p_value = monte_carlo_p_value(replicates, result.statistic);
  result.reject = result.statistic > result.threshold;
  result.bootstrap_reps = static_cast<int>(replicates.size());
}

std::pair<double, double> resolve_bandwidths(const BandwidthPolicy& policy, const JointSample& sample) {
  const double sx = policy.sigma_x ? *policy.sigma_x : median_heuristic(sample.xs());
  const double sy = policy.sigma_y ? *policy.sigma_y : median_heuristic(sample.ys());
  return {sx, sy};
}

TestResult run_kcsd_test(const ConditionalModel& model, const JointSample& sample, double alpha,
                         int bootstrap_reps, std::uint64_t seed, const BandwidthPolicy& policy) {
  check_alpha(alpha);
  check_reps(bootstrap_reps);
  if (sample.size() < 4) throw InputShapeError("run_kcsd_test: need n >= 4");
  const auto [sx, sy] = resolve_bandwidths(policy, sample);
  const GramH gram = gram_H(model, GaussKernel(sx), GaussKernel(sy), sample);

  TestResult result;
  result.method = "kcsd";
  result.alpha = alpha;
  result.seed = seed;
  result.n_used = sample.size();
  result.sigma_x = sx;
  result.sigma_y = sy;
  result.statistic = static_cast<double>(sample.size()) * kcsd_estimate(gram);
  decide(result, bootstrap_replicates(gram, bootstrap_reps, seed));
  return result;
}

TestResult run_fscd_test(const ConditionalModel& model, const JointSample& sample,
                         const TestLocations& locations, double alpha, int bootstrap_reps,
                         std::uint64_t seed, const BandwidthPolicy& policy) {
  check_alpha(alpha);
  check_reps(bootstrap_reps);
  if (sample.size() < 4) throw InputShapeError("run_fscd_test: need n >= 4");
  validate_locations(locations, sample.dx());
  const auto [sx, sy] = resolve_bandwidths(policy, sample);
  const GramH gram = fscd_gram(model, GaussKernel(sx), GaussKernel(sy), locations, sample);
  const double dy = static_cast<double>(sample.dy());

  TestResult result;
  result.method = "fscd";
  result.alpha = alpha;
  result.seed = seed;
  result.n_used = sample.size();
  result.sigma_x = sx;
  result.sigma_y = sy;
  result.num_locations = locations.count();
  result.locations = locations.vs;
  result.statistic = static_cast<double>(sample.size()) * (kcsd_estimate(gram) / dy);
  std::vector<double> reps = bootstrap_replicates(gram, bootstrap_reps, seed);
  for (double& r : reps) r /= dy;
  decide(result, reps);
  return result;
}

RandomLocations sample_random_locations(const JointSample& sample, Index J, std::uint64_t seed) {
  if (J < 1) throw std::invalid_argument("sample_random_locations: J must be positive");
  const Matrix& xs = sample.xs();
  const double n = static_cast<double>(xs.rows());
  RandomLocations out;
  out.mean = xs.colwise().sum().transpose() / n;
  const Matrix centered = xs.rowwise() - out.mean.transpose();
  out.covariance = (centered.transpose() * centered) / n;

  Eigen::LLT<Eigen::MatrixXd> llt(out.covariance);
  if (llt.info() != Eigen::Success) {
    out.jittered = true;
    llt.compute(out.covariance + 1e-8 * Eigen::MatrixXd::Identity(xs.cols(), xs.cols()));
    if (llt.info() != Eigen::Success) {
      throw DegenerateDataError("sample_random_locations: covariance not positive definite after jitter");
    }
  }
  const Eigen::MatrixXd L = llt.matrixL();

  Rng rng = make_rng(seed, 0x6c6f63ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  out.locations.vs.resize(J, xs.cols());
  Vector z(xs.cols());
  for (Index j = 0; j < J; ++j) {
    for (Index t = 0; t < z.size(); ++t) z[t] = normal(rng);
    out.locations.vs.row(j) = (out.mean + L * z).transpose();
  }
  return out;
}

}  // namespace kcgof
