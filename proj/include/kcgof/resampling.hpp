#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kcgof/models.hpp"
#include "kcgof/rng.hpp"
#include "kcgof/stein.hpp"
#include "kcgof/types.hpp"

namespace kcgof {

inline constexpr int kDefaultBootstrapReps = 400;
inline constexpr int kDefaultPermutations = 400;

/// Outcome of one test. statistic and threshold share a scale: n times the
/// U-statistic for KCSD/FSCD, the unbiased MMD^2 for the MMD baseline.
struct TestResult {
  std::string method;
  double statistic = 0.0;
  double threshold = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.05;
  Index n_used = 0;
  int bootstrap_reps = 0;
  std::uint64_t seed = 0;
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  Index num_locations = 0;
  Matrix locations;  // empty unless the test used locations
  std::vector<std::string> notes;
};

/// How kernel bandwidths are chosen. Unset values use the median heuristic
/// (on xs for k, on ys for l).
struct BandwidthPolicy {
  std::optional<double> sigma_x;
  std::optional<double> sigma_y;

  static BandwidthPolicy median() { return {}; }
  static BandwidthPolicy fixed(double sx, double sy) { return {sx, sy}; }
};

/// Counts of n draws from Multinomial(n; 1/n, ..., 1/n).
std::vector<int> draw_multinomial_weights(Index n, Rng& rng);

/// n * sum_i sum_{j != i} wt_i wt_j h(i, j) with wt_i = (w_i - 1) / n.
/// Inner sums are pairwise in j of h(i, j) * wt_j; the outer sum is pairwise
/// in i of wt_i * inner_i. Throws InputShapeError unless the weights have
/// length n and sum to n.
double bootstrap_replicate(const GramH& gram, std::span<const int> weights);

/// `reps` replicates; replicate b uses its own generator stream derived from
/// (seed, b), so the vector is the same however the work is scheduled.
std::vector<double> bootstrap_replicates(const GramH& gram, int reps, std::uint64_t seed);

/// Order statistic at 1-based rank ceil((1 - alpha) m) of the replicates.
double bootstrap_threshold(std::span<const double> replicates, double alpha);

/// (1 + #{replicates >= statistic}) / (1 + m).
double monte_carlo_p_value(std::span<const double> replicates, double statistic);

/// Fills threshold, p_value and reject from the replicates.
void decide(TestResult& result, std::span<const double> replicates);

/// Resolves the bandwidth policy against a sample.
std::pair<double, double> resolve_bandwidths(const BandwidthPolicy& policy, const JointSample& sample);

TestResult run_kcsd_test(const ConditionalModel& model, const JointSample& sample, double alpha,
                         int bootstrap_reps, std::uint64_t seed,
                         const BandwidthPolicy& policy = BandwidthPolicy::median());

TestResult run_fscd_test(const ConditionalModel& model, const JointSample& sample,
                         const TestLocations& locations, double alpha, int bootstrap_reps,
                         std::uint64_t seed, const BandwidthPolicy& policy = BandwidthPolicy::median());

struct RandomLocations {
  TestLocations locations;
  Vector mean;
  Matrix covariance;
  bool jittered = false;
};

/// J draws from the maximum-likelihood Gaussian fit of xs (covariance with
/// denominator n). A covariance that fails Cholesky gets 1e-8 I added.
RandomLocations sample_random_locations(const JointSample& sample, Index J, std::uint64_t seed);

/// Two-sample MMD test on a split of the data: the first half (the extra
/// point when n is odd) against the second half's covariates paired with
/// fresh draws from the model. Product Gaussian kernel with median-heuristic
/// bandwidths on the pooled sample; permutation null. Requires n >= 8.
TestResult run_mmd_baseline(const ConditionalModel& model, const JointSample& sample, double alpha,
                            int permutations, std::uint64_t seed);

/// Unbiased MMD^2 of the pooled Gram matrix K with the first n1 points in
/// group one.
double unbiased_mmd2(const Matrix& pooled_gram, Index n1);

}  // namespace kcgof
