#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kcgof/harness.hpp"
#include "kcgof/problems.hpp"
#include "kcgof/resampling.hpp"
#include "oracles.hpp"
#include "reference.hpp"

using namespace kcgof;

namespace {

GramH random_gram(Rng& rng, Index n) {
  const Matrix a = kcgof::testing::gaussian_matrix(rng, n, n);
  return GramH{a + a.transpose(), true};
}

bool same_result(const TestResult& a, const TestResult& b) {
  return a.method == b.method && a.statistic == b.statistic && a.threshold == b.threshold &&
         a.p_value == b.p_value && a.reject == b.reject && a.sigma_x == b.sigma_x && a.sigma_y == b.sigma_y &&
         a.locations == b.locations && a.notes == b.notes;
}

}  // namespace

TEST(BootstrapReplicate, UnitWeightsGiveZero) {
  Rng rng(51);
  const GramH g = random_gram(rng, 7);
  const std::vector<int> ones(7, 1);
  EXPECT_EQ(bootstrap_replicate(g, ones), 0.0);
}

TEST(BootstrapReplicate, WeightsAreCentred) {
  Rng rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 2 + trial % 50;
    const std::vector<int> w = draw_multinomial_weights(n, rng);
    ASSERT_EQ(static_cast<Index>(w.size()), n);
    EXPECT_EQ(std::accumulate(w.begin(), w.end(), 0), n);
    double centred = 0.0;
    for (int wi : w) centred += (wi - 1.0) / static_cast<double>(n);
    EXPECT_NEAR(centred, 0.0, 1e-12);
  }
}

TEST(BootstrapReplicate, MatchesReferenceExactly) {
  Rng rng(53);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 2 + trial % 7;
    const GramH g = random_gram(rng, n);
    const std::vector<int> w = draw_multinomial_weights(n, rng);
    EXPECT_EQ(bootstrap_replicate(g, w), reference::bootstrap_replicate(g.h, w));
  }
  const GramH big = random_gram(rng, 200);
  const std::vector<int> w = draw_multinomial_weights(200, rng);
  EXPECT_EQ(bootstrap_replicate(big, w), reference::bootstrap_replicate(big.h, w));
}

TEST(BootstrapReplicate, NaiveDoubleLoop) {
  Rng rng(54);
  const GramH g = random_gram(rng, 5);
  const std::vector<int> w{2, 0, 1, 0, 2};
  double want = 0.0;
  for (Index i = 0; i < 5; ++i) {
    for (Index j = 0; j < 5; ++j) {
      if (i != j) want += (w[i] - 1.0) / 5.0 * (w[j] - 1.0) / 5.0 * g.h(i, j);
    }
  }
  EXPECT_NEAR(bootstrap_replicate(g, w), 5.0 * want, 1e-12);
}

TEST(BootstrapReplicate, RejectsBadWeights) {
  Rng rng(55);
  const GramH g = random_gram(rng, 4);
  EXPECT_THROW(bootstrap_replicate(g, std::vector<int>{1, 1, 1}), InputShapeError);
  EXPECT_THROW(bootstrap_replicate(g, std::vector<int>{1, 1, 1, 2}), InputShapeError);
}

TEST(BootstrapReplicates, ReproducibleAndCentredUnderNull) {
  const auto [problem, sample] = make_problem("lgm", 200, 5);
  const GaussKernel k(median_heuristic(sample.xs())), l(median_heuristic(sample.ys()));
  const GramH g = gram_H(problem.model, k, l, sample);
  const std::vector<double> a = bootstrap_replicates(g, 500, 9);
  EXPECT_EQ(a, bootstrap_replicates(g, 500, 9));
  EXPECT_NE(a, bootstrap_replicates(g, 500, 10));
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / 500.0;
  double var = 0.0;
  for (double v : a) var += (v - mean) * (v - mean) / 499.0;
  EXPECT_LE(std::abs(mean), 4.0 * std::sqrt(var / 500.0));
}

TEST(Threshold, OrderStatisticAndMonotone) {
  std::vector<double> reps(100);
  std::iota(reps.begin(), reps.end(), 1.0);
  std::reverse(reps.begin(), reps.end());
  EXPECT_EQ(bootstrap_threshold(reps, 0.05), 95.0);
  EXPECT_EQ(bootstrap_threshold(reps, 0.10), 90.0);
  EXPECT_EQ(bootstrap_threshold(reps, 0.999), 1.0);

  Rng rng(56);
  std::normal_distribution<double> normal;
  std::vector<double> noisy(401);
  for (auto& v : noisy) v = normal(rng);
  double last = bootstrap_threshold(noisy, 0.001);
  for (double alpha = 0.01; alpha < 1.0; alpha += 0.01) {
    const double t = bootstrap_threshold(noisy, alpha);
    EXPECT_LE(t, last);
    last = t;
  }
  EXPECT_THROW(bootstrap_threshold(noisy, 0.0), std::invalid_argument);
  EXPECT_THROW(bootstrap_threshold(noisy, 1.0), std::invalid_argument);
}

TEST(PValue, PlusOneCorrection) {
  const std::vector<double> reps{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(monte_carlo_p_value(reps, 10.0), 1.0 / 5.0);
  EXPECT_DOUBLE_EQ(monte_carlo_p_value(reps, 3.0), 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(monte_carlo_p_value(reps, -1.0), 1.0);
}

TEST(KcsdTest, DeterministicAndConsistent) {
  const auto [problem, sample] = make_problem("qgm", 300, 8);
  const TestResult a = run_kcsd_test(problem.model, sample, 0.05, 200, 77);
  const TestResult b = run_kcsd_test(problem.model, sample, 0.05, 200, 77);
  EXPECT_TRUE(same_result(a, b));
  EXPECT_EQ(a.reject, a.statistic > a.threshold);
  EXPECT_GT(a.p_value, 0.0);
  EXPECT_LE(a.p_value, 1.0);
  EXPECT_EQ(a.n_used, 300);
  EXPECT_EQ(a.bootstrap_reps, 200);
  const GaussKernel k(a.sigma_x), l(a.sigma_y);
  EXPECT_EQ(a.statistic, 300.0 * kcsd_estimate(gram_H(problem.model, k, l, sample)));
}

TEST(KcsdTest, RejectsTinySamples) {
  const auto [problem, sample] = make_problem("lgm", 4, 8);
  EXPECT_THROW(run_kcsd_test(problem.model, sample.select(std::vector<Index>{0, 1, 2}), 0.05, 10, 1),
               InputShapeError);
}

TEST(FscdTest, FarLocationsAccept) {
  const auto [problem, sample] = make_problem("hgm", 300, 9);
  const TestLocations far{Matrix::Constant(2, 3, 1e3)};
  const TestResult r = run_fscd_test(problem.model, sample, far, 0.05, 100, 4);
  EXPECT_NEAR(r.statistic, 0.0, 1e-300);
  EXPECT_FALSE(r.reject);
  EXPECT_TRUE(same_result(r, run_fscd_test(problem.model, sample, far, 0.05, 100, 4)));
}

TEST(FscdTest, StatisticScale) {
  const auto [problem, sample] = make_problem("hgm", 120, 10);
  const RandomLocations v = sample_random_locations(sample, 3, 5);
  const TestResult r = run_fscd_test(problem.model, sample, v.locations, 0.05, 50, 4);
  const GaussKernel k(r.sigma_x), l(r.sigma_y);
  EXPECT_EQ(r.statistic, 120.0 * fscd_estimate(problem.model, k, l, v.locations, sample));
  EXPECT_EQ(r.num_locations, 3);
  EXPECT_EQ(r.locations, v.locations.vs);
}

TEST(RandomLocations, Examples) {
  const auto [problem, sample] = make_problem("lgm", 50, 11);
  const RandomLocations a = sample_random_locations(sample, 4, 3);
  const Vector col_mean = sample.xs().colwise().sum().transpose() / 50.0;
  EXPECT_LE((a.mean - col_mean).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(a.locations.vs, sample_random_locations(sample, 4, 3).locations.vs);
  EXPECT_EQ(a.locations.count(), 4);
  EXPECT_FALSE(a.jittered);

  const Matrix centred = sample.xs().rowwise() - sample.xs().colwise().mean();
  const Matrix mle = centred.transpose() * centred / 50.0;
  EXPECT_LE((a.covariance - mle).cwiseAbs().maxCoeff(), 1e-12);

  const JointSample flat(Matrix::Constant(10, 2, 3.0), sample.ys().topRows(10));
  const RandomLocations b = sample_random_locations(flat, 5, 1);
  EXPECT_TRUE(b.jittered);
  EXPECT_LE((b.locations.vs.array() - 3.0).abs().maxCoeff(), 1e-3);
}

TEST(Mmd, UnbiasedMatchesReference) {
  Rng rng(57);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 4 + trial % 6;
    const Matrix a = kcgof::testing::gaussian_matrix(rng, n, n);
    const Matrix K = a + a.transpose();
    const Index n1 = 2 + trial % (n - 3);
    EXPECT_NEAR(unbiased_mmd2(K, n1), reference::unbiased_mmd2(K, n1), 1e-12 * (1.0 + K.cwiseAbs().sum()));
  }
}

TEST(Mmd, SplitCoversSample) {
  const auto [problem, even] = make_problem("lgm", 40, 12);
  const TestResult r = run_mmd_baseline(problem.model, even, 0.05, 50, 3);
  ASSERT_FALSE(r.notes.empty());
  EXPECT_EQ(r.notes.front(), "split 20/20");
  EXPECT_EQ(r.n_used, 40);
  const auto [p2, odd] = make_problem("lgm", 41, 12);
  EXPECT_EQ(run_mmd_baseline(p2.model, odd, 0.05, 50, 3).notes.front(), "split 21/20");
  EXPECT_THROW(run_mmd_baseline(problem.model, even.select(std::vector<Index>{0, 1, 2, 3, 4, 5, 6}), 0.05, 10, 1),
               InputShapeError);
  const TestResult again = run_mmd_baseline(problem.model, even, 0.05, 50, 3);
  EXPECT_TRUE(same_result(r, again));
}

TEST(Level, LgmFalseRejectionsWithinBinomialBand) {
  // 0.5% and 99.5% quantiles of Binomial(300, 0.05)
  const ProblemSpec lgm = problem_by_name("lgm");
  TestConfig kcsd;
  const RatePoint r = rejection_rate(lgm, kcsd, 300, 300, 0.05, 2024);
  EXPECT_GE(r.rejections, 6);
  EXPECT_LE(r.rejections, 25);
}
