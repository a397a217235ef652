#include <algorithm>
#include <numeric>
#include <string>

#include "kcgof/kernels.hpp"
#include "kcgof/reduce.hpp"
#include "kcgof/resampling.hpp"

namespace kcgof {
namespace {

/// MMD^2 for the labelling where in_first[i] marks group one, given the
/// pooled gram and its off-diagonal row sums.
double labelled_mmd2(const Matrix& gram, std::span<const double> row_totals,
                     const std::vector<char>& in_first, Index n1) {
  const Index n = gram.rows();
  const Index n2 = n - n1;
  // to_first[i] = sum over group-one j != i of K(i, j).
  std::vector<double> to_first(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const auto r = row(gram, i);
    to_first[static_cast<std::size_t>(i)] = offdiag_sum(r, static_cast<std::size_t>(i), [&](std::size_t j) {
      return in_first[j] ? 1.0 : 0.0;
    });
  }
  double s11 = 0.0, s12 = 0.0, s22 = 0.0;
  for (Index i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (in_first[u]) {
      s11 += to_first[u];
    } else {
      s12 += to_first[u];
      s22 += row_totals[u] - to_first[u];
    }
  }
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  return s11 / (a * (a - 1.0)) + s22 / (b * (b - 1.0)) - 2.0 * s12 / (a * b);
}

}  // namespace

double unbiased_mmd2(const Matrix& pooled_gram, Index n1) {
  const Index n = pooled_gram.rows();
  if (n1 < 2 || n - n1 < 2) throw InputShapeError("unbiased_mmd2: each group needs at least 2 points");
  std::vector<double> totals(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) totals[static_cast<std::size_t>(i)] = offdiag_sum(row(pooled_gram, i), static_cast<std::size_t>(i));
  std::vector<char> first(static_cast<std::size_t>(n), 0);
  std::fill(first.begin(), first.begin() + n1, 1);
  return labelled_mmd2(pooled_gram, totals, first, n1);
}

TestResult run_mmd_baseline(const ConditionalModel& model, const JointSample& sample, double alpha,
                            int permutations, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (permutations < 1) throw std::invalid_argument("permutations must be positive");
  const Index n = sample.size();
  if (n < 8) throw InputShapeError("run_mmd_baseline: need n >= 8");
  if (model.dx() != sample.dx() || model.dy() != sample.dy()) {
    throw InputShapeError("run_mmd_baseline: sample dimensions do not match the model");
  }
  const Index n1 = n - n / 2;  // first half keeps the extra point
  const Index n2 = n / 2;

  // Pooled sample: first half as observed, second half with model responses.
  Matrix xs = sample.xs();
  Matrix ys = sample.ys();
  Rng model_rng = make_rng(seed, 0x6d6d64ULL);
  for (Index i = n1; i < n; ++i) ys.row(i) = model.sample(sample.x(i), model_rng).transpose();

  const double sx = median_heuristic(xs);
  const double sy = median_heuristic(ys);
  const GaussKernel kx(sx);
  const GaussKernel ky(sy);
  Matrix gram(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const double v = kx.eval(row(xs, i), row(xs, j)) * ky.eval(row(ys, i), row(ys, j));
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  std::vector<double> totals(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) totals[static_cast<std::size_t>(i)] = offdiag_sum(row(gram, i), static_cast<std::size_t>(i));

  std::vector<char> first(static_cast<std::size_t>(n), 0);
  std::fill(first.begin(), first.begin() + n1, 1);

  TestResult result;
  result.method = "mmd";
  result.alpha = alpha;
  result.seed = seed;
  result.n_used = n;
  result.sigma_x = sx;
  result.sigma_y = sy;
  result.statistic = labelled_mmd2(gram, totals, first, n1);
  result.notes.push_back("split " + std::to_string(n1) + "/" + std::to_string(n2));

  std::vector<double> null_stats(static_cast<std::size_t>(permutations));
#pragma omp parallel for schedule(dynamic, 4)
  for (int b = 0; b < permutations; ++b) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(b));
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<char> labels(static_cast<std::size_t>(n), 0);
    for (Index t = 0; t < n1; ++t) labels[static_cast<std::size_t>(perm[static_cast<std::size_t>(t)])] = 1;
    null_stats[static_cast<std::size_t>(b)] = labelled_mmd2(gram, totals, labels, n1);
  }
  decide(result, null_stats);
  return result;
}

}  // namespace kcgof
