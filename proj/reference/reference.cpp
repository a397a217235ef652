#include "reference.hpp"

#include <cmath>

#include "kcgof/reduce.hpp"
#include "kcgof/stein.hpp"

namespace kcgof::reference {
namespace {

double tree_sum_range(const std::vector<double>& terms, std::size_t lo, std::size_t hi) {
  if (hi - lo <= kPairwiseBlock) {
    double s = 0.0;
    for (std::size_t t = lo; t < hi; ++t) s += terms[t];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return tree_sum_range(terms, lo, mid) + tree_sum_range(terms, mid, hi);
}

double hp(const ConditionalModel& model, const GaussKernel& l, const JointSample& s, Index i, Index j) {
  return h_p(model, l, s.x(i), s.y(i), s.x(j), s.y(j));
}

double kbar(const GaussKernel& k, const Matrix& locations, std::span<const double> xi,
            std::span<const double> xj) {
  double acc = 0.0;
  for (Index v = 0; v < locations.rows(); ++v) {
    acc += k.eval(xi, row(locations, v)) * k.eval(xj, row(locations, v));
  }
  return acc / static_cast<double>(locations.rows());
}

/// Off-diagonal row sums of an arbitrary pair function.
template <typename Pair>
std::vector<double> row_sums(Index n, const Pair& pair) {
  std::vector<double> sums;
  for (Index i = 0; i < n; ++i) {
    std::vector<double> terms;
    for (Index j = 0; j < n; ++j) {
      if (j != i) terms.push_back(pair(i, j));
    }
    sums.push_back(tree_sum(terms));
  }
  return sums;
}

}  // namespace

double tree_sum(const std::vector<double>& terms) { return tree_sum_range(terms, 0, terms.size()); }

Matrix gram_H(const ConditionalModel& model, const GaussKernel& k, const GaussKernel& l,
              const JointSample& sample) {
  const Index n = sample.size();
  Matrix h(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) h(i, j) = k.eval(sample.x(i), sample.x(j)) * hp(model, l, sample, i, j);
  }
  return h;
}

double kcsd_estimate(const ConditionalModel& model, const GaussKernel& k, const GaussKernel& l,
                     const JointSample& sample) {
  const Index n = sample.size();
  const auto sums = row_sums(n, [&](Index i, Index j) {
    return k.eval(sample.x(i), sample.x(j)) * hp(model, l, sample, i, j);
  });
  return tree_sum(sums) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double fscd_estimate(const ConditionalModel& model, const GaussKernel& k, const GaussKernel& l,
                     const Matrix& locations, const JointSample& sample) {
  const Index n = sample.size();
  const auto sums = row_sums(n, [&](Index i, Index j) {
    return kbar(k, locations, sample.x(i), sample.x(j)) * hp(model, l, sample, i, j);
  });
  const double kcsd = tree_sum(sums) / (static_cast<double>(n) * static_cast<double>(n - 1));
  return kcsd / static_cast<double>(sample.dy());
}

Criterion power_criterion(const ConditionalModel& model, const GaussKernel& k, const GaussKernel& l,
                          const Matrix& locations, const JointSample& sample, double regularizer) {
  const Index n = sample.size();
  const double nd = static_cast<double>(n);
  const double dy = static_cast<double>(sample.dy());
  const auto sums = row_sums(n, [&](Index i, Index j) {
    return kbar(k, locations, sample.x(i), sample.x(j)) * hp(model, l, sample, i, j);
  });
  Criterion c{};
  c.statistic = tree_sum(sums) / (nd * (nd - 1.0)) / dy;
  std::vector<double> g;
  for (double s : sums) g.push_back(s / (nd - 1.0) / dy);
  const double mean = tree_sum(g) / nd;
  std::vector<double> sq;
  for (double gi : g) sq.push_back((gi - mean) * (gi - mean));
  c.variance = tree_sum(sq) / (nd - 1.0);
  c.value = c.statistic / std::sqrt(4.0 * c.variance + regularizer);
  return c;
}

double bootstrap_replicate(const Matrix& gram, std::span<const int> weights) {
  const Index n = gram.rows();
  const double nd = static_cast<double>(n);
  std::vector<double> wt;
  for (int w : weights) wt.push_back((static_cast<double>(w) - 1.0) / nd);
  std::vector<double> outer;
  for (Index i = 0; i < n; ++i) {
    std::vector<double> terms;
    for (Index j = 0; j < n; ++j) {
      if (j != i) terms.push_back(gram(i, j) * wt[static_cast<std::size_t>(j)]);
    }
    outer.push_back(wt[static_cast<std::size_t>(i)] * tree_sum(terms));
  }
  return nd * tree_sum(outer);
}

double unbiased_mmd2(const Matrix& K, Index n1) {
  const Index n = K.rows();
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n - n1);
  double s11 = 0.0, s22 = 0.0, s12 = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      if (i < n1 && j < n1) s11 += K(i, j);
      else if (i >= n1 && j >= n1) s22 += K(i, j);
      else if (i < n1) s12 += K(i, j);
    }
  }
  return s11 / (a * (a - 1.0)) + s22 / (b * (b - 1.0)) - 2.0 * s12 / (a * b);
}

}  // namespace kcgof::reference
