#pragma once

// Serial loop-by-loop implementations of the estimators. They call h_p and
// GaussKernel::eval directly for every pair, never touch the cached score or
// feature matrices, and run no OpenMP. Sums follow the library's reduction
// tree (kPairwiseBlock) so results can be compared bit for bit.

#include <span>
#include <vector>

#include "kcgof/kernels.hpp"
#include "kcgof/models.hpp"
#include "kcgof/types.hpp"

namespace kcgof::reference {

double tree_sum(const std::vector<double>& terms);

Matrix gram_H(const ConditionalModel& model, const GaussKernel& k, const GaussKernel& l,
              const JointSample& sample);

double kcsd_estimate(const ConditionalModel& model, const GaussKernel& k, const GaussKernel& l,
                     const JointSample& sample);

double fscd_estimate(const ConditionalModel& model, const GaussKernel& k, const GaussKernel& l,
                     const Matrix& locations, const JointSample& sample);

struct Criterion {
  double statistic;
  double variance;
  double value;
};

Criterion power_criterion(const ConditionalModel& model, const GaussKernel& k, const GaussKernel& l,
                          const Matrix& locations, const JointSample& sample, double regularizer);

double bootstrap_replicate(const Matrix& gram, std::span<const int> weights);

/// Straight O(n^2) unbiased MMD^2 with plain sequential sums.
double unbiased_mmd2(const Matrix& pooled_gram, Index n1);

}  // namespace kcgof::reference
