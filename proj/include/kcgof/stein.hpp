#pragma once

#include <span>
#include <vector>

#include "kcgof/kernels.hpp"
#include "kcgof/models.hpp"
#include "kcgof/types.hpp"

namespace kcgof {

namespace detail {

/// The Stein kernel h_p assembled from the response-space pieces
/// r2 = |y - y2|^2, ss = s . s2 and c = (s - s2) . (y - y2), with lval the
/// kernel value l(y, y2). The two gradient terms are folded into one, and
/// swapping the two points yields the same bits.
inline double stein_from_parts(double lval, double r2, double ss, double c, double dy, double inv_sq) {
  const double trace = lval * (dy * inv_sq - r2 * inv_sq * inv_sq);
  return lval * ss + trace + lval * inv_sq * c;
}

struct SteinParts {
  double r2 = 0.0;
  double ss = 0.0;
  double c = 0.0;
};

inline SteinParts stein_parts(const double* y1, const double* s1, const double* y2, const double* s2,
                              std::size_t dy) {
  SteinParts p;
  for (std::size_t t = 0; t < dy; ++t) {
    const double diff = y1[t] - y2[t];
    p.r2 += diff * diff;
    p.ss += s1[t] * s2[t];
    p.c += (s1[t] - s2[t]) * diff;
  }
  return p;
}

inline double stein_kernel(const GaussKernel& l, const double* y1, const double* s1, const double* y2,
                           const double* s2, std::size_t dy) {
  const SteinParts p = stein_parts(y1, s1, y2, s2, dy);
  return stein_from_parts(l.from_sq_dist(p.r2), p.r2, p.ss, p.c, static_cast<double>(dy),
                          l.inv_sq_bandwidth());
}

}  // namespace detail

/// h_p((x, y), (x2, y2)) = l(y,y2) s(y|x).s(y2|x2) + sum_i d^2 l/dy_i dy2_i
///                       + s(y|x).grad_y2 l + s(y2|x2).grad_y l.
double h_p(const ConditionalModel& model, const GaussKernel& l, std::span<const double> x1,
           std::span<const double> y1, std::span<const double> x2, std::span<const double> y2);

/// n x dy matrix of scores s_p(y_i | x_i).
Matrix score_matrix(const ConditionalModel& model, const JointSample& sample);

/// n x n symmetric matrix of h_p(z_i, z_j), diagonal included.
Matrix stein_gram(const ConditionalModel& model, const GaussKernel& l, const JointSample& sample);

/// n x n matrix of U-statistic kernel values. diag_valid reports whether the
/// diagonal holds the kernel at coincident points (estimators ignore it).
struct GramH {
  Matrix h;
  bool diag_valid = true;

  Index size() const { return h.rows(); }
};

/// H_p(z_i, z_j) = k(x_i, x_j) h_p(z_i, z_j).
GramH gram_H(const ConditionalModel& model, const GaussKernel& k, const GaussKernel& l,
             const JointSample& sample);

/// Elementwise k(x_i, x_j) * stein(i, j).
GramH gram_H_from_stein(const Matrix& stein, const GaussKernel& k, const Matrix& xs);

/// n x J matrix of k(x_i, v_j).
Matrix location_features(const GaussKernel& k, const Matrix& xs, const TestLocations& locations);

/// Elementwise kbar_V(x_i, x_j) * stein(i, j) with
/// kbar_V(x, x') = (1/J) sum_j k(x, v_j) k(x', v_j). The 1/dy factor of the
/// FSCD kernel is not applied here.
GramH kbar_gram(const Matrix& stein, const Matrix& features);

GramH fscd_gram(const ConditionalModel& model, const GaussKernel& k, const GaussKernel& l,
                const TestLocations& locations, const JointSample& sample);

/// sum_{j != i} h(i, j) for every row, each a pairwise sum in increasing j.
std::vector<double> offdiag_row_sums(const GramH& gram);

/// (1 / (n (n-1))) sum_{i != j} h(i, j). Throws InputShapeError for n < 2.
double kcsd_estimate(const GramH& gram);

/// The KCSD estimator on the kbar_V gram, divided by dy.
double fscd_estimate(const ConditionalModel& model, const GaussKernel& k, const GaussKernel& l,
                     const TestLocations& locations, const JointSample& sample);

inline constexpr double kDefaultRegularizer = 1e-6;

struct PowerCriterion {
  double statistic = 0.0;  // FSCD estimate
  double variance = 0.0;   // sample variance of the row projections g_i
  double sigma = 0.0;      // sqrt(4 variance + regularizer)
  double value = 0.0;      // statistic / sigma
};

/// Power criterion from a kbar_gram (unscaled by 1/dy). Throws
/// DegenerateDataError when sigma is zero and InputShapeError for n < 4.
PowerCriterion power_criterion_from_gram(const GramH& kbar, Index dy, double regularizer);

double power_criterion(const ConditionalModel& model, const GaussKernel& k, const GaussKernel& l,
                       const TestLocations& locations, const JointSample& sample,
                       double regularizer = kDefaultRegularizer);

}  // namespace kcgof
