#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kcgof/models.hpp"
#include "kcgof/stein.hpp"
#include "kcgof/types.hpp"

namespace kcgof {

enum class GradientMode { Analytic, FiniteDifference };

struct OptConfig {
  double train_fraction = 0.3;
  int steps = 200;
  double learning_rate = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  GradientMode gradient_mode = GradientMode::Analytic;
  double fd_step = 1e-4;  // relative: h = fd_step * max(1, |theta|)
  double regularizer = kDefaultRegularizer;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// Seeded uniform permutation, then the first floor(train_fraction * n)
/// rows go to training and the rest to test. Throws InputShapeError when
/// either part would have fewer than 2 rows.
std::pair<JointSample, JointSample> split(const JointSample& sample, double train_fraction,
                                          std::uint64_t seed);

/// Everything the power criterion is optimized over.
struct CriterionParams {
  Matrix vs;  // J x dx
  double log_sigma_x = 0.0;
  double log_sigma_y = 0.0;
};

struct CriterionGradient {
  Matrix d_vs;
  double d_log_sigma_x = 0.0;
  double d_log_sigma_y = 0.0;

  /// Flattened as [vs row-major..., log_sigma_x, log_sigma_y].
  Vector flat() const;
};

/// The FSCD power criterion on a fixed training sample as a function of
/// the test locations and both log-bandwidths. Response-space pieces of the
/// Stein kernel do not depend on the parameters and are computed once.
class PowerCriterionObjective {
 public:
  PowerCriterionObjective(const ConditionalModel& model, JointSample train,
                          double regularizer = kDefaultRegularizer);

  const JointSample& train() const { return train_; }

  /// Bitwise equal to power_criterion() at the same locations/bandwidths.
  double value(const CriterionParams& params) const;

  std::pair<double, CriterionGradient> value_and_gradient(const CriterionParams& params) const;

  /// Central differences with step fd_step * max(1, |theta|).
  CriterionGradient finite_difference_gradient(const CriterionParams& params, double fd_step) const;

 private:
  Matrix stein_matrix(double sigma_y) const;

  JointSample train_;
  Index dy_;
  double regularizer_;
  Matrix r2_;  // |y_i - y_j|^2
  Matrix ss_;  // s_i . s_j
  Matrix c_;   // (s_i - s_j) . (y_i - y_j)
};

/// Gradient of power_criterion with respect to every location coordinate
/// and the two log-bandwidths.
CriterionGradient criterion_gradient(const ConditionalModel& model, const GaussKernel& k,
                                     const GaussKernel& l, const TestLocations& locations,
                                     const JointSample& train, double regularizer, GradientMode mode,
                                     double fd_step = 1e-4);

struct OptimizationResult {
  TestLocations locations;
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  JointSample test_part;
  std::vector<double> trace;  // criterion before each step, then the final value
  bool init_jittered = false;
};

/// Splits the sample, initializes V by sample_random_locations on the
/// training part and both bandwidths by the median heuristic, then runs
/// `steps` Adam ascent steps on the training criterion. The test part is
/// returned untouched.
OptimizationResult optimize_fscd(const JointSample& sample, const ConditionalModel& model, Index J,
                                 const OptConfig& config);

}  // namespace kcgof
