#pragma once

#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "kcgof/rng.hpp"
#include "kcgof/types.hpp"

namespace kcgof {

/// y | x ~ N(coeffs . x + intercept, noise_var).
struct LinearGaussian {
  Vector coeffs;
  double intercept = 0.0;
  double noise_var = 1.0;
};

/// y | x ~ N(coeffs . x + intercept, base_var + bump_height * exp(-|x - c|^2 / (2 w^2)))
/// with c = bump_center and w = bump_width.
struct HeteroGaussian {
  Vector coeffs;
  double intercept = 0.0;
  double base_var = 1.0;
  double bump_height = 0.0;
  Vector bump_center;
  double bump_width = 1.0;
};

/// Scalar x and y: y | x ~ N(a x^2 + b x + c, noise_var).
struct QuadGaussian {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double noise_var = 1.0;
};

struct MixtureComponent {
  double weight = 1.0;
  Vector mean;
  Vector vars;  // diagonal covariance
};

/// y | x ~ sum_c weight_c N(mean_c, diag(vars_c)); parameters do not depend on x.
struct CondGaussMixture {
  std::vector<MixtureComponent> components;
};

enum class ModelKind { LinearGaussian, HeteroGaussian, QuadGaussian, CondGaussMixture };

std::string_view to_string(ModelKind kind);

/// A conditional density p(y|x) known through its score grad_y log p(y|x).
/// Immutable after construction; every constructor validates its parameters
/// and throws std::invalid_argument on a violation.
class ConditionalModel {
 public:
  using Params = std::variant<LinearGaussian, HeteroGaussian, QuadGaussian, CondGaussMixture>;

  explicit ConditionalModel(LinearGaussian params);
  explicit ConditionalModel(HeteroGaussian params);
  explicit ConditionalModel(QuadGaussian params);
  /// Mixture parameters carry no covariate dimension of their own.
  ConditionalModel(CondGaussMixture params, Index dx);

  ModelKind kind() const;
  Index dx() const { return dx_; }
  Index dy() const { return dy_; }
  const Params& params() const { return params_; }

  /// grad_y log p(y|x). Throws InputShapeError on dimension mismatch.
  Vector score(std::span<const double> x, std::span<const double> y) const;
  /// Unchecked variant writing dy values into `out`.
  void score_into(std::span<const double> x, std::span<const double> y, std::span<double> out) const;

  /// log p(y|x) including the normalizer.
  double log_density(std::span<const double> x, std::span<const double> y) const;

  /// One draw from p(.|x).
  Vector sample(std::span<const double> x, Rng& rng) const;

 private:
  void check_dims(std::span<const double> x, std::span<const double> y) const;

  Params params_;
  Index dx_ = 0;
  Index dy_ = 0;
};

}  // namespace kcgof
