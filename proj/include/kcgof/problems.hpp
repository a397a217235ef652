#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kcgof/models.hpp"
#include "kcgof/types.hpp"

namespace kcgof {

/// Covariate law r_x: iid coordinates, either N(a, b^2) or Uniform on the
/// open interval (a, b).
struct CovariateLaw {
  enum class Kind { Normal, Uniform };
  Kind kind = Kind::Normal;
  Index dim = 1;
  double a = 0.0;
  double b = 1.0;

  Vector draw(Rng& rng) const;
};

/// A null model p together with the law r_xy that generates the data.
struct ProblemSpec {
  std::string name;
  ConditionalModel model;       // p
  ConditionalModel data_model;  // r(y|x)
  CovariateLaw covariate_law;   // r_x
  bool h0_true = false;

  /// n pairs; point i draws x_i then y_i from one generator seeded by `seed`.
  JointSample draw(Index n, std::uint64_t seed) const;
};

/// Known problem names:
///   lgm, hgm, qgm    the rejection-rate benchmarks
///   shift1d          p = N(x/2, 1), r = N(x, 1), x ~ N(0, 1)
///   hgm1d            p = N(x, 1 + 8 exp(-(x-1)^2 / (2 * 0.3^2))), r = N(x, 1), x ~ N(0, 1)
///   qgm-gauss        p = N(x + 0.5x^2 - 1, 1), r = N(x + 0.4x^2 - 1, 1), x ~ N(2, 1)
///   qgm-unif         as qgm-gauss with x ~ Uniform(2, 3)
/// Throws std::invalid_argument for anything else.
ProblemSpec problem_by_name(const std::string& name);

std::vector<std::string> problem_names();

/// The named problem and a seeded draw of n >= 4 pairs from it.
std::pair<ProblemSpec, JointSample> make_problem(const std::string& name, Index n, std::uint64_t seed);

}  // namespace kcgof
