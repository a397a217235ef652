#include "kcgof/problems.hpp"

#include <stdexcept>

namespace kcgof {

Vector CovariateLaw::draw(Rng& rng) const {
  Vector x(dim);
  if (kind == Kind::Normal) {
    std::normal_distribution<double> normal(a, b);
    for (Index t = 0; t < dim; ++t) x[t] = normal(rng);
  } else {
    // uniform_real_distribution is [a, b); the open interval also drops a.
    std::uniform_real_distribution<double> unif(a, b);
    for (Index t = 0; t < dim; ++t) {
      double u = unif(rng);
      while (!(u > a && u < b)) u = unif(rng);
      x[t] = u;
    }
  }
  return x;
}

JointSample ProblemSpec::draw(Index n, std::uint64_t seed) const {
  Rng rng(seed);
  Matrix xs(n, data_model.dx());
  Matrix ys(n, data_model.dy());
  for (Index i = 0; i < n; ++i) {
    const Vector x = covariate_law.draw(rng);
    xs.row(i) = x.transpose();
    ys.row(i) = data_model.sample(as_span(x), rng).transpose();
  }
  return JointSample(std::move(xs), std::move(ys));
}

namespace {

Vector filled(Index n, double v) { return Vector::Constant(n, v); }

ConditionalModel linear(Vector coeffs, double intercept) {
  return ConditionalModel(LinearGaussian{std::move(coeffs), intercept, 1.0});
}

}  // namespace

ProblemSpec problem_by_name(const std::string& name) {
  const CovariateLaw std_normal1{CovariateLaw::Kind::Normal, 1, 0.0, 1.0};
  if (name == "lgm") {
    Vector coeffs(5);
    coeffs << 1, 2, 3, 4, 5;
    auto p = linear(coeffs, 0.0);
    return {name, p, p, {CovariateLaw::Kind::Normal, 5, 0.0, 1.0}, true};
  }
  if (name == "hgm") {
    HeteroGaussian het{filled(3, 1.0), 0.0, 1.0, 10.0, filled(3, 2.0 / 3.0), 0.8};
    return {name, ConditionalModel(het), linear(filled(3, 1.0), 0.0),
            {CovariateLaw::Kind::Normal, 3, 0.0, 1.0}, false};
  }
  if (name == "qgm") {
    return {name, linear(filled(1, 1.0), 1.0), ConditionalModel(QuadGaussian{0.1, 1.0, 1.0, 1.0}),
            {CovariateLaw::Kind::Uniform, 1, -2.0, 2.0}, false};
  }
  if (name == "shift1d") {
    return {name, linear(filled(1, 0.5), 0.0), linear(filled(1, 1.0), 0.0), std_normal1, false};
  }
  if (name == "hgm1d") {
    HeteroGaussian het{filled(1, 1.0), 0.0, 1.0, 8.0, filled(1, 1.0), 0.3};
    return {name, ConditionalModel(het), linear(filled(1, 1.0), 0.0), std_normal1, false};
  }
  if (name == "qgm-gauss" || name == "qgm-unif") {
    const CovariateLaw law = name == "qgm-gauss" ? CovariateLaw{CovariateLaw::Kind::Normal, 1, 2.0, 1.0}
                                                 : CovariateLaw{CovariateLaw::Kind::Uniform, 1, 2.0, 3.0};
    return {name, ConditionalModel(QuadGaussian{0.5, 1.0, -1.0, 1.0}),
            ConditionalModel(QuadGaussian{0.4, 1.0, -1.0, 1.0}), law, false};
  }
  throw std::invalid_argument("unknown problem '" + name + "'");
}

std::vector<std::string> problem_names() {
  return {"lgm", "hgm", "qgm", "shift1d", "hgm1d", "qgm-gauss", "qgm-unif"};
}

std::pair<ProblemSpec, JointSample> make_problem(const std::string& name, Index n, std::uint64_t seed) {
  if (n < 4) throw std::invalid_argument("make_problem: n must be at least 4");
  ProblemSpec spec = problem_by_name(name);
  JointSample sample = spec.draw(n, seed);
  return {std::move(spec), std::move(sample)};
}

}  // namespace kcgof
