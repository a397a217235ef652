#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace kcgof::testing {

Matrix gaussian_matrix(Rng& rng, Index rows, Index cols, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

JointSample random_sample(Rng& rng, Index n, Index dx, Index dy) {
  Matrix xs = gaussian_matrix(rng, n, dx);
  Matrix ys = gaussian_matrix(rng, n, dy);
  return JointSample(std::move(xs), std::move(ys));
}

ConditionalModel random_model(Rng& rng, Index dx, Index dy) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.5, 2.0);
  if (dy == 1) {
    const auto pick = std::uniform_int_distribution<int>(0, dx == 1 ? 2 : 1)(rng);
    if (pick == 0) {
      LinearGaussian p;
      p.coeffs = Vector(dx);
      for (Index t = 0; t < dx; ++t) p.coeffs[t] = normal(rng);
      p.intercept = normal(rng);
      p.noise_var = unit(rng);
      return ConditionalModel(p);
    }
    if (pick == 1) {
      HeteroGaussian p;
      p.coeffs = Vector(dx);
      p.bump_center = Vector(dx);
      for (Index t = 0; t < dx; ++t) {
        p.coeffs[t] = normal(rng);
        p.bump_center[t] = normal(rng);
      }
      p.base_var = unit(rng);
      p.bump_height = 3.0 * unit(rng);
      p.bump_width = unit(rng);
      return ConditionalModel(p);
    }
    return ConditionalModel(QuadGaussian{0.3 * normal(rng), normal(rng), normal(rng), unit(rng)});
  }
  CondGaussMixture mix;
  const double w = std::uniform_real_distribution<double>(0.2, 0.8)(rng);
  for (double weight : {w, 1.0 - w}) {
    MixtureComponent c;
    c.weight = weight;
    c.mean = Vector(dy);
    c.vars = Vector(dy);
    for (Index t = 0; t < dy; ++t) {
      c.mean[t] = normal(rng);
      c.vars[t] = unit(rng);
    }
    mix.components.push_back(c);
  }
  return ConditionalModel(mix, dx);
}

std::vector<ConditionalModel> builtin_models() {
  std::vector<ConditionalModel> out;
  out.emplace_back(LinearGaussian{Vector::LinSpaced(5, 1.0, 5.0), 0.0, 1.0});
  HeteroGaussian h;
  h.coeffs = Vector::Ones(3);
  h.base_var = 1.0;
  h.bump_height = 10.0;
  h.bump_center = Vector::Constant(3, 2.0 / 3.0);
  h.bump_width = 0.8;
  out.emplace_back(h);
  out.emplace_back(QuadGaussian{0.1, 1.0, 1.0, 1.0});
  CondGaussMixture mix;
  mix.components.push_back({0.3, Vector::Constant(2, -1.0), Vector::Constant(2, 0.5)});
  mix.components.push_back({0.7, Vector::Constant(2, 1.5), Vector::Constant(2, 2.0)});
  out.emplace_back(mix, 2);
  return out;
}

Vector stein_xi(const ConditionalModel& model, const GaussKernel& l, std::span<const double> x,
                std::span<const double> y, std::span<const double> w) {
  return model.score(x, y) * l.eval(y, w) + l.grad_second(w, y);
}

double central_difference(const std::function<double(std::span<const double>)>& f,
                          std::span<const double> point, std::size_t t, double step) {
  std::vector<double> plus(point.begin(), point.end());
  std::vector<double> minus = plus;
  plus[t] += step;
  minus[t] -= step;
  return (f(plus) - f(minus)) / (2.0 * step);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    const double fa = static_cast<double>(i) / static_cast<double>(a.size());
    const double fb = static_cast<double>(j) / static_cast<double>(b.size());
    best = std::max(best, std::abs(fa - fb));
  }
  return best;
}

double relative_error(double got, double want, double floor) {
  return std::abs(got - want) / std::max(std::abs(want), floor);
}

}  // namespace kcgof::testing
