#include "kcgof/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "kcgof/kernels.hpp"
#include "kcgof/reduce.hpp"
#include "kcgof/resampling.hpp"
#include "kcgof/rng.hpp"

namespace kcgof {

void OptConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("OptConfig: train_fraction must lie in (0, 1)");
  }
  if (steps < 0) throw std::invalid_argument("OptConfig: steps must be nonnegative");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("OptConfig: learning_rate must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw std::invalid_argument("OptConfig: Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw std::invalid_argument("OptConfig: adam_eps must be positive");
  if (!(fd_step > 0.0)) throw std::invalid_argument("OptConfig: fd_step must be positive");
  if (!(regularizer >= 0.0)) throw std::invalid_argument("OptConfig: regularizer must be nonnegative");
}

std::pair<JointSample, JointSample> split(const JointSample& sample, double train_fraction,
                                          std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("split: train_fraction must lie in (0, 1)");
  }
  const Index n = sample.size();
  const auto n_train = static_cast<Index>(std::floor(train_fraction * static_cast<double>(n)));
  if (n_train < 2 || n - n_train < 2) {
    throw InputShapeError("split: sample of " + std::to_string(n) + " rows is too small for fraction " +
                          std::to_string(train_fraction));
  }
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng = make_rng(seed, 0x73706c6974ULL);
  std::shuffle(perm.begin(), perm.end(), rng);
  const std::span<const Index> all(perm);
  return {sample.select(all.first(static_cast<std::size_t>(n_train))),
          sample.select(all.subspan(static_cast<std::size_t>(n_train)))};
}

Vector CriterionGradient::flat() const {
  Vector out(d_vs.size() + 2);
  std::copy(d_vs.data(), d_vs.data() + d_vs.size(), out.data());
  out[d_vs.size()] = d_log_sigma_x;
  out[d_vs.size() + 1] = d_log_sigma_y;
  return out;
}

namespace {

Vector flatten(const CriterionParams& p) {
  Vector out(p.vs.size() + 2);
  std::copy(p.vs.data(), p.vs.data() + p.vs.size(), out.data());
  out[p.vs.size()] = p.log_sigma_x;
  out[p.vs.size() + 1] = p.log_sigma_y;
  return out;
}

CriterionParams unflatten(const Vector& theta, Index J, Index dx) {
  CriterionParams p;
  p.vs.resize(J, dx);
  std::copy(theta.data(), theta.data() + J * dx, p.vs.data());
  p.log_sigma_x = theta[J * dx];
  p.log_sigma_y = theta[J * dx + 1];
  return p;
}

CriterionGradient unflatten_gradient(const Vector& g, Index J, Index dx) {
  const CriterionParams p = unflatten(g, J, dx);
  return {p.vs, p.log_sigma_x, p.log_sigma_y};
}

}  // namespace

PowerCriterionObjective::PowerCriterionObjective(const ConditionalModel& model, JointSample train,
                                                 double regularizer)
    : train_(std::move(train)), dy_(train_.dy()), regularizer_(regularizer) {
  if (train_.size() < 4) throw InputShapeError("PowerCriterionObjective: need at least 4 rows");
  const Matrix scores = score_matrix(model, train_);
  const Index n = train_.size();
  const auto dy = static_cast<std::size_t>(dy_);
  r2_.resize(n, n);
  ss_.resize(n, n);
  c_.resize(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const detail::SteinParts p = detail::stein_parts(train_.y(i).data(), scores.data() + i * dy_,
                                                       train_.y(j).data(), scores.data() + j * dy_, dy);
      r2_(i, j) = r2_(j, i) = p.r2;
      ss_(i, j) = ss_(j, i) = p.ss;
      c_(i, j) = c_(j, i) = p.c;
    }
  }
}

Matrix PowerCriterionObjective::stein_matrix(double sigma_y) const {
  const GaussKernel l(sigma_y);
  const Index n = train_.size();
  const double dy = static_cast<double>(dy_);
  Matrix stein(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const double v = detail::stein_from_parts(l.from_sq_dist(r2_(i, j)), r2_(i, j), ss_(i, j), c_(i, j), dy,
                                                l.inv_sq_bandwidth());
      stein(i, j) = stein(j, i) = v;
    }
  }
  return stein;
}

double PowerCriterionObjective::value(const CriterionParams& params) const {
  const GaussKernel k(std::exp(params.log_sigma_x));
  const Matrix features = location_features(k, train_.xs(), TestLocations{params.vs});
  return power_criterion_from_gram(kbar_gram(stein_matrix(std::exp(params.log_sigma_y)), features), dy_,
                                   regularizer_)
      .value;
}

std::pair<double, CriterionGradient> PowerCriterionObjective::value_and_gradient(
    const CriterionParams& params) const {
  const double sigma_x = std::exp(params.log_sigma_x);
  const double sigma_y = std::exp(params.log_sigma_y);
  const GaussKernel k(sigma_x);
  const GaussKernel l(sigma_y);
  const TestLocations locations{params.vs};
  const Matrix& xs = train_.xs();
  const Index n = train_.size();
  const Index J = locations.count();
  const Index dx = train_.dx();

  const Matrix stein = stein_matrix(sigma_y);
  const Matrix features = location_features(k, xs, locations);
  const GramH kbar = kbar_gram(stein, features);
  const PowerCriterion pc = power_criterion_from_gram(kbar, dy_, regularizer_);

  // dC/dA_ij (symmetrized) = a - b ((g_i + g_j) / 2 - mean(g)) for the
  // unscaled kbar gram A.
  const double nd = static_cast<double>(n);
  const double dy = static_cast<double>(dy_);
  const std::vector<double> rows = offdiag_row_sums(kbar);
  Vector g(n);
  for (Index i = 0; i < n; ++i) g[i] = rows[static_cast<std::size_t>(i)] / (nd - 1.0) / dy;
  const double g_mean = g.mean();
  const double sigma = pc.sigma;
  const double a = 1.0 / (sigma * nd * (nd - 1.0) * dy);
  const double b = 4.0 * pc.statistic / (sigma * sigma * sigma * (nd - 1.0) * (nd - 1.0) * dy);

  Matrix weights(n, n);  // symmetrized dC/dA_ij, zero diagonal
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      weights(i, j) = i == j ? 0.0 : a - b * (0.5 * (g[i] + g[j]) - g_mean);
    }
  }

  // Locations and sigma_x enter through features only: B = W o stein.
  const Matrix B = weights.cwiseProduct(stein);
  const Matrix BF = B * features;  // n x J
  const double inv_sx2 = 1.0 / (sigma_x * sigma_x);
  const double scale = 2.0 / (static_cast<double>(J)) * inv_sx2;
  CriterionGradient grad;
  grad.d_vs = Matrix::Zero(J, dx);
  double d_lsx = 0.0;
  for (Index v = 0; v < J; ++v) {
    const auto loc = locations.location(v);
    for (Index i = 0; i < n; ++i) {
      const double w = features(i, v) * BF(i, v);
      double d2 = 0.0;
      for (Index t = 0; t < dx; ++t) {
        const double diff = xs(i, t) - loc[static_cast<std::size_t>(t)];
        grad.d_vs(v, t) += w * diff;
        d2 += diff * diff;
      }
      d_lsx += w * d2;
    }
  }
  grad.d_vs *= scale;
  grad.d_log_sigma_x = d_lsx * scale;

  // sigma_y enters through the Stein kernel only.
  const double u = l.inv_sq_bandwidth();
  const Matrix kbar_values = (features * features.transpose()) / static_cast<double>(J);
  double d_lsy = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double r2 = r2_(i, j);
      const double lval = l.from_sq_dist(r2);
      const double dstein =
          r2 * u * stein(i, j) + lval * (-2.0 * dy * u + 4.0 * r2 * u * u - 2.0 * u * c_(i, j));
      d_lsy += weights(i, j) * kbar_values(i, j) * dstein;
    }
  }
  grad.d_log_sigma_y = d_lsy;
  return {pc.value, std::move(grad)};
}

CriterionGradient PowerCriterionObjective::finite_difference_gradient(const CriterionParams& params,
                                                                      double fd_step) const {
  const Index J = params.vs.rows();
  const Index dx = params.vs.cols();
  const Vector theta = flatten(params);
  Vector g(theta.size());
  for (Index t = 0; t < theta.size(); ++t) {
    const double h = fd_step * std::max(1.0, std::abs(theta[t]));
    Vector up = theta;
    Vector down = theta;
    up[t] += h;
    down[t] -= h;
    g[t] = (value(unflatten(up, J, dx)) - value(unflatten(down, J, dx))) / ((up[t] - down[t]));
  }
  return unflatten_gradient(g, J, dx);
}

CriterionGradient criterion_gradient(const ConditionalModel& model, const GaussKernel& k,
                                     const GaussKernel& l, const TestLocations& locations,
                                     const JointSample& train, double regularizer, GradientMode mode,
                                     double fd_step) {
  validate_locations(locations, train.dx());
  const PowerCriterionObjective objective(model, train, regularizer);
  const CriterionParams params{locations.vs, std::log(k.bandwidth()), std::log(l.bandwidth())};
  if (mode == GradientMode::FiniteDifference) return objective.finite_difference_gradient(params, fd_step);
  return objective.value_and_gradient(params).second;
}

OptimizationResult optimize_fscd(const JointSample& sample, const ConditionalModel& model, Index J,
                                 const OptConfig& config) {
  config.validate();
  if (J < 1) throw std::invalid_argument("optimize_fscd: J must be positive");
  auto [train, test] = split(sample, config.train_fraction, config.seed);
  if (train.size() < 4 || test.size() < 4) {
    throw InputShapeError("optimize_fscd: both the training and test parts need at least 4 rows");
  }

  OptimizationResult result;
  RandomLocations init = sample_random_locations(train, J, derive_seed(config.seed, 1));
  Matrix vs = init.locations.vs;
  result.init_jittered = init.jittered;
  {
    Rng rng = make_rng(config.seed, 2);
    std::normal_distribution<double> jitter(0.0, 1e-2);  // N(0, 1e-4 I)
    for (Index a = 0; a < J; ++a) {
      for (Index b = a + 1; b < J; ++b) {
        if (vs.row(a) == vs.row(b)) {
          for (Index t = 0; t < vs.cols(); ++t) vs(b, t) += jitter(rng);
          result.init_jittered = true;
        }
      }
    }
  }

  CriterionParams params{vs, std::log(median_heuristic(train.xs())), std::log(median_heuristic(train.ys()))};
  const PowerCriterionObjective objective(model, std::move(train), config.regularizer);

  Vector theta = flatten(params);
  Vector m1 = Vector::Zero(theta.size());
  Vector m2 = Vector::Zero(theta.size());
  result.trace.reserve(static_cast<std::size_t>(config.steps) + 1);
  for (int step = 1; step <= config.steps; ++step) {
    double value = 0.0;
    Vector grad;
    if (config.gradient_mode == GradientMode::Analytic) {
      auto [v, g] = objective.value_and_gradient(params);
      value = v;
      grad = g.flat();
    } else {
      value = objective.value(params);
      grad = objective.finite_difference_gradient(params, config.fd_step).flat();
    }
    result.trace.push_back(value);
    m1 = config.adam_beta1 * m1 + (1.0 - config.adam_beta1) * grad;
    m2 = config.adam_beta2 * m2 + (1.0 - config.adam_beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(config.adam_beta1, step);
    const double c2 = 1.0 - std::pow(config.adam_beta2, step);
    // Ascent: the criterion is maximized.
    theta.array() += config.learning_rate * (m1.array() / c1) / ((m2.array() / c2).sqrt() + config.adam_eps);
    params = unflatten(theta, J, sample.dx());
  }
  result.trace.push_back(objective.value(params));

  result.locations = TestLocations{params.vs};
  result.sigma_x = std::exp(params.log_sigma_x);
  result.sigma_y = std::exp(params.log_sigma_y);
  result.test_part = std::move(test);
  return result;
}

}  // namespace kcgof
