#include "kcgof/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "kcgof/kernels.hpp"

namespace kcgof {
namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

bool all_finite(const Vector& v) { return v.allFinite(); }

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

double dot(const Vector& coeffs, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) s += coeffs[static_cast<Index>(t)] * x[t];
  return s;
}

struct Moments {
  double mean;
  double var;
};

Moments moments(const LinearGaussian& m, std::span<const double> x) {
  return {dot(m.coeffs, x) + m.intercept, m.noise_var};
}

Moments moments(const HeteroGaussian& m, std::span<const double> x) {
  const double r2 = squared_distance(x, as_span(m.bump_center));
  const double var =
      m.base_var + m.bump_height * std::exp(-r2 / (2.0 * m.bump_width * m.bump_width));
  return {dot(m.coeffs, x) + m.intercept, var};
}

Moments moments(const QuadGaussian& m, std::span<const double> x) {
  return {m.a * x[0] * x[0] + m.b * x[0] + m.c, m.noise_var};
}

/// Log of each component's weighted density at y; -inf for zero weights.
void component_logs(const CondGaussMixture& m, std::span<const double> y, std::vector<double>& out) {
  out.resize(m.components.size());
  for (std::size_t c = 0; c < m.components.size(); ++c) {
    const auto& comp = m.components[c];
    if (comp.weight <= 0.0) {
      out[c] = -std::numeric_limits<double>::infinity();
      continue;
    }
    double lp = std::log(comp.weight);
    for (std::size_t t = 0; t < y.size(); ++t) {
      const auto k = static_cast<Index>(t);
      const double diff = y[t] - comp.mean[k];
      lp -= 0.5 * (diff * diff / comp.vars[k] + std::log(comp.vars[k]) + kLogTwoPi);
    }
    out[c] = lp;
  }
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::LinearGaussian: return "linear_gaussian";
    case ModelKind::HeteroGaussian: return "hetero_gaussian";
    case ModelKind::QuadGaussian: return "quad_gaussian";
    case ModelKind::CondGaussMixture: return "cond_gauss_mixture";
  }
  return "unknown";
}

ConditionalModel::ConditionalModel(LinearGaussian p) : params_(std::move(p)) {
  const auto& m = std::get<LinearGaussian>(params_);
  require(m.coeffs.size() >= 1, "linear_gaussian: coeffs must be nonempty");
  require(all_finite(m.coeffs) && std::isfinite(m.intercept), "linear_gaussian: non-finite parameter");
  require(m.noise_var > 0.0 && std::isfinite(m.noise_var), "linear_gaussian: noise_var must be positive");
  dx_ = m.coeffs.size();
  dy_ = 1;
}

ConditionalModel::ConditionalModel(HeteroGaussian p) : params_(std::move(p)) {
  const auto& m = std::get<HeteroGaussian>(params_);
  require(m.coeffs.size() >= 1, "hetero_gaussian: coeffs must be nonempty");
  require(m.bump_center.size() == m.coeffs.size(),
          "hetero_gaussian: bump_center must have the same length as coeffs");
  require(all_finite(m.coeffs) && all_finite(m.bump_center) && std::isfinite(m.intercept),
          "hetero_gaussian: non-finite parameter");
  require(m.base_var > 0.0 && std::isfinite(m.base_var), "hetero_gaussian: base_var must be positive");
  require(m.bump_height >= 0.0 && std::isfinite(m.bump_height),
          "hetero_gaussian: bump_height must be nonnegative");
  require(m.bump_width > 0.0 && std::isfinite(m.bump_width), "hetero_gaussian: bump_width must be positive");
  dx_ = m.coeffs.size();
  dy_ = 1;
}

ConditionalModel::ConditionalModel(QuadGaussian p) : params_(p) {
  require(std::isfinite(p.a) && std::isfinite(p.b) && std::isfinite(p.c), "quad_gaussian: non-finite parameter");
  require(p.noise_var > 0.0 && std::isfinite(p.noise_var), "quad_gaussian: noise_var must be positive");
  dx_ = 1;
  dy_ = 1;
}

ConditionalModel::ConditionalModel(CondGaussMixture p, Index dx) : params_(std::move(p)) {
  const auto& m = std::get<CondGaussMixture>(params_);
  require(dx >= 1, "cond_gauss_mixture: dx must be positive");
  require(!m.components.empty(), "cond_gauss_mixture: at least one component required");
  const Index dy = m.components.front().mean.size();
  require(dy >= 1, "cond_gauss_mixture: component mean must be nonempty");
  double total = 0.0;
  for (std::size_t c = 0; c < m.components.size(); ++c) {
    const auto& comp = m.components[c];
    const std::string where = "cond_gauss_mixture: components[" + std::to_string(c) + "]";
    require(comp.mean.size() == dy && comp.vars.size() == dy, where + ": mean/vars length mismatch");
    require(all_finite(comp.mean) && all_finite(comp.vars), where + ": non-finite parameter");
    require((comp.vars.array() > 0.0).all(), where + ": vars must be positive");
    require(comp.weight >= 0.0 && std::isfinite(comp.weight), where + ": weight must be nonnegative");
    total += comp.weight;
  }
  require(std::abs(total - 1.0) <= 1e-9, "cond_gauss_mixture: weights must sum to 1");
  dx_ = dx;
  dy_ = dy;
}

ModelKind ConditionalModel::kind() const { return static_cast<ModelKind>(params_.index()); }

void ConditionalModel::check_dims(std::span<const double> x, std::span<const double> y) const {
  if (static_cast<Index>(x.size()) != dx_ || static_cast<Index>(y.size()) != dy_) {
    throw InputShapeError("ConditionalModel: expected (dx, dy) = (" + std::to_string(dx_) + ", " +
                          std::to_string(dy_) + "), got (" + std::to_string(x.size()) + ", " +
                          std::to_string(y.size()) + ")");
  }
}

Vector ConditionalModel::score(std::span<const double> x, std::span<const double> y) const {
  check_dims(x, y);
  Vector out(dy_);
  score_into(x, y, {out.data(), static_cast<std::size_t>(dy_)});
  return out;
}

void ConditionalModel::score_into(std::span<const double> x, std::span<const double> y,
                                  std::span<double> out) const {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CondGaussMixture>) {
          thread_local std::vector<double> logs;
          component_logs(m, y, logs);
          const double top = *std::max_element(logs.begin(), logs.end());
          double total = 0.0;
          for (double& lg : logs) {
            lg = std::exp(lg - top);
            total += lg;
          }
          total = std::max(total, 1e-300);
          std::fill(out.begin(), out.end(), 0.0);
          for (std::size_t c = 0; c < m.components.size(); ++c) {
            const double resp = logs[c] / total;
            if (resp == 0.0) continue;
            const auto& comp = m.components[c];
            for (std::size_t t = 0; t < y.size(); ++t) {
              const auto k = static_cast<Index>(t);
              out[t] += resp * ((comp.mean[k] - y[t]) / comp.vars[k]);
            }
          }
        } else {
          const Moments mo = moments(m, x);
          out[0] = (mo.mean - y[0]) / mo.var;
        }
      },
      params_);
}

double ConditionalModel::log_density(std::span<const double> x, std::span<const double> y) const {
  check_dims(x, y);
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CondGaussMixture>) {
          std::vector<double> logs;
          component_logs(m, y, logs);
          const double top = *std::max_element(logs.begin(), logs.end());
          double total = 0.0;
          for (double lg : logs) total += std::exp(lg - top);
          return top + std::log(total);
        } else {
          const Moments mo = moments(m, x);
          const double diff = y[0] - mo.mean;
          return -0.5 * (diff * diff / mo.var + std::log(mo.var) + kLogTwoPi);
        }
      },
      params_);
}

Vector ConditionalModel::sample(std::span<const double> x, Rng& rng) const {
  if (static_cast<Index>(x.size()) != dx_) {
    throw InputShapeError("ConditionalModel::sample: expected dx = " + std::to_string(dx_));
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector out(dy_);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CondGaussMixture>) {
          std::uniform_real_distribution<double> unif(0.0, 1.0);
          const double u = unif(rng);
          std::size_t pick = 0;
          for (std::size_t c = 0; c < m.components.size(); ++c) {
            if (m.components[c].weight > 0.0) pick = c;
          }
          double acc = 0.0;
          for (std::size_t c = 0; c < m.components.size(); ++c) {
            acc += m.components[c].weight;
            if (u < acc && m.components[c].weight > 0.0) {
              pick = c;
              break;
            }
          }
          const auto& comp = m.components[pick];
          for (Index t = 0; t < dy_; ++t) out[t] = comp.mean[t] + std::sqrt(comp.vars[t]) * normal(rng);
        } else {
          const Moments mo = moments(m, x);
          out[0] = mo.mean + std::sqrt(mo.var) * normal(rng);
        }
      },
      params_);
  return out;
}

}  // namespace kcgof
