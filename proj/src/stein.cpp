#include "kcgof/stein.hpp"

#include <cmath>
#include <string>

#include "kcgof/reduce.hpp"

namespace kcgof {

JointSample::JointSample(Matrix xs, Matrix ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.rows() != ys_.rows()) {
    throw InputShapeError("JointSample: xs has " + std::to_string(xs_.rows()) + " rows, ys has " +
                          std::to_string(ys_.rows()));
  }
  if (xs_.rows() < 2) throw InputShapeError("JointSample: need at least 2 rows");
  if (xs_.cols() < 1 || ys_.cols() < 1) throw InputShapeError("JointSample: empty dimension");
  if (!xs_.allFinite() || !ys_.allFinite()) throw InputShapeError("JointSample: non-finite entry");
}

JointSample JointSample::select(std::span<const Index> indices) const {
  Matrix xs(static_cast<Index>(indices.size()), dx());
  Matrix ys(static_cast<Index>(indices.size()), dy());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    xs.row(static_cast<Index>(r)) = xs_.row(indices[r]);
    ys.row(static_cast<Index>(r)) = ys_.row(indices[r]);
  }
  return JointSample(std::move(xs), std::move(ys));
}

void validate_locations(const TestLocations& locations, Index dx) {
  if (locations.count() < 1) throw InputShapeError("TestLocations: need at least one location");
  if (locations.dim() != dx) {
    throw InputShapeError("TestLocations: dimension " + std::to_string(locations.dim()) +
                          " does not match dx = " + std::to_string(dx));
  }
  if (!locations.vs.allFinite()) throw InputShapeError("TestLocations: non-finite entry");
}

namespace {

void check_model(const ConditionalModel& model, const JointSample& sample) {
  if (model.dx() != sample.dx() || model.dy() != sample.dy()) {
    throw InputShapeError("sample dimensions (" + std::to_string(sample.dx()) + ", " +
                          std::to_string(sample.dy()) + ") do not match the model (" +
                          std::to_string(model.dx()) + ", " + std::to_string(model.dy()) + ")");
  }
}

}  // namespace

double h_p(const ConditionalModel& model, const GaussKernel& l, std::span<const double> x1,
           std::span<const double> y1, std::span<const double> x2, std::span<const double> y2) {
  const Vector s1 = model.score(x1, y1);
  const Vector s2 = model.score(x2, y2);
  return detail::stein_kernel(l, y1.data(), s1.data(), y2.data(), s2.data(), y1.size());
}

Matrix score_matrix(const ConditionalModel& model, const JointSample& sample) {
  check_model(model, sample);
  const Index n = sample.size();
  Matrix scores(n, model.dy());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) model.score_into(sample.x(i), sample.y(i), row(scores, i));
  if (!scores.allFinite()) throw DegenerateDataError("score_matrix: non-finite score");
  return scores;
}

Matrix stein_gram(const ConditionalModel& model, const GaussKernel& l, const JointSample& sample) {
  const Matrix scores = score_matrix(model, sample);
  const Index n = sample.size();
  const auto dy = static_cast<std::size_t>(sample.dy());
  Matrix h(n, n);
  // Upper triangle, mirrored; the entry formula is bitwise symmetric.
#pragma omp parallel for schedule(dynamic, 8)
  for (Index i = 0; i < n; ++i) {
    const double* yi = sample.y(i).data();
    const double* si = scores.data() + i * scores.cols();
    for (Index j = i; j < n; ++j) {
      const double v =
          detail::stein_kernel(l, yi, si, sample.y(j).data(), scores.data() + j * scores.cols(), dy);
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

GramH gram_H_from_stein(const Matrix& stein, const GaussKernel& k, const Matrix& xs) {
  const Index n = stein.rows();
  if (stein.cols() != n || xs.rows() != n) throw InputShapeError("gram_H_from_stein: shape mismatch");
  const auto dx = static_cast<std::size_t>(xs.cols());
  GramH gram{Matrix(n, n), true};
#pragma omp parallel for schedule(dynamic, 8)
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const double kv = k.from_sq_dist(detail::squared_distance_unchecked(
          xs.data() + i * xs.cols(), xs.data() + j * xs.cols(), dx));
      gram.h(i, j) = kv * stein(i, j);
      gram.h(j, i) = kv * stein(j, i);
    }
  }
  return gram;
}

GramH gram_H(const ConditionalModel& model, const GaussKernel& k, const GaussKernel& l,
             const JointSample& sample) {
  return gram_H_from_stein(stein_gram(model, l, sample), k, sample.xs());
}

Matrix location_features(const GaussKernel& k, const Matrix& xs, const TestLocations& locations) {
  validate_locations(locations, xs.cols());
  const Index n = xs.rows();
  const Index J = locations.count();
  const auto dx = static_cast<std::size_t>(xs.cols());
  Matrix features(n, J);
  for (Index i = 0; i < n; ++i) {
    for (Index v = 0; v < J; ++v) {
      features(i, v) = k.from_sq_dist(detail::squared_distance_unchecked(
          xs.data() + i * xs.cols(), locations.vs.data() + v * locations.vs.cols(), dx));
    }
  }
  return features;
}

GramH kbar_gram(const Matrix& stein, const Matrix& features) {
  const Index n = stein.rows();
  if (stein.cols() != n || features.rows() != n) throw InputShapeError("kbar_gram: shape mismatch");
  const Index J = features.cols();
  const double count = static_cast<double>(J);
  GramH gram{Matrix(n, n), true};
#pragma omp parallel for schedule(dynamic, 8)
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      double acc = 0.0;
      for (Index v = 0; v < J; ++v) acc += features(i, v) * features(j, v);
      const double kbar = acc / count;
      gram.h(i, j) = kbar * stein(i, j);
      gram.h(j, i) = kbar * stein(j, i);
    }
  }
  return gram;
}

GramH fscd_gram(const ConditionalModel& model, const GaussKernel& k, const GaussKernel& l,
                const TestLocations& locations, const JointSample& sample) {
  validate_locations(locations, sample.dx());
  return kbar_gram(stein_gram(model, l, sample), location_features(k, sample.xs(), locations));
}

std::vector<double> offdiag_row_sums(const GramH& gram) {
  const Index n = gram.size();
  std::vector<double> sums(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    sums[static_cast<std::size_t>(i)] = offdiag_sum(row(gram.h, i), static_cast<std::size_t>(i));
  }
  return sums;
}

double kcsd_estimate(const GramH& gram) {
  const Index n = gram.size();
  if (n < 2) throw InputShapeError("kcsd_estimate: need n >= 2");
  const double total = pairwise_sum(offdiag_row_sums(gram));
  return total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double fscd_estimate(const ConditionalModel& model, const GaussKernel& k, const GaussKernel& l,
                     const TestLocations& locations, const JointSample& sample) {
  return kcsd_estimate(fscd_gram(model, k, l, locations, sample)) / static_cast<double>(sample.dy());
}

PowerCriterion power_criterion_from_gram(const GramH& kbar, Index dy, double regularizer) {
  const Index n = kbar.size();
  if (n < 4) throw InputShapeError("power_criterion: need n >= 4");
  if (!(regularizer >= 0.0)) throw std::invalid_argument("power_criterion: regularizer must be >= 0");
  const double nd = static_cast<double>(n);
  const double ddy = static_cast<double>(dy);
  const std::vector<double> rows = offdiag_row_sums(kbar);

  PowerCriterion pc;
  pc.statistic = pairwise_sum(rows) / (nd * (nd - 1.0)) / ddy;
  std::vector<double> g(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) g[i] = rows[i] / (nd - 1.0) / ddy;
  const double mean = pairwise_sum(g) / nd;
  pc.variance = pairwise_sum(g.size(), [&](std::size_t i) {
                  const double d = g[i] - mean;
                  return d * d;
                }) /
                (nd - 1.0);
  pc.sigma = std::sqrt(4.0 * pc.variance + regularizer);
  if (!(pc.sigma > 0.0)) {
    throw DegenerateDataError("power_criterion: zero variance and zero regularizer");
  }
  pc.value = pc.statistic / pc.sigma;
  return pc;
}

double power_criterion(const ConditionalModel& model, const GaussKernel& k, const GaussKernel& l,
                       const TestLocations& locations, const JointSample& sample, double regularizer) {
  return power_criterion_from_gram(fscd_gram(model, k, l, locations, sample), sample.dy(), regularizer)
      .value;
}

}  // namespace kcgof
