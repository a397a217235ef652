#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kcgof {

using Vector = Eigen::VectorXd;
/// Row-major: every sample point is a contiguous span.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

/// Wrong dimensions or mismatched shapes in the inputs.
class InputShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Data for which a quantity is undefined (all points identical, zero
/// variance with no regularizer, ...).
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration document or data file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::span<const double> row(const Matrix& m, Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

inline std::span<double> row(Matrix& m, Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Paired covariates and responses, one row per observation.
class JointSample {
 public:
  JointSample() = default;
  /// Throws InputShapeError unless both matrices have the same number of
  /// rows (at least 2) and every entry is finite.
  JointSample(Matrix xs, Matrix ys);

  const Matrix& xs() const { return xs_; }
  const Matrix& ys() const { return ys_; }
  Index size() const { return xs_.rows(); }
  Index dx() const { return xs_.cols(); }
  Index dy() const { return ys_.cols(); }

  std::span<const double> x(Index i) const { return row(xs_, i); }
  std::span<const double> y(Index i) const { return row(ys_, i); }

  /// Rows in the given order. Indices may repeat.
  JointSample select(std::span<const Index> indices) const;

 private:
  Matrix xs_;
  Matrix ys_;
};

/// The set of J test locations in covariate space, one per row.
struct TestLocations {
  Matrix vs;

  Index count() const { return vs.rows(); }
  Index dim() const { return vs.cols(); }
  std::span<const double> location(Index j) const { return row(vs, j); }
};

/// Throws InputShapeError if V is empty, non-finite, or not dx-dimensional.
void validate_locations(const TestLocations& locations, Index dx);

}  // namespace kcgof
