#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kcgof/optimize.hpp"
#include "kcgof/problems.hpp"
#include "kcgof/resampling.hpp"

namespace kcgof {

enum class Method { Kcsd, FscdRand, FscdOpt, Mmd };

/// "kcsd", "fscd" (random locations), "fscd-opt", "mmd".
Method parse_method(std::string_view name);
std::string_view to_string(Method method);

struct TestConfig {
  Method method = Method::Kcsd;
  Index J = 5;
  int bootstrap_reps = kDefaultBootstrapReps;
  int permutations = kDefaultPermutations;
  OptConfig opt;  // FSCD-opt only; its seed is derived per run
};

/// Runs one configured test. Every random choice (locations, split, bootstrap
/// weights, model draws) derives from `seed`.
TestResult run_configured_test(const TestConfig& config, const ConditionalModel& model,
                               const JointSample& sample, double alpha, std::uint64_t seed);

/// Seed of trial t's sample; the test itself uses derive_seed of this value.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial);

struct RatePoint {
  Index n = 0;
  int trials = 0;
  int rejections = 0;
  double rate = 0.0;
  std::vector<char> decisions;        // per trial, by trial index
  std::vector<double> trial_seconds;  // wall clock per trial
};

/// Draws `trials` fresh samples of size n (trial t seeded by
/// trial_seed(master_seed, t)), runs the test on each and averages the
/// rejections. A failing trial aborts with its index in the message.
RatePoint rejection_rate(const ProblemSpec& problem, const TestConfig& config, Index n, int trials,
                         double alpha, std::uint64_t master_seed);

struct ExperimentReport {
  std::string problem;
  std::string test;
  TestConfig config;
  double alpha = 0.05;
  std::uint64_t master_seed = 0;
  std::vector<RatePoint> points;
};

ExperimentReport run_experiment(const ProblemSpec& problem, const TestConfig& config,
                                 const std::vector<Index>& n_list, int trials, double alpha,
                                 std::uint64_t master_seed);

nlohmann::json to_json(const TestResult& result);
nlohmann::json to_json(const TestConfig& config);
/// Wall-clock figures are written only when include_timing is set.
nlohmann::json to_json(const ExperimentReport& report, bool include_timing);
/// "n,trials,rejections,rate" lines.
std::string rates_csv(const ExperimentReport& report);

/// G points on the line t * (1, ..., 1), t evenly spaced over [lo, hi].
Matrix line_grid(Index dx, double lo, double hi, Index points);

struct LandscapePoint {
  Vector v;
  double criterion = 0.0;
};

/// The J = 1 power criterion at each grid row, on the full sample, with
/// bandwidths from the policy.
std::vector<LandscapePoint> powcri_landscape(const ConditionalModel& model, const JointSample& sample,
                                             const Matrix& grid,
                                             const BandwidthPolicy& policy = BandwidthPolicy::median(),
                                             double regularizer = kDefaultRegularizer);

}  // namespace kcgof
