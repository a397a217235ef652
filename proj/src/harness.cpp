#include "kcgof/harness.hpp"

#include <charconv>
#include <chrono>
#include <exception>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "kcgof/rng.hpp"

namespace kcgof {

using nlohmann::json;

Method parse_method(std::string_view name) {
  if (name == "kcsd") return Method::Kcsd;
  if (name == "fscd" || name == "fscd-rand") return Method::FscdRand;
  if (name == "fscd-opt") return Method::FscdOpt;
  if (name == "mmd") return Method::Mmd;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Kcsd: return "kcsd";
    case Method::FscdRand: return "fscd";
    case Method::FscdOpt: return "fscd-opt";
    case Method::Mmd: return "mmd";
  }
  return "unknown";
}

TestResult run_configured_test(const TestConfig& config, const ConditionalModel& model,
                               const JointSample& sample, double alpha, std::uint64_t seed) {
  switch (config.method) {
    case Method::Kcsd:
      return run_kcsd_test(model, sample, alpha, config.bootstrap_reps, seed);
    case Method::FscdRand: {
      const RandomLocations locs = sample_random_locations(sample, config.J, derive_seed(seed, 11));
      TestResult r = run_fscd_test(model, sample, locs.locations, alpha, config.bootstrap_reps, seed);
      if (locs.jittered) r.notes.push_back("location covariance jittered by 1e-8 I");
      return r;
    }
    case Method::FscdOpt: {
      OptConfig opt = config.opt;
      opt.seed = derive_seed(seed, 12);
      const OptimizationResult fit = optimize_fscd(sample, model, config.J, opt);
      TestResult r = run_fscd_test(model, fit.test_part, fit.locations, alpha, config.bootstrap_reps, seed,
                                   BandwidthPolicy::fixed(fit.sigma_x, fit.sigma_y));
      r.method = "fscd-opt";
      if (fit.init_jittered) r.notes.push_back("initial locations jittered");
      if (!fit.trace.empty()) {
        std::ostringstream os;
        os.precision(17);
        os << "train criterion " << fit.trace.front() << " -> " << fit.trace.back();
        r.notes.push_back(os.str());
      }
      return r;
    }
    case Method::Mmd:
      return run_mmd_baseline(model, sample, alpha, config.permutations, seed);
  }
  throw std::invalid_argument("run_configured_test: bad method");
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial) {
  return derive_seed(master_seed, trial);
}

RatePoint rejection_rate(const ProblemSpec& problem, const TestConfig& config, Index n, int trials,
                         double alpha, std::uint64_t master_seed) {
  if (trials < 1) throw std::invalid_argument("rejection_rate: trials must be positive");
  RatePoint point;
  point.n = n;
  point.trials = trials;
  point.decisions.assign(static_cast<std::size_t>(trials), 0);
  point.trial_seconds.assign(static_cast<std::size_t>(trials), 0.0);
  std::vector<std::optional<std::string>> errors(static_cast<std::size_t>(trials));

#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < trials; ++t) {
    const auto u = static_cast<std::size_t>(t);
    const auto start = std::chrono::steady_clock::now();
    try {
      const std::uint64_t s = trial_seed(master_seed, static_cast<std::uint64_t>(t));
      const JointSample sample = problem.draw(n, s);
      const TestResult r = run_configured_test(config, problem.model, sample, alpha, derive_seed(s, 0x74657374ULL));
      point.decisions[u] = r.reject ? 1 : 0;
    } catch (const std::exception& e) {
      errors[u] = e.what();
    }
    point.trial_seconds[u] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  for (int t = 0; t < trials; ++t) {
    if (errors[static_cast<std::size_t>(t)]) {
      throw std::runtime_error("trial " + std::to_string(t) + " (n = " + std::to_string(n) +
                               ") failed: " + *errors[static_cast<std::size_t>(t)]);
    }
  }
  for (char d : point.decisions) point.rejections += d;
  point.rate = static_cast<double>(point.rejections) / static_cast<double>(trials);
  return point;
}

ExperimentReport run_experiment(const ProblemSpec& problem, const TestConfig& config,
                                 const std::vector<Index>& n_list, int trials, double alpha,
                                 std::uint64_t master_seed) {
  if (n_list.empty()) throw std::invalid_argument("run_experiment: empty n list");
  ExperimentReport report;
  report.problem = problem.name;
  report.test = std::string(to_string(config.method));
  report.config = config;
  report.alpha = alpha;
  report.master_seed = master_seed;
  for (Index n : n_list) report.points.push_back(rejection_rate(problem, config, n, trials, alpha, master_seed));
  return report;
}

json to_json(const TestResult& r) {
  json out{{"method", r.method},
           {"statistic", r.statistic},
           {"threshold", r.threshold},
           {"p_value", r.p_value},
           {"reject", r.reject},
           {"alpha", r.alpha},
           {"n_used", r.n_used},
           {"bootstrap_reps", r.bootstrap_reps},
           {"seed", r.seed},
           {"sigma_x", r.sigma_x},
           {"sigma_y", r.sigma_y}};
  if (r.num_locations > 0) {
    json locs = json::array();
    for (Index j = 0; j < r.locations.rows(); ++j) {
      const auto v = row(r.locations, j);
      locs.push_back(std::vector<double>(v.begin(), v.end()));
    }
    out["J"] = r.num_locations;
    out["locations"] = std::move(locs);
  }
  if (!r.notes.empty()) out["notes"] = r.notes;
  return out;
}

json to_json(const TestConfig& c) {
  json out{{"method", std::string(to_string(c.method))},
           {"bootstrap_reps", c.bootstrap_reps},
           {"permutations", c.permutations}};
  if (c.method == Method::FscdRand || c.method == Method::FscdOpt) out["J"] = c.J;
  if (c.method == Method::FscdOpt) {
    out["opt"] = {{"train_fraction", c.opt.train_fraction},
                  {"steps", c.opt.steps},
                  {"learning_rate", c.opt.learning_rate},
                  {"adam_beta1", c.opt.adam_beta1},
                  {"adam_beta2", c.opt.adam_beta2},
                  {"adam_eps", c.opt.adam_eps},
                  {"gradient_mode", c.opt.gradient_mode == GradientMode::Analytic ? "analytic" : "finite_difference"},
                  {"fd_step", c.opt.fd_step},
                  {"regularizer", c.opt.regularizer}};
  }
  return out;
}

json to_json(const ExperimentReport& report, bool include_timing) {
  json points = json::array();
  for (const RatePoint& p : report.points) {
    json jp{{"n", p.n}, {"trials", p.trials}, {"rejections", p.rejections}, {"rate", p.rate}};
    if (include_timing) jp["trial_seconds"] = p.trial_seconds;
    points.push_back(std::move(jp));
  }
  return json{{"problem", report.problem},
              {"test", report.test},
              {"alpha", report.alpha},
              {"master_seed", report.master_seed},
              {"config", to_json(report.config)},
              {"results", std::move(points)}};
}

std::string rates_csv(const ExperimentReport& report) {
  std::string out = "n,trials,rejections,rate\n";
  for (const RatePoint& p : report.points) {
    char buf[32];
    const auto end = std::to_chars(buf, buf + sizeof buf, p.rate).ptr;
    out += std::to_string(p.n) + ',' + std::to_string(p.trials) + ',' + std::to_string(p.rejections) + ',' +
           std::string(buf, end) + '\n';
  }
  return out;
}

Matrix line_grid(Index dx, double lo, double hi, Index points) {
  if (dx < 1 || points < 1) throw std::invalid_argument("line_grid: empty grid");
  if (!(lo <= hi)) throw std::invalid_argument("line_grid: grid-min must not exceed grid-max");
  Matrix grid(points, dx);
  for (Index g = 0; g < points; ++g) {
    const double t = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(points - 1);
    grid.row(g).setConstant(t);
  }
  return grid;
}

std::vector<LandscapePoint> powcri_landscape(const ConditionalModel& model, const JointSample& sample,
                                             const Matrix& grid, const BandwidthPolicy& policy,
                                             double regularizer) {
  if (grid.rows() < 1) throw std::invalid_argument("powcri_landscape: empty grid");
  if (grid.cols() != sample.dx()) throw InputShapeError("powcri_landscape: grid dimension does not match dx");
  const auto [sx, sy] = resolve_bandwidths(policy, sample);
  const GaussKernel k(sx);
  const Matrix stein = stein_gram(model, GaussKernel(sy), sample);
  std::vector<LandscapePoint> out;
  out.reserve(static_cast<std::size_t>(grid.rows()));
  for (Index g = 0; g < grid.rows(); ++g) {
    const TestLocations loc{grid.row(g)};
    const GramH kbar = kbar_gram(stein, location_features(k, sample.xs(), loc));
    out.push_back({grid.row(g).transpose(), power_criterion_from_gram(kbar, sample.dy(), regularizer).value});
  }
  return out;
}

}  // namespace kcgof
