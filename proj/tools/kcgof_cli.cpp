// Command-line front end: run a test on CSV data, reproduce rejection-rate
// experiments on the synthetic problems, and tabulate power-criterion
// landscapes.

#include <charconv>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kcgof/harness.hpp"
#include "kcgof/model_config.hpp"
#include "kcgof/problems.hpp"
#include "kcgof/sample_io.hpp"

namespace {

using namespace kcgof;

std::vector<Index> parse_n_list(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const long long v = std::stoll(item, &used);
    if (used != item.size() || v < 4) throw std::invalid_argument("--n-list: bad sample size '" + item + "'");
    out.push_back(static_cast<Index>(v));
  }
  if (out.empty()) throw std::invalid_argument("--n-list: no sample sizes given");
  return out;
}

std::string shortest(double v) {
  char buf[32];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
}

struct CommonTestOptions {
  std::string method = "kcsd";
  double alpha = 0.05;
  int bootstrap = kDefaultBootstrapReps;
  Index J = 5;
  double train_frac = 0.3;
  int steps = 200;
  double learning_rate = 0.01;
  std::string gradient = "analytic";

  void attach(CLI::App* app) {
    app->add_option("--method", method, "kcsd | fscd | fscd-opt | mmd")
        ->check(CLI::IsMember({"kcsd", "fscd", "fscd-rand", "fscd-opt", "mmd"}));
    app->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    app->add_option("--bootstrap", bootstrap, "Bootstrap replicates (permutations for mmd)")
        ->check(CLI::PositiveNumber);
    app->add_option("--J", J, "Number of test locations (fscd, fscd-opt)")->check(CLI::PositiveNumber);
    app->add_option("--train-frac", train_frac, "Training fraction for fscd-opt")->check(CLI::Range(0.0, 1.0));
    app->add_option("--steps", steps, "Adam steps for fscd-opt")->check(CLI::NonNegativeNumber);
    app->add_option("--lr", learning_rate, "Adam learning rate for fscd-opt")->check(CLI::PositiveNumber);
    app->add_option("--gradient", gradient, "analytic | finite_difference")
        ->check(CLI::IsMember({"analytic", "finite_difference"}));
  }

  TestConfig config() const {
    TestConfig c;
    c.method = parse_method(method);
    c.J = J;
    c.bootstrap_reps = bootstrap;
    c.permutations = bootstrap;
    c.opt.train_fraction = train_frac;
    c.opt.steps = steps;
    c.opt.learning_rate = learning_rate;
    c.opt.gradient_mode = gradient == "analytic" ? GradientMode::Analytic : GradientMode::FiniteDifference;
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel conditional goodness-of-fit tests (KCSD, FSCD, MMD baseline)"};
  app.require_subcommand(1);

  // test
  CommonTestOptions test_opts;
  std::string data_path, model_path;
  std::uint64_t test_seed = 0;
  CLI::App* test_cmd = app.add_subcommand("test", "Run one test on a CSV sample against a model config");
  test_opts.attach(test_cmd);
  test_cmd->add_option("--data", data_path, "CSV with columns x1..x{dx},y1..y{dy}")->required();
  test_cmd->add_option("--model", model_path, "Model config (JSON)")->required();
  test_cmd->add_option("--seed", test_seed, "Random seed");

  // experiment
  CommonTestOptions exp_opts;
  std::string exp_problem = "lgm", n_list_text = "200,400", out_dir;
  int trials = 300;
  std::uint64_t exp_seed = 0;
  bool timing = false;
  CLI::App* exp_cmd = app.add_subcommand("experiment", "Rejection rates on a synthetic problem");
  exp_opts.attach(exp_cmd);
  exp_cmd->add_option("--problem", exp_problem, "Problem name")->check(CLI::IsMember(problem_names()));
  exp_cmd->add_option("--n-list", n_list_text, "Comma-separated sample sizes");
  exp_cmd->add_option("--trials", trials, "Trials per sample size")->check(CLI::PositiveNumber);
  exp_cmd->add_option("--seed", exp_seed, "Master seed");
  exp_cmd->add_option("--out", out_dir, "Output directory for report.json and rates.csv")->required();
  exp_cmd->add_flag("--timing", timing, "Include per-trial wall-clock seconds in report.json");

  // landscape
  std::string land_problem = "hgm1d", land_out;
  double grid_min = -3.0, grid_max = 3.0;
  Index grid_points = 61, land_n = 800;
  std::uint64_t land_seed = 0;
  CLI::App* land_cmd = app.add_subcommand("landscape", "Power criterion (J = 1) along a grid of locations");
  land_cmd->add_option("--problem", land_problem, "Problem name")->check(CLI::IsMember(problem_names()));
  land_cmd->add_option("--grid-min", grid_min, "Grid start");
  land_cmd->add_option("--grid-max", grid_max, "Grid end");
  land_cmd->add_option("--grid-points", grid_points, "Number of grid points")->check(CLI::PositiveNumber);
  land_cmd->add_option("--n", land_n, "Sample size")->check(CLI::Range(Index{4}, Index{1} << 40));
  land_cmd->add_option("--seed", land_seed, "Sample seed");
  land_cmd->add_option("--out", land_out, "Output CSV (v,criterion)")->required();

  // generate
  std::string gen_problem = "lgm", gen_data, gen_model;
  Index gen_n = 300;
  std::uint64_t gen_seed = 0;
  CLI::App* gen_cmd = app.add_subcommand("generate", "Write a synthetic sample and its null model config");
  gen_cmd->add_option("--problem", gen_problem, "Problem name")->check(CLI::IsMember(problem_names()));
  gen_cmd->add_option("--n", gen_n, "Sample size")->check(CLI::Range(Index{4}, Index{1} << 40));
  gen_cmd->add_option("--seed", gen_seed, "Sample seed");
  gen_cmd->add_option("--data", gen_data, "Output CSV")->required();
  gen_cmd->add_option("--model", gen_model, "Output model config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*test_cmd) {
      const ConditionalModel model = load_model_file(model_path);
      const JointSample sample = load_sample(data_path, model.dx(), model.dy());
      const TestResult result = run_configured_test(test_opts.config(), model, sample, test_opts.alpha, test_seed);
      std::cout << to_json(result).dump(2) << '\n';
    } else if (*exp_cmd) {
      const ProblemSpec problem = problem_by_name(exp_problem);
      const ExperimentReport report =
          run_experiment(problem, exp_opts.config(), parse_n_list(n_list_text), trials, exp_opts.alpha, exp_seed);
      std::filesystem::create_directories(out_dir);
      write_file(std::filesystem::path(out_dir) / "report.json", to_json(report, timing).dump(2) + "\n");
      write_file(std::filesystem::path(out_dir) / "rates.csv", rates_csv(report));
      std::cout << rates_csv(report);
    } else if (*land_cmd) {
      const auto [problem, sample] = make_problem(land_problem, land_n, land_seed);
      const Matrix grid = line_grid(sample.dx(), grid_min, grid_max, grid_points);
      const auto points = powcri_landscape(problem.model, sample, grid);
      std::string text = "v,criterion\n";
      for (const auto& p : points) text += shortest(p.v[0]) + ',' + shortest(p.criterion) + '\n';
      write_file(land_out, text);
    } else if (*gen_cmd) {
      const auto [problem, sample] = make_problem(gen_problem, gen_n, gen_seed);
      save_sample(gen_data, sample);
      write_file(gen_model, model_to_json(problem.model).dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
