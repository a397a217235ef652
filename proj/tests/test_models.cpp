#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "kcgof/model_config.hpp"
#include "kcgof/models.hpp"
#include "kcgof/problems.hpp"
#include "oracles.hpp"

using namespace kcgof;
using kcgof::testing::central_difference;
using kcgof::testing::relative_error;
using nlohmann::json;

namespace {

ConditionalModel lgm() { return problem_by_name("lgm").model; }

std::vector<double> vec(std::initializer_list<double> v) { return v; }

}  // namespace

TEST(Score, Examples) {
  EXPECT_EQ(lgm().score(std::vector<double>(5, 0.0), vec({0}))[0], 0.0);
  EXPECT_DOUBLE_EQ(lgm().score(vec({1, 0, 0, 0, 0}), vec({3}))[0], -2.0);
  const ConditionalModel hgm = problem_by_name("hgm").model;
  const std::vector<double> c(3, 2.0 / 3.0);
  EXPECT_EQ(hgm.score(c, vec({2}))[0], 0.0);
}

TEST(Score, DimensionMismatch) {
  EXPECT_THROW(lgm().score(vec({1, 2}), vec({0})), InputShapeError);
  EXPECT_THROW(lgm().score(std::vector<double>(5, 0.0), vec({0, 1})), InputShapeError);
}

TEST(Score, MatchesFiniteDifferenceOfLogDensity) {
  Rng rng(21);
  std::normal_distribution<double> normal(0.0, 1.5);
  std::vector<ConditionalModel> models = kcgof::testing::builtin_models();
  for (const auto& name : problem_names()) models.push_back(problem_by_name(name).data_model);
  for (const auto& model : models) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x(static_cast<std::size_t>(model.dx())), y(static_cast<std::size_t>(model.dy()));
      for (auto& v : x) v = normal(rng);
      for (auto& v : y) v = normal(rng);
      const Vector s = model.score(x, y);
      ASSERT_TRUE(s.allFinite());
      for (std::size_t t = 0; t < y.size(); ++t) {
        const double fd = central_difference(
            [&](std::span<const double> p) { return model.log_density(x, p); }, y, t, 1e-5);
        EXPECT_LE(relative_error(s[static_cast<Index>(t)], fd), 1e-5) << to_string(model.kind());
      }
    }
  }
}

TEST(Score, SingleComponentMixtureEqualsGaussian) {
  Rng rng(22);
  std::normal_distribution<double> normal;
  CondGaussMixture mix;
  mix.components.push_back({1.0, Vector::Constant(1, 0.7), Vector::Constant(1, 1.9)});
  const ConditionalModel m(mix, 2);
  const ConditionalModel g(LinearGaussian{Vector::Zero(2), 0.7, 1.9});
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> x{normal(rng), normal(rng)};
    const std::vector<double> y{3.0 * normal(rng)};
    EXPECT_EQ(m.score(x, y)[0], g.score(x, y)[0]);
  }
}

TEST(Score, MixtureFarTailStaysFinite) {
  CondGaussMixture mix;
  mix.components.push_back({0.5, Vector::Constant(1, -1.0), Vector::Constant(1, 0.01)});
  mix.components.push_back({0.5, Vector::Constant(1, 1.0), Vector::Constant(1, 0.01)});
  const ConditionalModel m(mix, 1);
  EXPECT_TRUE(std::isfinite(m.score(vec({0}), vec({1e3}))[0]));
  EXPECT_NEAR(m.score(vec({0}), vec({1e3}))[0], (1.0 - 1e3) / 0.01, 1e-6 * 1e5);
}

TEST(Sample, LgmMean) {
  const ConditionalModel m = lgm();
  const std::vector<double> x{0.5, -0.2, 0.1, 0.3, -0.4};
  Rng rng(23);
  constexpr int draws = 100000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += m.sample(x, rng)[0];
  const double mean = 0.5 - 0.4 + 0.3 + 1.2 - 2.0;
  EXPECT_NEAR(sum / draws, mean, 3.0 / std::sqrt(static_cast<double>(draws)));
}

TEST(Sample, SingleComponentMixtureVariance) {
  CondGaussMixture mix;
  mix.components.push_back({1.0, Vector::Constant(1, 2.0), Vector::Constant(1, 2.5)});
  const ConditionalModel m(mix, 1);
  Rng rng(24);
  constexpr int draws = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double v = m.sample(vec({0}), rng)[0];
    s += v;
    s2 += v * v;
  }
  const double mean = s / draws;
  const double var = (s2 - draws * mean * mean) / (draws - 1);
  EXPECT_NEAR(var, 2.5, 0.05 * 2.5);
}

TEST(Sample, QgmDataLawMean) {
  const ConditionalModel r = problem_by_name("qgm").data_model;
  Rng rng(25);
  constexpr int draws = 100000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += r.sample(vec({0}), rng)[0];
  EXPECT_NEAR(sum / draws, 1.0, 3.0 / std::sqrt(static_cast<double>(draws)));
}

TEST(Sample, DeterministicGivenGenerator) {
  const ConditionalModel m = kcgof::testing::builtin_models().back();
  Rng a(5), b(5);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(m.sample(vec({0, 0}), a), m.sample(vec({0, 0}), b));
}

TEST(SteinIdentity, ProbeMeansVanish) {
  Rng rng(26);
  std::normal_distribution<double> normal;
  for (const auto& model : kcgof::testing::builtin_models()) {
    std::vector<double> x(static_cast<std::size_t>(model.dx()));
    for (auto& v : x) v = normal(rng);
    const GaussKernel l(1.0);
    const Index dy = model.dy();
    constexpr int draws = 20000;
    for (int probe = 0; probe < 5; ++probe) {
      const Vector centre = model.sample(x, rng);
      std::vector<double> w(centre.data(), centre.data() + dy);
      Vector sum = Vector::Zero(dy), sum2 = Vector::Zero(dy);
      for (int i = 0; i < draws; ++i) {
        const Vector y = model.sample(x, rng);
        const Vector xi = kcgof::testing::stein_xi(model, l, x, as_span(y), w);
        sum += xi;
        sum2 += xi.cwiseProduct(xi);
      }
      for (Index t = 0; t < dy; ++t) {
        const double mean = sum[t] / draws;
        const double se = std::sqrt((sum2[t] / draws - mean * mean) / draws);
        EXPECT_LE(std::abs(mean), 4.0 * se) << to_string(model.kind()) << " probe " << probe;
      }
    }
  }
}

TEST(LoadModel, Examples) {
  const ConditionalModel m =
      load_model(json::parse(R"({"kind":"linear_gaussian","coeffs":[1,2,3,4,5],"noise_var":1.0})"));
  EXPECT_EQ(m.kind(), ModelKind::LinearGaussian);
  EXPECT_EQ(m.dx(), 5);
  EXPECT_DOUBLE_EQ(m.score(vec({1, 0, 0, 0, 0}), vec({3}))[0], -2.0);

  const ConditionalModel mix = load_model(json::parse(
      R"({"kind":"cond_gauss_mixture","dx":2,"components":[{"weight":1.0,"mean":[0],"vars":[1]}]})"));
  EXPECT_EQ(mix.kind(), ModelKind::CondGaussMixture);
  EXPECT_EQ(mix.dx(), 2);
  EXPECT_EQ(mix.dy(), 1);

  EXPECT_THROW(load_model(json::parse(R"({"kind":"linear_gaussian","noise_var":-1})")), ParseError);
}

TEST(LoadModel, ErrorsNameTheField) {
  auto message = [](const char* text) -> std::string {
    try {
      load_model(json::parse(text));
    } catch (const ParseError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_EQ(message(R"({"kind":"linear_gaussian","coeffs":[1],"noise_var":-1})").rfind("noise_var", 0), 0u);
  EXPECT_EQ(message(R"({"kind":"banana"})").rfind("kind", 0), 0u);
  EXPECT_EQ(message(R"({"kind":"cond_gauss_mixture","dx":1,"components":[{"weight":1,"mean":[0,0],"vars":[1,-1]}]})")
                .rfind("components[0].vars[1]", 0),
            0u);
  EXPECT_NE(message(R"({"kind":"cond_gauss_mixture","dx":1,"components":[{"weight":0.5,"mean":[0],"vars":[1]}]})"),
            "");
  EXPECT_NE(message(R"({"kind":"linear_gaussian","coeffs":[1,2],"dx":3})"), "");
}

TEST(LoadModel, RoundTrip) {
  for (const auto& model : kcgof::testing::builtin_models()) {
    const json doc = model_to_json(model);
    const ConditionalModel back = load_model(doc);
    EXPECT_EQ(model_to_json(back), doc);
    EXPECT_EQ(back.dx(), model.dx());
    EXPECT_EQ(back.dy(), model.dy());
  }
}

TEST(MakeProblem, Examples) {
  const auto [p1, a] = make_problem("lgm", 100, 7);
  const auto [p2, b] = make_problem("lgm", 100, 7);
  EXPECT_EQ(a.xs(), b.xs());
  EXPECT_EQ(a.ys(), b.ys());
  EXPECT_TRUE(p1.h0_true);

  const auto [q, qs] = make_problem("qgm", 2000, 3);
  EXPECT_GT(qs.xs().minCoeff(), -2.0);
  EXPECT_LT(qs.xs().maxCoeff(), 2.0);
  EXPECT_FALSE(q.h0_true);

  EXPECT_FALSE(make_problem("hgm", 10, 1).first.h0_true);
  EXPECT_THROW(make_problem("nope", 10, 1), std::invalid_argument);
  EXPECT_THROW(make_problem("lgm", 3, 1), std::invalid_argument);
}

TEST(MakeProblem, DifferentSeedsDiffer) {
  EXPECT_NE(make_problem("hgm", 50, 1).second.xs(), make_problem("hgm", 50, 2).second.xs());
}
