#include "kcgof/model_config.hpp"

#include <cmath>
#include <fstream>
#include <string>

namespace kcgof {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

const json& field(const json& obj, const std::string& name, const std::string& path) {
  auto it = obj.find(name);
  if (it == obj.end()) fail(path + name, "missing required field");
  return *it;
}

double number(const json& value, const std::string& path) {
  if (!value.is_number()) fail(path, "expected a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

double number_or(const json& obj, const std::string& name, double fallback, const std::string& path) {
  auto it = obj.find(name);
  return it == obj.end() ? fallback : number(*it, path + name);
}

Vector vector_field(const json& obj, const std::string& name, const std::string& path) {
  const json& arr = field(obj, name, path);
  if (!arr.is_array() || arr.empty()) fail(path + name, "expected a nonempty array of numbers");
  Vector v(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    v[static_cast<Index>(i)] = number(arr[i], path + name + "[" + std::to_string(i) + "]");
  }
  return v;
}

double positive(double v, const std::string& path) {
  if (!(v > 0.0)) fail(path, "must be positive, got " + std::to_string(v));
  return v;
}

void check_dim(const json& config, const char* name, Index actual) {
  auto it = config.find(name);
  if (it == config.end()) return;
  if (!it->is_number_integer() || it->get<long long>() != actual) {
    fail(name, "does not match the model parameters (expected " + std::to_string(actual) + ")");
  }
}

json vec_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace

ConditionalModel load_model(const json& config) {
  if (!config.is_object()) fail("$", "model config must be an object");
  const json& kind_node = field(config, "kind", "");
  if (!kind_node.is_string()) fail("kind", "expected a string");
  const std::string kind = kind_node.get<std::string>();

  auto build = [&]() -> ConditionalModel {
    if (kind == "linear_gaussian") {
      LinearGaussian m;
      m.coeffs = vector_field(config, "coeffs", "");
      m.intercept = number_or(config, "intercept", 0.0, "");
      m.noise_var = positive(number_or(config, "noise_var", 1.0, ""), "noise_var");
      return ConditionalModel(std::move(m));
    }
    if (kind == "hetero_gaussian") {
      HeteroGaussian m;
      m.coeffs = vector_field(config, "coeffs", "");
      m.intercept = number_or(config, "intercept", 0.0, "");
      m.base_var = positive(number(field(config, "base_var", ""), "base_var"), "base_var");
      m.bump_height = number(field(config, "bump_height", ""), "bump_height");
      if (m.bump_height < 0.0) fail("bump_height", "must be nonnegative");
      m.bump_center = vector_field(config, "bump_center", "");
      if (m.bump_center.size() != m.coeffs.size()) fail("bump_center", "length must equal coeffs length");
      m.bump_width = positive(number(field(config, "bump_width", ""), "bump_width"), "bump_width");
      return ConditionalModel(std::move(m));
    }
    if (kind == "quad_gaussian") {
      QuadGaussian m;
      m.a = number(field(config, "a", ""), "a");
      m.b = number(field(config, "b", ""), "b");
      m.c = number(field(config, "c", ""), "c");
      m.noise_var = positive(number_or(config, "noise_var", 1.0, ""), "noise_var");
      return ConditionalModel(m);
    }
    if (kind == "cond_gauss_mixture") {
      const json& dx_node = field(config, "dx", "");
      if (!dx_node.is_number_integer() || dx_node.get<long long>() < 1) fail("dx", "expected a positive integer");
      const json& comps = field(config, "components", "");
      if (!comps.is_array() || comps.empty()) fail("components", "expected a nonempty array");
      CondGaussMixture m;
      double total = 0.0;
      Index dy = -1;
      for (std::size_t c = 0; c < comps.size(); ++c) {
        const std::string path = "components[" + std::to_string(c) + "].";
        if (!comps[c].is_object()) fail(path.substr(0, path.size() - 1), "expected an object");
        MixtureComponent comp;
        comp.weight = number(field(comps[c], "weight", path), path + "weight");
        if (comp.weight < 0.0) fail(path + "weight", "must be nonnegative");
        comp.mean = vector_field(comps[c], "mean", path);
        comp.vars = vector_field(comps[c], "vars", path);
        if (comp.vars.size() != comp.mean.size()) fail(path + "vars", "length must equal mean length");
        for (Index t = 0; t < comp.vars.size(); ++t) {
          positive(comp.vars[t], path + "vars[" + std::to_string(t) + "]");
        }
        if (dy < 0) dy = comp.mean.size();
        if (comp.mean.size() != dy) fail(path + "mean", "all components must share one dimension");
        total += comp.weight;
        m.components.push_back(std::move(comp));
      }
      if (std::abs(total - 1.0) > 1e-9) fail("components", "weights must sum to 1 (got " + std::to_string(total) + ")");
      return ConditionalModel(std::move(m), static_cast<Index>(dx_node.get<long long>()));
    }
    fail("kind", "unknown model kind '" + kind + "'");
  };

  try {
    ConditionalModel model = build();
    check_dim(config, "dx", model.dx());
    check_dim(config, "dy", model.dy());
    return model;
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

ConditionalModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open model config");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return load_model(doc);
}

json model_to_json(const ConditionalModel& model) {
  json out;
  out["kind"] = std::string(to_string(model.kind()));
  out["dx"] = model.dx();
  out["dy"] = model.dy();
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearGaussian>) {
          out["coeffs"] = vec_json(m.coeffs);
          out["intercept"] = m.intercept;
          out["noise_var"] = m.noise_var;
        } else if constexpr (std::is_same_v<T, HeteroGaussian>) {
          out["coeffs"] = vec_json(m.coeffs);
          out["intercept"] = m.intercept;
          out["base_var"] = m.base_var;
          out["bump_height"] = m.bump_height;
          out["bump_center"] = vec_json(m.bump_center);
          out["bump_width"] = m.bump_width;
        } else if constexpr (std::is_same_v<T, QuadGaussian>) {
          out["a"] = m.a;
          out["b"] = m.b;
          out["c"] = m.c;
          out["noise_var"] = m.noise_var;
        } else {
          json comps = json::array();
          for (const auto& c : m.components) {
            comps.push_back({{"weight", c.weight}, {"mean", vec_json(c.mean)}, {"vars", vec_json(c.vars)}});
          }
          out["components"] = std::move(comps);
        }
      },
      model.params());
  return out;
}

}  // namespace kcgof
