#include "contractforge/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "contractforge/errors.hpp"
#include "contractforge/numeric.hpp"

namespace contractforge {

namespace {

using Json = nlohmann::ordered_json;

class Parser {
 public:
  Parser(const std::string& text, std::filesystem::path origin)
      : text_(text), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    std::string where = origin_.empty() ? "<config>" : origin_.string();
    const auto slash = path.find_last_of('/');
    const std::string key = slash == std::string::npos ? path : path.substr(slash + 1);
    if (!key.empty()) {
      const auto pos = text_.find("\"" + key + "\"");
      if (pos != std::string::npos) {
        where += ":" + std::to_string(1 + std::count(text_.begin(), text_.begin() +
                                                         static_cast<std::ptrdiff_t>(pos), '\n'));
      }
    }
    throw ConfigError(where + ": key '" + (path.empty() ? "/" : path) + "': " + what);
  }

  void allow(const Json& obj, const std::string& path, std::initializer_list<const char*> keys) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [k, v] : obj.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
        fail(path + "/" + k, "unknown key");
      }
    }
  }

  const Json& need(const Json& obj, const std::string& path, const char* key) const {
    if (!obj.contains(key)) fail(path + "/" + key, "missing required key");
    return obj.at(key);
  }

  double number(const Json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "expected a finite number");
    return x;
  }

  double need_number(const Json& obj, const std::string& path, const char* key) const {
    return number(need(obj, path, key), path + "/" + key);
  }

  std::optional<double> opt_number(const Json& obj, const std::string& path, const char* key) const {
    if (!obj.contains(key)) return std::nullopt;
    return number(obj.at(key), path + "/" + key);
  }

  std::size_t count(const Json& v, const std::string& path) const {
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(path, "expected a non-negative integer");
    return v.get<std::size_t>();
  }

  std::string str(const Json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const Json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "/" + std::to_string(i)));
    return out;
  }

  // Either an explicit list or {from, to, count} (linear).
  std::vector<double> values_or_range(const Json& v, const std::string& path) const {
    if (v.is_array()) return numbers(v, path);
    allow(v, path, {"from", "to", "count"});
    const double from = need_number(v, path, "from");
    const double to = need_number(v, path, "to");
    const std::size_t n = count(need(v, path, "count"), path + "/count");
    if (n < 1) fail(path + "/count", "must be at least 1");
    return numeric::linspace(from, to, n);
  }

  template <class F>
  auto guarded(const std::string& path, F&& f) const {
    try {
      return f();
    } catch (const ConfigError& e) {
      fail(path, e.what());
    } catch (const std::domain_error& e) {
      fail(path, e.what());
    }
  }

  RunConfig parse() const {
    Json root;
    try {
      root = Json::parse(text_);
    } catch (const Json::parse_error& e) {
      const std::size_t byte = std::min<std::size_t>(e.byte, text_.size());
      const auto line = 1 + std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(byte), '\n');
      throw ConfigError((origin_.empty() ? std::string("<config>") : origin_.string()) + ":" +
                        std::to_string(line) + ": JSON syntax error: " + e.what());
    }
    allow(root, "", {"description", "cost", "u1", "working_interval", "grid", "types", "incentive",
                     "adjustment", "rho", "prior", "design", "sweep", "validate", "threads", "seed"});
    RunConfig cfg;
    cfg.source = origin_;
    cfg.raw = root;

    const auto& cost = need(root, "", "cost");
    cfg.cost = parse_cost(cost, "/cost");
    cfg.u1 = need_number(root, "", "u1");
    if (!cfg.cost->incentive_domain().contains(cfg.u1)) fail("/u1", "must lie in the incentive domain");

    if (root.contains("working_interval")) {
      const auto wi = numbers(root["working_interval"], "/working_interval");
      if (wi.size() != 2 || !(wi[0] < wi[1])) fail("/working_interval", "expected [a_min, a_max] with a_min < a_max");
      cfg.a_min = wi[0];
      cfg.a_max = wi[1];
    } else if (cfg.cost->family() == CostFamily::Tabulated) {
      cfg.a_min = cfg.cost->action_domain().lo;
      cfg.a_max = cfg.cost->action_domain().hi;
    }
    if (root.contains("grid")) {
      const auto& g = root["grid"];
      allow(g, "/grid", {"action_grid_size", "refine_iters", "bregman_grid_size", "gain_tolerance"});
      if (g.contains("action_grid_size")) cfg.action_grid_size = count(g["action_grid_size"], "/grid/action_grid_size");
      if (g.contains("refine_iters")) cfg.refine_iters = static_cast<int>(count(g["refine_iters"], "/grid/refine_iters"));
      if (g.contains("bregman_grid_size")) cfg.bregman_grid_size = count(g["bregman_grid_size"], "/grid/bregman_grid_size");
      if (auto tol = opt_number(g, "/grid", "gain_tolerance")) cfg.gain_tolerance = *tol;
    }
    if (root.contains("validate")) {
      allow(root["validate"], "/validate", {"samples"});
      if (root["validate"].contains("samples")) cfg.validate_samples = count(root["validate"]["samples"], "/validate/samples");
    }
    if (root.contains("threads")) cfg.threads = count(root["threads"], "/threads");
    if (root.contains("seed")) cfg.seed = count(root["seed"], "/seed");
    if (root.contains("types")) cfg.types = parse_types(root["types"], "/types");
    if (root.contains("incentive")) cfg.incentive = parse_incentive(root["incentive"], "/incentive");
    if (root.contains("adjustment")) cfg.adjustment = parse_adjustment(root["adjustment"], "/adjustment");
    if (root.contains("rho")) cfg.rho = parse_rho(root["rho"], "/rho");
    if (root.contains("prior")) cfg.prior = parse_prior(root["prior"], "/prior");
    if (root.contains("design")) {
      const auto& d = root["design"];
      allow(d, "/design", {"theta_L", "theta_H", "u_L", "u_H", "t"});
      DesignSpec spec{need_number(d, "/design", "theta_L"), need_number(d, "/design", "theta_H"),
                      need_number(d, "/design", "u_L"), need_number(d, "/design", "u_H"),
                      opt_number(d, "/design", "t")};
      if (!(spec.theta_L > 0.0 && spec.theta_L < spec.theta_H)) fail("/design", "need 0 < theta_L < theta_H");
      if (!(spec.u_L > 0.0 && spec.u_H > 0.0)) fail("/design", "incentives must be positive");
      cfg.design = spec;
    }
    if (root.contains("sweep")) {
      const auto& s = root["sweep"];
      allow(s, "/sweep", {"parameter", "values"});
      SweepSpec spec{str(need(s, "/sweep", "parameter"), "/sweep/parameter"),
                     values_or_range(need(s, "/sweep", "values"), "/sweep/values")};
      if (spec.parameter != "theta" && spec.parameter != "t" && spec.parameter != "u_L") {
        fail("/sweep/parameter", "expected one of theta, t, u_L");
      }
      cfg.sweep = spec;
    }
    guarded("/working_interval", [&] {
      cfg.contract().validate();
      return 0;
    });
    return cfg;
  }

 private:
  CostModel parse_cost(const Json& c, const std::string& path) const {
    const std::string family = str(need(c, path, "family"), path + "/family");
    if (family == "quadratic") {
      allow(c, path, {"family"});
      return CostModel::quadratic();
    }
    if (family == "power") {
      allow(c, path, {"family", "p"});
      const double p = need_number(c, path, "p");
      return guarded(path + "/p", [&] { return CostModel::power(p); });
    }
    if (family == "tabulated") {
      allow(c, path, {"family", "csv"});
      std::filesystem::path csv = str(need(c, path, "csv"), path + "/csv");
      if (csv.is_relative() && !origin_.empty()) csv = origin_.parent_path() / csv;
      return guarded(path + "/csv", [&] { return CostModel::from_csv(csv); });
    }
    fail(path + "/family", "expected quadratic, power or tabulated");
  }

  TypeSpec parse_types(const Json& t, const std::string& path) const {
    const std::string kind = str(need(t, path, "kind"), path + "/kind");
    TypeSpec spec;
    if (kind == "discrete") {
      allow(t, path, {"kind", "thetas"});
      spec.kind = TypeSpec::Kind::Discrete;
      spec.thetas = numbers(need(t, path, "thetas"), path + "/thetas");
      if (spec.thetas.empty()) fail(path + "/thetas", "need at least one type");
    } else if (kind == "continuous") {
      allow(t, path, {"kind", "min", "max", "samples"});
      spec.kind = TypeSpec::Kind::Continuous;
      spec.lo = need_number(t, path, "min");
      spec.hi = need_number(t, path, "max");
      const std::size_t n = count(need(t, path, "samples"), path + "/samples");
      if (!(spec.lo > 0.0 && spec.hi > spec.lo) || n < 2) fail(path, "need 0 < min < max and samples >= 2");
      spec.thetas = numeric::logspace(spec.lo, spec.hi, n);
    } else {
      fail(path + "/kind", "expected discrete or continuous");
    }
    for (double th : spec.thetas) {
      if (!(th > 0.0)) fail(path, "types must be positive");
    }
    std::sort(spec.thetas.begin(), spec.thetas.end());
    if (std::adjacent_find(spec.thetas.begin(), spec.thetas.end()) != spec.thetas.end()) {
      fail(path, "types must be distinct");
    }
    return spec;
  }

  IncentiveFunction parse_incentive(const Json& i, const std::string& path) const {
    const std::string kind = str(need(i, path, "kind"), path + "/kind");
    return guarded(path, [&]() -> IncentiveFunction {
      if (kind == "constant") {
        allow(i, path, {"kind", "u"});
        return IncentiveFunction::constant(need_number(i, path, "u"));
      }
      if (kind == "step") {
        allow(i, path, {"kind", "t", "u_above", "u_below"});
        return IncentiveFunction::two_type_step(need_number(i, path, "t"), need_number(i, path, "u_above"),
                                                need_number(i, path, "u_below"));
      }
      if (kind == "piecewise_linear") {
        allow(i, path, {"kind", "knots", "values"});
        return IncentiveFunction::piecewise_linear(numbers(need(i, path, "knots"), path + "/knots"),
                                                   numbers(need(i, path, "values"), path + "/values"));
      }
      if (kind == "staircase") {
        allow(i, path, {"kind", "thresholds", "levels"});
        return IncentiveFunction::staircase(numbers(need(i, path, "thresholds"), path + "/thresholds"),
                                            numbers(need(i, path, "levels"), path + "/levels"));
      }
      fail(path + "/kind", "expected constant, step, piecewise_linear or staircase");
    });
  }

  AdjustmentSpec parse_adjustment(const Json& a, const std::string& path) const {
    allow(a, path, {"a_ref", "nodes", "consistency_tol", "breakdown"});
    AdjustmentSpec spec;
    spec.a_ref = opt_number(a, path, "a_ref");
    if (a.contains("nodes")) spec.nodes = count(a["nodes"], path + "/nodes");
    if (auto tol = opt_number(a, path, "consistency_tol")) spec.consistency_tol = *tol;
    if (a.contains("breakdown")) {
      const auto& b = a["breakdown"];
      const std::string bp = path + "/breakdown";
      allow(b, bp, {"cap", "a1", "theta_scan"});
      spec.breakdown = BreakdownSpec{need_number(b, bp, "cap"), need_number(b, bp, "a1"),
                                     values_or_range(need(b, bp, "theta_scan"), bp + "/theta_scan")};
    }
    return spec;
  }

  PrincipalBenefit parse_rho(const Json& r, const std::string& path) const {
    const std::string kind = str(need(r, path, "kind"), path + "/kind");
    return guarded(path, [&]() -> PrincipalBenefit {
      if (kind == "linear") {
        allow(r, path, {"kind", "k"});
        return PrincipalBenefit::linear(need_number(r, path, "k"));
      }
      if (kind == "power") {
        allow(r, path, {"kind", "coeff", "exponent"});
        return PrincipalBenefit::power(need_number(r, path, "coeff"), need_number(r, path, "exponent"));
      }
      if (kind == "tabulated") {
        allow(r, path, {"kind", "a", "rho"});
        return PrincipalBenefit::tabulated(numbers(need(r, path, "a"), path + "/a"),
                                           numbers(need(r, path, "rho"), path + "/rho"));
      }
      fail(path + "/kind", "expected linear, power or tabulated");
    });
  }

  TypePrior parse_prior(const Json& p, const std::string& path) const {
    const std::string kind = str(need(p, path, "kind"), path + "/kind");
    return guarded(path, [&]() -> TypePrior {
      if (kind == "discrete") {
        allow(p, path, {"kind", "support"});
        const auto& s = need(p, path, "support");
        if (!s.is_array()) fail(path + "/support", "expected [[theta, weight], ...]");
        std::vector<TypePrior::Node> nodes;
        for (std::size_t i = 0; i < s.size(); ++i) {
          const auto pair = numbers(s[i], path + "/support/" + std::to_string(i));
          if (pair.size() != 2) fail(path + "/support/" + std::to_string(i), "expected [theta, weight]");
          nodes.push_back({pair[0], pair[1]});
        }
        return TypePrior(std::move(nodes));
      }
      if (kind == "uniform") {
        allow(p, path, {"kind", "min", "max", "nodes"});
        const std::size_t n = p.contains("nodes") ? count(p["nodes"], path + "/nodes") : 33;
        return TypePrior::uniform(need_number(p, path, "min"), need_number(p, path, "max"), n);
      }
      if (kind == "lognormal") {
        allow(p, path, {"kind", "mu", "sigma", "nodes"});
        const std::size_t n = p.contains("nodes") ? count(p["nodes"], path + "/nodes") : 33;
        return TypePrior::lognormal(need_number(p, path, "mu"), need_number(p, path, "sigma"), n);
      }
      fail(path + "/kind", "expected discrete, uniform or lognormal");
    });
  }

  const std::string& text_;
  std::filesystem::path origin_;
};

}  // namespace

ContractConfig RunConfig::contract() const {
  if (!cost) throw ConfigError("run configuration has no cost model");
  ContractConfig c(u1, *cost);
  c.a_min = a_min;
  c.a_max = a_max;
  c.action_grid_size = action_grid_size;
  c.refine_iters = refine_iters;
  c.workers = threads;
  c.gain_tolerance = gain_tolerance;
  return c;
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& origin) {
  return Parser(text, origin).parse();
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path);
}

}  // namespace contractforge
