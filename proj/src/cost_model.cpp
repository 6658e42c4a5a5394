#include "contractforge/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "contractforge/errors.hpp"
#include "contractforge/numeric.hpp"

namespace contractforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_value(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

// Three-point slopes, exact for quadratic data on non-uniform grids.
std::vector<double> node_slopes(const std::vector<double>& a, const std::vector<double>& phi) {
  const std::size_t n = a.size();
  std::vector<double> d(n);
  auto three_point = [&](std::size_t i0, std::size_t i1, std::size_t i2, double at) {
    // derivative at `at` of the parabola through three samples
    const double x0 = a[i0], x1 = a[i1], x2 = a[i2];
    const double l0 = ((at - x1) + (at - x2)) / ((x0 - x1) * (x0 - x2));
    const double l1 = ((at - x0) + (at - x2)) / ((x1 - x0) * (x1 - x2));
    const double l2 = ((at - x0) + (at - x1)) / ((x2 - x0) * (x2 - x1));
    return l0 * phi[i0] + l1 * phi[i1] + l2 * phi[i2];
  };
  d[0] = three_point(0, 1, 2, a[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = three_point(i - 1, i, i + 1, a[i]);
  d[n - 1] = three_point(n - 3, n - 2, n - 1, a[n - 1]);
  return d;
}

}  // namespace

CostModel CostModel::quadratic() { return CostModel(CostFamily::Quadratic, Analytic{2.0}); }

CostModel CostModel::power(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("power cost needs exponent p > 1");
  return CostModel(CostFamily::Power, Analytic{p});
}

CostModel CostModel::tabulated(std::vector<double> actions, std::vector<double> costs) {
  if (actions.size() != costs.size()) throw ConfigError("tabulated cost: column lengths differ");
  if (actions.size() < 16) throw ConfigError("tabulated cost: at least 16 rows required");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (!std::isfinite(actions[i]) || !std::isfinite(costs[i])) {
      throw ConfigError("tabulated cost: non-finite value in row " + std::to_string(i + 1));
    }
    if (i > 0 && !(actions[i] > actions[i - 1])) {
      throw ConfigError("tabulated cost: action column must be strictly increasing (row " +
                        std::to_string(i + 1) + ")");
    }
  }
  auto table = std::make_shared<Table>();
  table->slope = node_slopes(actions, costs);
  table->phi.resize(actions.size());
  table->phi[0] = costs[0];
  for (std::size_t i = 1; i < actions.size(); ++i) {
    const double h = actions[i] - actions[i - 1];
    table->phi[i] = table->phi[i - 1] + 0.5 * h * (table->slope[i - 1] + table->slope[i]);
  }
  table->a = std::move(actions);
  return CostModel(CostFamily::Tabulated, std::shared_ptr<const Table>(std::move(table)));
}

CostModel CostModel::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open cost table " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "a,phi") {
    throw ConfigError(path.string() + ":1: expected header 'a,phi', got '" + line + "'");
  }
  std::vector<double> a;
  std::vector<double> phi;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
    }
    try {
      std::size_t used = 0;
      const std::string first = line.substr(0, comma);
      const std::string second = line.substr(comma + 1);
      a.push_back(std::stod(first, &used));
      if (used != first.size()) throw std::invalid_argument(first);
      phi.push_back(std::stod(second, &used));
      if (used != second.size()) throw std::invalid_argument(second);
    } catch (const std::logic_error&) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  return tabulated(std::move(a), std::move(phi));
}

CostFamily CostModel::family() const { return family_; }

double CostModel::exponent() const {
  if (const auto* an = std::get_if<Analytic>(&repr_)) return an->p;
  return kNaN;
}

std::string CostModel::name() const {
  switch (family_) {
    case CostFamily::Quadratic:
      return "quadratic";
    case CostFamily::Power:
      return "power(p=" + fmt_value(exponent()) + ")";
    case CostFamily::Tabulated:
      return "tabulated(" + std::to_string(table().a.size()) + " rows)";
  }
  return "unknown";
}

const CostModel::Table& CostModel::table() const {
  return *std::get<std::shared_ptr<const Table>>(repr_);
}

Interval CostModel::action_domain() const {
  if (family_ == CostFamily::Tabulated) return {table().a.front(), table().a.back(), false, false};
  return {0.0, kInf, true, true};
}

Interval CostModel::incentive_domain() const {
  if (family_ == CostFamily::Tabulated) {
    return {table().slope.front(), table().slope.back(), false, false};
  }
  return {0.0, kInf, true, true};
}

void CostModel::require_action(double a, const char* op) const {
  if (family_ == CostFamily::Tabulated) {
    if (!action_domain().contains(a)) {
      throw DomainError(std::string(op) + ": action " + fmt_value(a) +
                        " outside the tabulated range");
    }
    return;
  }
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw DomainError(std::string(op) + ": action " + fmt_value(a) + " not in [0, inf)");
  }
}

void CostModel::require_incentive(double u, const char* op) const {
  if (!incentive_domain().contains(u)) {
    throw DomainError(std::string(op) + ": incentive " + fmt_value(u) +
                      " outside the incentive domain");
  }
}

std::size_t CostModel::cell(double a) const {
  const auto& xs = table().a;
  auto it = std::upper_bound(xs.begin(), xs.end(), a);
  std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
  return std::min(i, xs.size() - 2);
}

double CostModel::eval_cost(double a) const {
  require_action(a, "eval_cost");
  if (family_ == CostFamily::Quadratic) return 0.5 * a * a;
  if (family_ == CostFamily::Power) {
    const double p = exponent();
    return std::pow(a, p) / p;
  }
  const auto& t = table();
  const std::size_t i = cell(a);
  const double h = t.a[i + 1] - t.a[i];
  const double s = a - t.a[i];
  return t.phi[i] + t.slope[i] * s + (t.slope[i + 1] - t.slope[i]) * s * s / (2.0 * h);
}

double CostModel::eval_deriv(double a) const {
  require_action(a, "eval_deriv");
  if (family_ == CostFamily::Quadratic) return a;
  if (family_ == CostFamily::Power) return std::pow(a, exponent() - 1.0);
  const auto& t = table();
  const std::size_t i = cell(a);
  const double w = (a - t.a[i]) / (t.a[i + 1] - t.a[i]);
  return (1.0 - w) * t.slope[i] + w * t.slope[i + 1];
}

double CostModel::eval_second_deriv(double a) const {
  require_action(a, "eval_second_deriv");
  if (family_ == CostFamily::Quadratic) return 1.0;
  if (family_ == CostFamily::Power) {
    const double p = exponent();
    return (p - 1.0) * std::pow(a, p - 2.0);
  }
  const auto& t = table();
  const std::size_t i = cell(a);
  return (t.slope[i + 1] - t.slope[i]) / (t.a[i + 1] - t.a[i]);
}

double CostModel::inv_deriv(double u) const {
  require_incentive(u, "inv_deriv");
  if (family_ == CostFamily::Quadratic) return u;
  if (family_ == CostFamily::Power) return std::pow(u, 1.0 / (exponent() - 1.0));
  const auto& t = table();
  return numeric::bisect_increasing([this](double a) { return eval_deriv(a); }, u, t.a.front(),
                                    t.a.back(), 1e-10 / std::max(1.0, t.a.back()));
}

double CostModel::conjugate(double u) const {
  require_incentive(u, "conjugate");
  if (family_ == CostFamily::Quadratic) return 0.5 * u * u;
  if (family_ == CostFamily::Power) {
    const double p = exponent();
    const double q = p / (p - 1.0);
    return std::pow(u, q) / q;
  }
  // Concave objective u a - phi(a): coarse sup over the nodes, then refine
  // within the bracketing cells.
  const auto& t = table();
  std::vector<double> values(t.a.size());
  for (std::size_t i = 0; i < t.a.size(); ++i) values[i] = u * t.a[i] - t.phi[i];
  auto objective = [this, u](double a) { return u * a - eval_cost(a); };
  return numeric::refine_grid_max(t.a, values, objective, 200, 1).value;
}

double CostModel::bregman(double x, double y) const {
  require_action(x, "bregman");
  require_action(y, "bregman");
  if (x == y) return 0.0;
  return eval_cost(x) - eval_cost(y) - eval_deriv(y) * (x - y);
}

const std::vector<double>& CostModel::table_actions() const {
  static const std::vector<double> empty;
  return family_ == CostFamily::Tabulated ? table().a : empty;
}

const std::vector<double>& CostModel::table_slopes() const {
  static const std::vector<double> empty;
  return family_ == CostFamily::Tabulated ? table().slope : empty;
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

ValidationReport validate(const CostModel& model, std::size_t sample_count, std::uint64_t seed) {
  if (sample_count < 3) throw ConfigError("validate: sample_count must be at least 3");
  ValidationReport report;
  report.cost = model.name();
  report.sample_count = sample_count;
  report.seed = seed;

  const bool tabulated = model.family() == CostFamily::Tabulated;
  std::vector<double> xs;
  if (tabulated) {
    const auto dom = model.action_domain();
    xs = numeric::linspace(dom.lo, dom.hi, sample_count);
    report.sampled_actions = dom;
  } else {
    xs = numeric::logspace(1e-3, 10.0, sample_count);
    report.sampled_actions = {1e-3, 10.0, false, false};
  }
  const double inverse_tol = tabulated ? 1e-6 : 1e-10;
  constexpr double kFenchelTol = 1e-8;

  ValidationCheck monotone{"derivative_strictly_increasing", true, 0.0, ""};
  std::vector<double> slopes(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) slopes[i] = model.eval_deriv(xs[i]);
  auto scan_increasing = [&monotone](const std::vector<double>& at, const std::vector<double>& d) {
    for (std::size_t i = 1; i < d.size(); ++i) {
      if (!(d[i] > d[i - 1])) {
        const double v = d[i - 1] - d[i];
        if (monotone.passed || v > monotone.worst_violation) {
          monotone.detail = "phi' fails to increase between a=" + fmt_value(at[i - 1]) +
                            " and a=" + fmt_value(at[i]);
        }
        monotone.passed = false;
        monotone.worst_violation = std::max(monotone.worst_violation, v);
      }
    }
  };
  scan_increasing(xs, slopes);
  if (tabulated) scan_increasing(model.table_actions(), model.table_slopes());
  report.checks.push_back(monotone);

  ValidationCheck inverse{"inverse_round_trip", true, 0.0, ""};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double err = 0.0;
    try {
      const double back = model.inv_deriv(slopes[i]);
      err = std::abs(back - xs[i]) / std::max(1.0, std::abs(xs[i]));
    } catch (const std::exception& e) {
      err = numeric::kInf;
      inverse.detail = e.what();
    }
    if (err > inverse_tol) inverse.passed = false;
    inverse.worst_violation = std::max(inverse.worst_violation, err);
  }
  report.checks.push_back(inverse);

  ValidationCheck fenchel{"fenchel_young", true, 0.0, ""};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
  for (std::size_t k = 0; k < 4 * sample_count; ++k) {
    const double a = xs[pick(rng)];
    const double u = slopes[pick(rng)];
    try {
      const double gap = model.eval_cost(a) + model.conjugate(u) - a * u;
      const double scale = std::max(1.0, std::abs(a * u));
      if (gap < -kFenchelTol * scale) {
        fenchel.passed = false;
        fenchel.worst_violation = std::max(fenchel.worst_violation, -gap);
      }
    } catch (const std::exception& e) {
      fenchel.passed = false;
      fenchel.worst_violation = numeric::kInf;
      fenchel.detail = e.what();
    }
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    try {
      const double gap = model.eval_cost(xs[i]) + model.conjugate(slopes[i]) - xs[i] * slopes[i];
      const double scale = std::max(1.0, std::abs(xs[i] * slopes[i]));
      if (std::abs(gap) > kFenchelTol * scale) {
        fenchel.passed = false;
        fenchel.detail = "equality fails at a=" + fmt_value(xs[i]);
      }
      fenchel.worst_violation = std::max(fenchel.worst_violation, fenchel.passed ? 0.0 : std::abs(gap));
    } catch (const std::exception& e) {
      fenchel.passed = false;
      fenchel.worst_violation = numeric::kInf;
      fenchel.detail = e.what();
    }
  }
  report.checks.push_back(fenchel);
  return report;
}

}  // namespace contractforge
