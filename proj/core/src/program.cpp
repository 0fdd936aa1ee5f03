#include "resq/program.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace resq {

namespace {

void check_var(int var, int n) {
  if (var < 0 || var >= n) throw std::out_of_range("variable index " + std::to_string(var) + " out of range");
}

double entropy_value(double w, double shift, double x) {
  if (x <= 0.0) return 0.0;
  return w * x * (std::log(x) - 1.0 - shift);
}

}  // namespace

double bpr_integral_value(const BprTerm& t, double x) {
  const double u = std::max(x, 0.0);
  return t.weight * t.t0 * (u + t.alpha * std::pow(u, t.beta + 1.0) / ((t.beta + 1.0) * std::pow(t.cap, t.beta)));
}

int Program::add_variable(std::string name, double lower, double upper, double start) {
  if (var_by_name_.count(name)) throw std::logic_error("duplicate variable " + name);
  const int j = num_variables();
  var_by_name_.emplace(name, j);
  vars_.push_back({std::move(name), lower, upper, start});
  lin_.push_back(0.0);
  quad_.push_back(0.0);
  return j;
}

int Program::add_row(std::string name, std::vector<Term> linear, RowSense sense, double rhs) {
  if (row_by_name_.count(name)) throw std::logic_error("duplicate row " + name);
  for (const auto& t : linear) check_var(t.var, num_variables());
  const int k = num_rows();
  row_by_name_.emplace(name, k);
  rows_.push_back({std::move(name), std::move(linear), {}, sense, rhs});
  return k;
}

int Program::add_quadratic_row(std::string name, std::vector<Term> linear, std::vector<Term> quadratic,
                               double rhs) {
  for (const auto& t : quadratic) {
    check_var(t.var, num_variables());
    if (t.coef < 0.0) throw std::invalid_argument("row " + name + ": nonconvex quadratic term");
  }
  const int k = add_row(std::move(name), std::move(linear), RowSense::LessEqual, rhs);
  rows_[k].quadratic = std::move(quadratic);
  return k;
}

void Program::add_linear_cost(int var, double c) {
  check_var(var, num_variables());
  lin_[var] += c;
}

void Program::add_quadratic_cost(int var, double c2) {
  check_var(var, num_variables());
  if (c2 < 0.0) throw std::invalid_argument("nonconvex quadratic cost on " + vars_[var].name);
  quad_[var] += c2;
}

void Program::add_entropy_cost(int var, double weight, double shift) {
  check_var(var, num_variables());
  if (weight < 0.0) throw std::invalid_argument("negative entropy weight on " + vars_[var].name);
  if (vars_[var].lower < 0.0) throw std::invalid_argument("entropy variable " + vars_[var].name + " must be >= 0");
  entropy_.push_back({var, weight, shift});
}

void Program::add_bpr_cost(int var, double weight, double t0, double cap, double alpha, double beta) {
  check_var(var, num_variables());
  if (weight < 0.0 || beta < 1.0 || alpha < 0.0)
    throw std::invalid_argument("nonconvex travel-time integral on " + vars_[var].name);
  if (vars_[var].lower < 0.0) throw std::invalid_argument("link flow " + vars_[var].name + " must be >= 0");
  bpr_.push_back({var, weight, t0, cap, alpha, beta});
}

void Program::set_bounds(int var, double lower, double upper) {
  check_var(var, num_variables());
  vars_[var].lower = lower;
  vars_[var].upper = upper;
}

void Program::set_start(int var, double start) {
  check_var(var, num_variables());
  vars_[var].start = start;
}

std::optional<int> Program::find_var(std::string_view name) const {
  auto it = var_by_name_.find(std::string(name));
  if (it == var_by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Program::find_row(std::string_view name) const {
  auto it = row_by_name_.find(std::string(name));
  if (it == row_by_name_.end()) return std::nullopt;
  return it->second;
}

int Program::var_index(std::string_view name) const {
  if (auto j = find_var(name)) return *j;
  throw std::out_of_range("unknown variable " + std::string(name));
}

int Program::row_index(std::string_view name) const {
  if (auto k = find_row(name)) return *k;
  throw std::out_of_range("unknown row " + std::string(name));
}

double Program::cost(std::span<const double> x) const {
  double f = 0.0;
  for (int j = 0; j < num_variables(); ++j) f += lin_[j] * x[j] + quad_[j] * x[j] * x[j];
  for (const auto& e : entropy_) f += entropy_value(e.weight, e.shift, x[e.var]);
  for (const auto& b : bpr_) f += bpr_integral_value(b, x[b.var]);
  return f;
}

void Program::cost_gradient(std::span<const double> x, std::span<double> g) const {
  for (int j = 0; j < num_variables(); ++j) g[j] = lin_[j] + 2.0 * quad_[j] * x[j];
  for (const auto& e : entropy_) g[e.var] += e.weight * (std::log(x[e.var]) - e.shift);
  for (const auto& b : bpr_) {
    const double u = std::max(x[b.var], 0.0);
    g[b.var] += b.weight * b.t0 * (1.0 + b.alpha * std::pow(u / b.cap, b.beta));
  }
}

void Program::cost_hessian_diag(std::span<const double> x, std::span<double> h) const {
  for (int j = 0; j < num_variables(); ++j) h[j] = 2.0 * quad_[j];
  for (const auto& e : entropy_) h[e.var] += e.weight / x[e.var];
  for (const auto& b : bpr_) {
    const double u = std::max(x[b.var], 0.0);
    h[b.var] += b.weight * b.t0 * b.alpha * b.beta * std::pow(u, b.beta - 1.0) / std::pow(b.cap, b.beta);
  }
}

double Program::row_activity(int k, std::span<const double> x) const {
  const Row& r = rows_[k];
  double a = 0.0;
  for (const auto& t : r.linear) a += t.coef * x[t.var];
  for (const auto& t : r.quadratic) a += t.coef * x[t.var] * x[t.var];
  return a;
}

double Program::row_violation(int k, std::span<const double> x) const {
  const Row& r = rows_[k];
  const double a = row_activity(k, x);
  switch (r.sense) {
    case RowSense::Equal: return std::abs(a - r.rhs);
    case RowSense::LessEqual: return a - r.rhs;
    case RowSense::GreaterEqual: return r.rhs - a;
  }
  return 0.0;
}

double Program::max_violation(std::span<const double> x) const {
  double v = 0.0;
  for (int k = 0; k < num_rows(); ++k) v = std::max(v, row_violation(k, x));
  for (int j = 0; j < num_variables(); ++j) {
    v = std::max(v, vars_[j].lower - x[j]);
    v = std::max(v, x[j] - vars_[j].upper);
  }
  return v;
}

std::vector<std::string> Program::check_convexity(double slack) const {
  // Sample pairs on a fixed logarithmic grid; no RNG so the verdict is reproducible.
  static constexpr double kGrid[] = {0.0, 1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0, 7.5, 20.0, 55.0, 150.0};
  static constexpr double kTheta[] = {0.1, 0.25, 0.5, 0.75, 0.9};
  std::vector<std::string> bad;
  auto midpoint_ok = [&](auto&& f, double lo, double hi) {
    for (double a : kGrid)
      for (double b : kGrid) {
        const double xa = std::clamp(a, lo, hi), xb = std::clamp(b, lo, hi);
        for (double th : kTheta) {
          const double xm = th * xa + (1.0 - th) * xb;
          const double lhs = f(xm), rhs = th * f(xa) + (1.0 - th) * f(xb);
          if (lhs > rhs + slack * (1.0 + std::abs(rhs))) return false;
        }
      }
    return true;
  };
  for (const auto& e : entropy_) {
    if (!midpoint_ok([&](double x) { return entropy_value(e.weight, e.shift, x); }, 0.0, kInf))
      bad.push_back("entropy:" + vars_[e.var].name);
  }
  for (const auto& b : bpr_) {
    if (!midpoint_ok([&](double x) { return bpr_integral_value(b, x); }, 0.0, kInf))
      bad.push_back("bpr:" + vars_[b.var].name);
  }
  for (int j = 0; j < num_variables(); ++j) {
    if (quad_[j] == 0.0) continue;
    const double c = quad_[j];
    if (!midpoint_ok([&](double x) { return c * x * x; }, -kInf, kInf)) bad.push_back("quadratic:" + vars_[j].name);
  }
  for (const auto& r : rows_) {
    for (const auto& t : r.quadratic) {
      const double c = t.coef;
      if (r.sense != RowSense::LessEqual || !midpoint_ok([&](double x) { return c * x * x; }, -kInf, kInf))
        bad.push_back("row:" + r.name);
    }
  }
  return bad;
}

}  // namespace resq
