#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace resq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { Equal, LessEqual, GreaterEqual };

struct Term {
  int var;
  double coef;
};

/// sum(linear) + sum(quadratic.coef * x^2) <sense> rhs.
/// Quadratic parts are only accepted on LessEqual rows with coef >= 0, so
/// every row describes a convex set.
struct Row {
  std::string name;
  std::vector<Term> linear;
  std::vector<Term> quadratic;
  RowSense sense = RowSense::Equal;
  double rhs = 0.0;
};

struct Variable {
  std::string name;
  double lower = -kInf;
  double upper = kInf;
  double start = std::numeric_limits<double>::quiet_NaN();
};

/// weight * x * (ln x - 1 - shift), x >= 0, with 0 ln 0 = 0.
struct EntropyTerm {
  int var;
  double weight;
  double shift;
};

/// weight * integral_0^x t0 (1 + alpha (u/cap)^beta) du.
struct BprTerm {
  int var;
  double weight;
  double t0;
  double cap;
  double alpha;
  double beta;
};

/// Sparse convex program with named variables and rows.
///
/// The objective is stored as a cost to minimise. When `maximize()` is set the
/// reported objective is the negated cost and row duals are reported as the
/// sensitivity of the maximised objective to each row's right-hand side.
class Program {
 public:
  explicit Program(bool maximize = true) : maximize_(maximize) {}

  int add_variable(std::string name, double lower = -kInf, double upper = kInf,
                   double start = std::numeric_limits<double>::quiet_NaN());
  int add_row(std::string name, std::vector<Term> linear, RowSense sense, double rhs);
  int add_quadratic_row(std::string name, std::vector<Term> linear, std::vector<Term> quadratic,
                        double rhs);

  void add_linear_cost(int var, double c);
  void add_quadratic_cost(int var, double c2);
  void add_entropy_cost(int var, double weight, double shift);
  void add_bpr_cost(int var, double weight, double t0, double cap, double alpha, double beta);

  void set_bounds(int var, double lower, double upper);
  void set_start(int var, double start);

  bool maximize() const { return maximize_; }
  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Row>& rows() const { return rows_; }
  const Variable& variable(int j) const { return vars_.at(j); }
  const Row& row(int k) const { return rows_.at(k); }
  const std::vector<double>& linear_cost() const { return lin_; }
  const std::vector<double>& quadratic_cost() const { return quad_; }
  const std::vector<EntropyTerm>& entropy_terms() const { return entropy_; }
  const std::vector<BprTerm>& bpr_terms() const { return bpr_; }

  /// Index lookups; the throwing forms raise std::out_of_range.
  int var_index(std::string_view name) const;
  int row_index(std::string_view name) const;
  std::optional<int> find_var(std::string_view name) const;
  std::optional<int> find_row(std::string_view name) const;

  double cost(std::span<const double> x) const;
  /// Objective in the program's own sense.
  double objective(std::span<const double> x) const { return maximize_ ? -cost(x) : cost(x); }
  void cost_gradient(std::span<const double> x, std::span<double> g) const;
  void cost_hessian_diag(std::span<const double> x, std::span<double> h) const;
  double row_activity(int k, std::span<const double> x) const;
  /// Signed violation of row k: >0 means infeasible by that amount.
  double row_violation(int k, std::span<const double> x) const;
  double max_violation(std::span<const double> x) const;

  /// Deterministic midpoint-convexity check of every nonlinear cost term and
  /// quadratic row over a fixed sample grid. Returns offending term names.
  std::vector<std::string> check_convexity(double slack = 1e-10) const;

 private:
  bool maximize_;
  std::vector<Variable> vars_;
  std::vector<Row> rows_;
  std::vector<double> lin_;
  std::vector<double> quad_;
  std::vector<EntropyTerm> entropy_;
  std::vector<BprTerm> bpr_;
  std::unordered_map<std::string, int> var_by_name_;
  std::unordered_map<std::string, int> row_by_name_;
};

double bpr_integral_value(const BprTerm& t, double x);

}  // namespace resq
