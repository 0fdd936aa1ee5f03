#include "resq/ipm.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "ldl.hpp"

namespace resq {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

SolveStatus solve_status_from_string(const std::string& s) {
  if (s == "optimal") return SolveStatus::Optimal;
  if (s == "infeasible") return SolveStatus::Infeasible;
  if (s == "unbounded") return SolveStatus::Unbounded;
  if (s == "iteration-limit") return SolveStatus::IterationLimit;
  throw std::invalid_argument("unknown solve status '" + s + "'");
}

double duality_gap(const SolutionBundle& b) {
  if (!b.optimal()) throw std::logic_error("duality gap requested for a non-optimal solution");
  return std::abs(b.primal_objective - b.dual_objective) / (1.0 + std::abs(b.primal_objective));
}

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplet = Eigen::Triplet<double>;
using Vec = Eigen::VectorXd;

constexpr double kPrimalReg = 1e-9;
constexpr double kDualReg = 1e-9;
constexpr double kStepFraction = 0.995;
constexpr double kMeritSlack = 1e-7;
constexpr int kPolishSteps = 5;

// Where an internal row came from, for unscaling duals.
struct RowOrigin {
  int row = -1;       // program row, or -1 for a fixed-variable pin
  double scale = 1.0; // internal row = scale * sign * (program row)
  double sign = 1.0;
  int twin = -1;      // >= row of a merged <=/>= pair with equal bounds
};

struct QuadTerm {
  int var;
  double coef;
};

class InteriorPoint {
 public:
  InteriorPoint(const Program& p, const SolverOptions& o) : prog_(p), opts_(o) {}

  SolutionBundle run();

 private:
  void setup();
  void initial_point();
  void evaluate();
  void build_kkt();
  void solve_kkt(const Vec& rx, const Vec& ry, const Vec& rz, Vec& dx, Vec& dy, Vec& dz) const;
  void directions(const Vec& tl, const Vec& tu, const Vec& ts, Vec& dx, Vec& dy, Vec& dz, Vec& ds, Vec& dzl,
                  Vec& dzu) const;
  double max_step_primal(const Vec& dx, const Vec& ds) const;
  double max_step_dual(const Vec& dz, const Vec& dzl, const Vec& dzu) const;
  double complementarity() const;
  double merit() const;
  SolutionBundle package(SolveStatus st, int iters, double secs) const;

  const Program& prog_;
  SolverOptions opts_;

  int n_ = 0, me_ = 0, mi_ = 0, ncomp_ = 0;
  Vec lo_, hi_;
  std::vector<char> has_lo_, has_hi_;
  SpMat ae_, ai_;
  Vec be_, bi_;
  std::vector<std::vector<QuadTerm>> iq_;
  std::vector<RowOrigin> eq_origin_, in_origin_;
  double fscale_ = 1.0;

  // Iterate.
  Vec x_, y_, z_, s_, zl_, zu_;
  // Evaluations at the iterate.
  Vec grad_, hdiag_, g_, re_, ri_, rd_;
  SpMat jac_;
  double f_ = 0.0;

  SpMat kkt_;
  Vec kdiag_;  // D without regularisation
  std::unique_ptr<detail::QuasiDefiniteLdl> ldl_;
  mutable double last_refine_ = 0.0;
};

void InteriorPoint::setup() {
  n_ = prog_.num_variables();
  lo_ = Vec::Constant(n_, -kInf);
  hi_ = Vec::Constant(n_, kInf);
  has_lo_.assign(n_, 0);
  has_hi_.assign(n_, 0);

  std::vector<Triplet> te, ti;
  std::vector<double> be, bi;

  for (int j = 0; j < n_; ++j) {
    const auto& v = prog_.variable(j);
    const double scale = std::max(1.0, std::max(std::isfinite(v.lower) ? std::abs(v.lower) : 0.0,
                                                 std::isfinite(v.upper) ? std::abs(v.upper) : 0.0));
    if (std::isfinite(v.lower) && std::isfinite(v.upper) && v.upper - v.lower <= 1e-13 * scale) {
      te.emplace_back(me_, j, 1.0);
      be.push_back(v.lower);
      eq_origin_.push_back({-1, 1.0, 1.0});
      ++me_;
      continue;
    }
    if (std::isfinite(v.lower)) {
      lo_[j] = v.lower;
      has_lo_[j] = 1;
    }
    if (std::isfinite(v.upper)) {
      hi_[j] = v.upper;
      has_hi_[j] = 1;
    }
  }

  // A <= row and a >= row with the same linear part and the same bound form
  // an equality; as two inequalities they leave no interior.
  std::vector<int> twin_of(prog_.num_rows(), -1);
  std::vector<char> absorbed(prog_.num_rows(), 0);
  {
    std::map<std::vector<std::pair<int, double>>, int> upper;
    auto pattern = [](const Row& r) {
      std::vector<std::pair<int, double>> v;
      for (const auto& t : r.linear) v.push_back({t.var, t.coef});
      std::sort(v.begin(), v.end());
      return v;
    };
    for (int k = 0; k < prog_.num_rows(); ++k) {
      const Row& r = prog_.row(k);
      if (r.sense == RowSense::LessEqual && r.quadratic.empty()) upper.emplace(pattern(r), k);
    }
    for (int k = 0; k < prog_.num_rows(); ++k) {
      const Row& r = prog_.row(k);
      if (r.sense != RowSense::GreaterEqual || r.linear.empty()) continue;
      auto it = upper.find(pattern(r));
      if (it == upper.end() || twin_of[it->second] >= 0) continue;
      const double u = prog_.row(it->second).rhs;
      if (std::abs(u - r.rhs) <= 1e-14 * std::max(1.0, std::abs(u))) {
        twin_of[it->second] = k;
        absorbed[k] = 1;
      }
    }
  }

  for (int k = 0; k < prog_.num_rows(); ++k) {
    const Row& r = prog_.row(k);
    if (absorbed[k]) continue;
    double big = 0.0;
    for (const auto& t : r.linear) big = std::max(big, std::abs(t.coef));
    for (const auto& t : r.quadratic) big = std::max(big, std::abs(t.coef));
    if (big == 0.0) continue;  // empty rows are checked before the solve
    const double sc = 1.0 / big;
    if (r.sense == RowSense::Equal || twin_of[k] >= 0) {
      for (const auto& t : r.linear) te.emplace_back(me_, t.var, sc * t.coef);
      be.push_back(sc * r.rhs);
      eq_origin_.push_back({k, sc, 1.0, twin_of[k]});
      ++me_;
    } else {
      const double sg = r.sense == RowSense::LessEqual ? 1.0 : -1.0;
      for (const auto& t : r.linear) ti.emplace_back(mi_, t.var, sg * sc * t.coef);
      std::vector<QuadTerm> q;
      for (const auto& t : r.quadratic) q.push_back({t.var, sc * t.coef});
      iq_.push_back(std::move(q));
      bi.push_back(sg * sc * r.rhs);
      in_origin_.push_back({k, sc, sg});
      ++mi_;
    }
  }
  ae_.resize(me_, n_);
  ae_.setFromTriplets(te.begin(), te.end());
  ai_.resize(mi_, n_);
  ai_.setFromTriplets(ti.begin(), ti.end());
  be_ = Eigen::Map<Vec>(be.data(), me_);
  bi_ = Eigen::Map<Vec>(bi.data(), mi_);

  ncomp_ = mi_;
  for (int j = 0; j < n_; ++j) ncomp_ += has_lo_[j] + has_hi_[j];
}

void InteriorPoint::initial_point() {
  x_.resize(n_);
  for (int j = 0; j < n_; ++j) {
    const auto& v = prog_.variable(j);
    double x = std::isfinite(v.start) ? v.start : 0.0;
    if (!std::isfinite(v.start)) {
      if (has_lo_[j] && has_hi_[j]) x = 0.5 * (lo_[j] + hi_[j]);
      else if (has_lo_[j]) x = lo_[j] + 1.0;
      else if (has_hi_[j]) x = hi_[j] - 1.0;
    }
    if (has_lo_[j] && has_hi_[j]) {
      const double w = hi_[j] - lo_[j];
      x = std::clamp(x, lo_[j] + 0.05 * w, hi_[j] - 0.05 * w);
    } else if (has_lo_[j]) {
      x = std::max(x, lo_[j] + 1e-2 * std::max(1.0, std::abs(lo_[j])));
    } else if (has_hi_[j]) {
      x = std::min(x, hi_[j] - 1e-2 * std::max(1.0, std::abs(hi_[j])));
    }
    x_[j] = x;
  }

  // Objective scaling from the gradient at the start.
  std::vector<double> g(n_);
  prog_.cost_gradient(std::span<const double>(x_.data(), n_), g);
  double gmax = 0.0;
  for (double v : g) gmax = std::max(gmax, std::abs(v));
  fscale_ = 1.0 / std::max(1.0, gmax);

  y_ = Vec::Zero(me_);
  evaluate();
  s_.resize(mi_);
  z_ = Vec::Ones(mi_);
  for (int k = 0; k < mi_; ++k) s_[k] = std::max(-g_[k], 1.0);
  zl_ = Vec::Zero(n_);
  zu_ = Vec::Zero(n_);
  for (int j = 0; j < n_; ++j) {
    if (has_lo_[j]) zl_[j] = 1.0;
    if (has_hi_[j]) zu_[j] = 1.0;
  }
}

void InteriorPoint::evaluate() {
  std::span<const double> xs(x_.data(), n_);
  grad_.resize(n_);
  hdiag_.resize(n_);
  f_ = fscale_ * prog_.cost(xs);
  prog_.cost_gradient(xs, std::span<double>(grad_.data(), n_));
  prog_.cost_hessian_diag(xs, std::span<double>(hdiag_.data(), n_));
  grad_ *= fscale_;
  hdiag_ *= fscale_;

  g_ = ai_ * x_ - bi_;
  std::vector<Triplet> tj;
  tj.reserve(ai_.nonZeros() + 8);
  for (int c = 0; c < ai_.outerSize(); ++c)
    for (SpMat::InnerIterator it(ai_, c); it; ++it) tj.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < mi_; ++k) {
    for (const auto& q : iq_[k]) {
      g_[k] += q.coef * x_[q.var] * x_[q.var];
      tj.emplace_back(k, q.var, 2.0 * q.coef * x_[q.var]);
    }
  }
  jac_.resize(mi_, n_);
  jac_.setFromTriplets(tj.begin(), tj.end());

  re_ = ae_ * x_ - be_;
  if (s_.size() == mi_) ri_ = g_ + s_;
  if (z_.size() == mi_ && zl_.size() == n_) {
    rd_ = grad_ + ae_.transpose() * y_ + jac_.transpose() * z_ - zl_ + zu_;
  }
}

void InteriorPoint::build_kkt() {
  // Hessian of the Lagrangian is diagonal: objective terms are separable and
  // quadratic rows only carry squares.
  kdiag_ = hdiag_;
  for (int k = 0; k < mi_; ++k)
    for (const auto& q : iq_[k]) kdiag_[q.var] += 2.0 * q.coef * z_[k];
  for (int j = 0; j < n_; ++j) {
    if (has_lo_[j]) kdiag_[j] += zl_[j] / (x_[j] - lo_[j]);
    if (has_hi_[j]) kdiag_[j] += zu_[j] / (hi_[j] - x_[j]);
  }

  const int N = n_ + me_ + mi_;
  std::vector<Triplet> t;
  t.reserve(N + ae_.nonZeros() + jac_.nonZeros());
  for (int j = 0; j < n_; ++j) t.emplace_back(j, j, kdiag_[j] + kPrimalReg);
  for (int c = 0; c < ae_.outerSize(); ++c)
    for (SpMat::InnerIterator it(ae_, c); it; ++it) t.emplace_back(n_ + it.row(), it.col(), it.value());
  for (int c = 0; c < jac_.outerSize(); ++c)
    for (SpMat::InnerIterator it(jac_, c); it; ++it) t.emplace_back(n_ + me_ + it.row(), it.col(), it.value());
  for (int k = 0; k < me_; ++k) t.emplace_back(n_ + k, n_ + k, -kDualReg);
  for (int k = 0; k < mi_; ++k) t.emplace_back(n_ + me_ + k, n_ + me_ + k, -s_[k] / z_[k] - kDualReg);
  kkt_.resize(N, N);
  kkt_.setFromTriplets(t.begin(), t.end());
  if (!ldl_) {
    std::vector<int> sign(N, -1);
    std::fill(sign.begin(), sign.begin() + n_, 1);
    ldl_ = std::make_unique<detail::QuasiDefiniteLdl>(std::move(sign));
    ldl_->analyze(kkt_);
  }
  ldl_->factorize(kkt_);
}

void InteriorPoint::solve_kkt(const Vec& rx, const Vec& ry, const Vec& rz, Vec& dx, Vec& dy, Vec& dz) const {
  const int N = n_ + me_ + mi_;
  Vec rhs(N);
  rhs << rx, ry, rz;
  Vec sol = ldl_->solve(rhs);
  auto residual = [&](const Vec& v) {
    Vec r(N);
    r.head(n_) = rx - (kdiag_.cwiseProduct(v.head(n_)) + ae_.transpose() * v.segment(n_, me_) +
                       jac_.transpose() * v.tail(mi_));
    r.segment(n_, me_) = ry - ae_ * v.head(n_);
    r.tail(mi_) = rz - (jac_ * v.head(n_) - (s_.cwiseQuotient(z_)).cwiseProduct(v.tail(mi_)));
    return r;
  };
  // Iterative refinement against the unregularised system; keep the best iterate.
  const double scale = 1.0 + rhs.lpNorm<Eigen::Infinity>();
  Vec r = residual(sol);
  double err = r.lpNorm<Eigen::Infinity>() / scale;
  for (int pass = 0; pass < 20 && err > 1e-15; ++pass) {
    Vec trial = sol + ldl_->solve(r);
    Vec rt = residual(trial);
    const double et = rt.lpNorm<Eigen::Infinity>() / scale;
    if (!(et < 0.9 * err)) {
      if (et < err) sol = trial, err = et;
      break;
    }
    sol = std::move(trial);
    r = std::move(rt);
    err = et;
  }
  last_refine_ = err;
  dx = sol.head(n_);
  dy = sol.segment(n_, me_);
  dz = sol.tail(mi_);
}

void InteriorPoint::directions(const Vec& tl, const Vec& tu, const Vec& ts, Vec& dx, Vec& dy, Vec& dz, Vec& ds,
                               Vec& dzl, Vec& dzu) const {
  Vec rx = -rd_;
  for (int j = 0; j < n_; ++j) {
    if (has_lo_[j]) rx[j] += tl[j] / (x_[j] - lo_[j]) - zl_[j];
    if (has_hi_[j]) rx[j] -= tu[j] / (hi_[j] - x_[j]) - zu_[j];
  }
  Vec ry = -re_;
  Vec rz = -ri_ - ts.cwiseQuotient(z_) + s_;
  solve_kkt(rx, ry, rz, dx, dy, dz);
  ds = -ri_ - jac_ * dx;
  dzl = Vec::Zero(n_);
  dzu = Vec::Zero(n_);
  for (int j = 0; j < n_; ++j) {
    if (has_lo_[j]) {
      const double w = x_[j] - lo_[j];
      dzl[j] = (tl[j] - w * zl_[j] - zl_[j] * dx[j]) / w;
    }
    if (has_hi_[j]) {
      const double w = hi_[j] - x_[j];
      dzu[j] = (tu[j] - w * zu_[j] + zu_[j] * dx[j]) / w;
    }
  }
}

double InteriorPoint::max_step_primal(const Vec& dx, const Vec& ds) const {
  double a = 1.0;
  for (int j = 0; j < n_; ++j) {
    if (has_lo_[j] && dx[j] < 0.0) a = std::min(a, -(x_[j] - lo_[j]) / dx[j]);
    if (has_hi_[j] && dx[j] > 0.0) a = std::min(a, (hi_[j] - x_[j]) / dx[j]);
  }
  for (int k = 0; k < mi_; ++k)
    if (ds[k] < 0.0) a = std::min(a, -s_[k] / ds[k]);
  return a;
}

double InteriorPoint::max_step_dual(const Vec& dz, const Vec& dzl, const Vec& dzu) const {
  double a = 1.0;
  for (int k = 0; k < mi_; ++k)
    if (dz[k] < 0.0) a = std::min(a, -z_[k] / dz[k]);
  for (int j = 0; j < n_; ++j) {
    if (has_lo_[j] && dzl[j] < 0.0) a = std::min(a, -zl_[j] / dzl[j]);
    if (has_hi_[j] && dzu[j] < 0.0) a = std::min(a, -zu_[j] / dzu[j]);
  }
  return a;
}

double InteriorPoint::merit() const {
  const double pres = std::max(re_.size() ? re_.lpNorm<Eigen::Infinity>() : 0.0,
                               ri_.size() ? ri_.lpNorm<Eigen::Infinity>() : 0.0);
  return pres + rd_.lpNorm<Eigen::Infinity>();
}

double InteriorPoint::complementarity() const {
  double c = s_.dot(z_);
  for (int j = 0; j < n_; ++j) {
    if (has_lo_[j]) c += (x_[j] - lo_[j]) * zl_[j];
    if (has_hi_[j]) c += (hi_[j] - x_[j]) * zu_[j];
  }
  return c;
}

SolutionBundle InteriorPoint::package(SolveStatus st, int iters, double secs) const {
  SolutionBundle b;
  b.status = st;
  b.iterations = iters;
  b.wall_seconds = secs;
  b.primal.assign(x_.data(), x_.data() + n_);
  b.duals.assign(prog_.num_rows(), 0.0);
  const double own = prog_.maximize() ? 1.0 : -1.0;
  for (int k = 0; k < me_; ++k) {
    const auto& o = eq_origin_[k];
    if (o.row < 0) continue;
    const double v = own * y_[k] * o.scale / fscale_;
    // A merged pair reports on whichever side has the admissible sign.
    if (o.twin >= 0 && v * own < 0.0) b.duals[o.twin] = v;
    else b.duals[o.row] = v;
  }
  for (int k = 0; k < mi_; ++k) {
    const auto& o = in_origin_[k];
    b.duals[o.row] = own * o.sign * z_[k] * o.scale / fscale_;
  }
  const double cost = f_ / fscale_;
  // Wolfe dual: Lagrangian at the current primal-dual pair.
  double lag = f_ + y_.dot(re_) + z_.dot(g_);
  for (int j = 0; j < n_; ++j) {
    if (has_lo_[j]) lag -= zl_[j] * (x_[j] - lo_[j]);
    if (has_hi_[j]) lag -= zu_[j] * (hi_[j] - x_[j]);
  }
  lag /= fscale_;
  b.primal_objective = prog_.maximize() ? -cost : cost;
  b.dual_objective = prog_.maximize() ? -lag : lag;
  b.primal_residual = prog_.max_violation(b.primal);
  b.dual_residual = rd_.size() ? rd_.lpNorm<Eigen::Infinity>() / fscale_ : 0.0;
  if (st == SolveStatus::Optimal) b.gap = duality_gap(b);
  return b;
}

SolutionBundle InteriorPoint::run() {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  setup();
  initial_point();
  evaluate();

  struct Snapshot {
    Vec x, s, y, z, zl, zu;
    int iter;
  };
  std::optional<Snapshot> good;
  int stalled = 0;
  int iter = 0;
  SolveStatus status = SolveStatus::IterationLimit;
  for (; iter <= opts_.max_iter; ++iter) {
    const double pres = std::max(re_.size() ? re_.lpNorm<Eigen::Infinity>() : 0.0,
                                 ri_.size() ? ri_.lpNorm<Eigen::Infinity>() : 0.0);
    const double dres = rd_.lpNorm<Eigen::Infinity>();
    const double comp = complementarity();
    const double mu = ncomp_ > 0 ? comp / ncomp_ : 0.0;
    double lag = f_ + y_.dot(re_) + z_.dot(g_);
    for (int j = 0; j < n_; ++j) {
      if (has_lo_[j]) lag -= zl_[j] * (x_[j] - lo_[j]);
      if (has_hi_[j]) lag -= zu_[j] * (hi_[j] - x_[j]);
    }
    const double gap = std::abs(f_ - lag) / fscale_ / (1.0 + std::abs(f_) / fscale_);
    if (opts_.verbose)
      std::cerr << "ipm " << iter << " f=" << f_ / fscale_ << " pres=" << pres << " dres=" << dres
                << " mu=" << mu << " gap=" << gap << "\n";
    if (pres <= opts_.feas_tol && dres <= opts_.feas_tol && gap <= 0.1 * opts_.gap_tol) {
      status = SolveStatus::Optimal;
      break;
    }
    // Remember the first iterate inside the published tolerances; if the
    // tighter target is not reached within a few more steps, return it.
    if (!good && pres <= opts_.feas_tol && dres <= opts_.feas_tol && gap <= opts_.gap_tol)
      good = Snapshot{x_, s_, y_, z_, zl_, zu_, iter};
    if (good && iter - good->iter >= kPolishSteps) break;
    if (x_.lpNorm<Eigen::Infinity>() > 1e12) {
      status = SolveStatus::Unbounded;
      break;
    }
    if (iter == opts_.max_iter) break;

    build_kkt();

    Vec zero_n = Vec::Zero(n_), zero_m = Vec::Zero(mi_);
    Vec dx, dy, dz, ds, dzl, dzu;
    directions(zero_n, zero_n, zero_m, dx, dy, dz, ds, dzl, dzu);
    const double ap = max_step_primal(dx, ds);
    const double ad = max_step_dual(dz, dzl, dzu);
    double comp_aff = (s_ + ap * ds).dot(z_ + ad * dz);
    for (int j = 0; j < n_; ++j) {
      if (has_lo_[j]) comp_aff += (x_[j] - lo_[j] + ap * dx[j]) * (zl_[j] + ad * dzl[j]);
      if (has_hi_[j]) comp_aff += (hi_[j] - x_[j] - ap * dx[j]) * (zu_[j] + ad * dzu[j]);
    }
    const double mu_aff = ncomp_ > 0 ? comp_aff / ncomp_ : 0.0;
    const double sigma = mu > 0.0 ? std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0) : 0.0;

    Vec tl = Vec::Zero(n_), tu = Vec::Zero(n_), ts(mi_);
    for (int j = 0; j < n_; ++j) {
      if (has_lo_[j]) tl[j] = sigma * mu - dx[j] * dzl[j];
      if (has_hi_[j]) tu[j] = sigma * mu + dx[j] * dzu[j];
    }
    for (int k = 0; k < mi_; ++k) ts[k] = sigma * mu - ds[k] * dz[k];
    directions(tl, tu, ts, dx, dy, dz, ds, dzl, dzu);

    // Once complementarity underflows the KKT system degenerates; keep the
    // current iterate and let the acceptance tests below decide.
    if (!dx.allFinite() || !dy.allFinite() || !dz.allFinite()) break;

    double alpha_p = std::min(1.0, kStepFraction * max_step_primal(dx, ds));
    double alpha_d = std::min(1.0, kStepFraction * max_step_dual(dz, dzl, dzu));

    // Backtrack on a residual merit so steep objective terms cannot throw the
    // iterate far from the central path. The slack lets roundoff-level
    // increases through near convergence.
    const double phi0 = merit();
    const Vec x0 = x_, s0 = s_, y0 = y_, z0 = z_, zl0 = zl_, zu0 = zu_;
    bool finite = true;
    for (int cut = 0;; ++cut) {
      x_ = x0 + alpha_p * dx;
      s_ = s0 + alpha_p * ds;
      y_ = y0 + alpha_d * dy;
      z_ = z0 + alpha_d * dz;
      zl_ = zl0 + alpha_d * dzl;
      zu_ = zu0 + alpha_d * dzu;
      evaluate();
      const double phi = merit();
      const double target = std::max((1.0 - 1e-4 * std::min(alpha_p, alpha_d)) * phi0, phi0 + kMeritSlack);
      finite = std::isfinite(phi);
      if ((finite && phi <= target) || cut >= 12) break;
      // With unequal lengths the dual residual need not shrink; retry with a
      // common one before halving.
      if (alpha_p != alpha_d) {
        alpha_p = alpha_d = std::min(alpha_p, alpha_d);
        continue;
      }
      alpha_p *= 0.5;
      alpha_d *= 0.5;
    }

    if (!finite) {
      x_ = x0;
      s_ = s0;
      y_ = y0;
      z_ = z0;
      zl_ = zl0;
      zu_ = zu0;
      evaluate();
      break;
    }
    if (opts_.verbose)
      std::cerr << "    ap=" << alpha_p << " ad=" << alpha_d << " sigma=" << sigma << " bumped=" << ldl_->regularized_pivots()
                << " refine=" << last_refine_ << "\n";
    stalled = (std::min(alpha_p, alpha_d) < 1e-8) ? stalled + 1 : 0;
    if (stalled >= 8) break;
  }

  if (status != SolveStatus::Optimal && good) {
    x_ = good->x;
    s_ = good->s;
    y_ = good->y;
    z_ = good->z;
    zl_ = good->zl;
    zu_ = good->zu;
    evaluate();
    status = SolveStatus::Optimal;
  }
  SolutionBundle b = package(status, iter, elapsed());
  if (status == SolveStatus::IterationLimit && b.primal_residual <= 1e-8) {
    // Accept a stalled iterate that already meets the published tolerances.
    double gap = std::abs(b.primal_objective - b.dual_objective) / (1.0 + std::abs(b.primal_objective));
    if (gap <= opts_.gap_tol && b.dual_residual <= 1e-6) {
      b.status = SolveStatus::Optimal;
      b.gap = gap;
    }
  }
  return b;
}

// Minimise the total violation of the rows with elastic slacks. Rows that
// carry violation at the optimum form the infeasibility hint.
std::vector<std::string> infeasibility_hint(const Program& p, const SolverOptions& opts, bool& infeasible) {
  Program e(false);
  for (const auto& v : p.variables()) e.add_variable(v.name, v.lower, v.upper, v.start);
  std::vector<std::pair<int, std::vector<int>>> elastic;
  for (int k = 0; k < p.num_rows(); ++k) {
    const Row& r = p.row(k);
    auto lin = r.linear;
    std::vector<int> slack;
    auto add_slack = [&](double sign) {
      const int j = e.add_variable("elastic" + std::to_string(slack.size()) + ":" + r.name, 0.0, kInf, 1.0);
      e.add_linear_cost(j, 1.0);
      lin.push_back({j, sign});
      slack.push_back(j);
    };
    switch (r.sense) {
      case RowSense::Equal:
        add_slack(1.0);
        add_slack(-1.0);
        e.add_row(r.name, lin, RowSense::Equal, r.rhs);
        break;
      case RowSense::LessEqual:
        add_slack(-1.0);
        if (r.quadratic.empty()) e.add_row(r.name, lin, RowSense::LessEqual, r.rhs);
        else e.add_quadratic_row(r.name, lin, r.quadratic, r.rhs);
        break;
      case RowSense::GreaterEqual:
        add_slack(1.0);
        e.add_row(r.name, lin, RowSense::GreaterEqual, r.rhs);
        break;
    }
    elastic.push_back({k, slack});
  }
  SolverOptions o = opts;
  o.diagnose_infeasibility = false;
  o.gap_tol = 1e-9;
  const SolutionBundle b = solve(e, o);
  double scale = 1.0;
  for (const auto& r : p.rows()) scale = std::max(scale, std::abs(r.rhs));
  infeasible = b.status != SolveStatus::Optimal || b.primal_objective > 1e-6 * scale;
  std::vector<std::pair<double, std::string>> viol;
  for (const auto& [k, slack] : elastic) {
    double v = 0.0;
    for (int j : slack) v += b.primal[j];
    if (v > 1e-7 * scale) viol.push_back({v, p.row(k).name});
  }
  std::stable_sort(viol.begin(), viol.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < viol.size() && i < 10; ++i) out.push_back(viol[i].second);
  return out;
}

}  // namespace

SolutionBundle solve(const Program& p, const SolverOptions& opts) {
  // Trivial infeasibilities that the interior point method cannot represent.
  for (const auto& v : p.variables()) {
    if (v.lower > v.upper) {
      SolutionBundle b;
      b.status = SolveStatus::Infeasible;
      b.primal.assign(p.num_variables(), 0.0);
      b.duals.assign(p.num_rows(), 0.0);
      b.infeasibility_hint = {"bounds:" + v.name};
      return b;
    }
  }
  for (const auto& r : p.rows()) {
    if (!r.linear.empty() || !r.quadratic.empty()) continue;
    const bool ok = (r.sense == RowSense::Equal && r.rhs == 0.0) ||
                    (r.sense == RowSense::LessEqual && r.rhs >= 0.0) ||
                    (r.sense == RowSense::GreaterEqual && r.rhs <= 0.0);
    if (!ok) {
      SolutionBundle b;
      b.status = SolveStatus::Infeasible;
      b.primal.assign(p.num_variables(), 0.0);
      b.duals.assign(p.num_rows(), 0.0);
      b.infeasibility_hint = {r.name};
      return b;
    }
  }

  InteriorPoint ipm(p, opts);
  SolutionBundle b = ipm.run();
  if (b.status != SolveStatus::Optimal && opts.diagnose_infeasibility) {
    bool infeasible = false;
    auto hint = infeasibility_hint(p, opts, infeasible);
    if (infeasible) {
      b.status = SolveStatus::Infeasible;
      b.infeasibility_hint = std::move(hint);
    }
  }
  return b;
}

}  // namespace resq
