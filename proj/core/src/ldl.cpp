#include "ldl.hpp"

#include <Eigen/OrderingMethods>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace resq::detail {

QuasiDefiniteLdl::QuasiDefiniteLdl(std::vector<int> sign, double delta, double eps)
    : sign_(std::move(sign)), delta_(delta), eps_(eps), n_(static_cast<int>(sign_.size())) {}

void QuasiDefiniteLdl::analyze(const Eigen::SparseMatrix<double>& lower) {
  if (lower.rows() != n_ || lower.cols() != n_) throw std::invalid_argument("ldl: dimension mismatch");
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> pinv;
  Eigen::AMDOrdering<int> amd;
  amd(lower, pinv);
  const Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm = pinv.inverse();
  newidx_.assign(perm.indices().data(), perm.indices().data() + n_);

  // Upper-triangle pattern of the permuted matrix, column by column.
  std::vector<std::vector<std::pair<int, int>>> cols(n_);  // (row, source entry)
  int k = 0;
  for (int c = 0; c < lower.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(lower, c); it; ++it, ++k) {
      const int a = newidx_[it.row()], b = newidx_[it.col()];
      cols[std::max(a, b)].push_back({std::min(a, b), k});
    }
  ap_.assign(n_ + 1, 0);
  ai_.clear();
  slot_.assign(k, -1);
  for (int j = 0; j < n_; ++j) {
    auto& col = cols[j];
    std::sort(col.begin(), col.end());
    for (std::size_t q = 0; q < col.size(); ++q) {
      if (q == 0 || col[q].first != col[q - 1].first) ai_.push_back(col[q].first);
      slot_[col[q].second] = static_cast<int>(ai_.size()) - 1;
    }
    ap_[j + 1] = static_cast<int>(ai_.size());
  }
  ax_.assign(ai_.size(), 0.0);

  // Elimination tree and column counts.
  etree_.assign(n_, -1);
  lnz_.assign(n_, 0);
  std::vector<int> work(n_, -1);
  for (int j = 0; j < n_; ++j) {
    work[j] = j;
    for (int p = ap_[j]; p < ap_[j + 1]; ++p) {
      int i = ai_[p];
      while (i != j && work[i] != j) {
        if (etree_[i] == -1) etree_[i] = j;
        ++lnz_[i];
        work[i] = j;
        i = etree_[i];
      }
    }
  }
  lp_.assign(n_ + 1, 0);
  for (int i = 0; i < n_; ++i) lp_[i + 1] = lp_[i] + lnz_[i];
  li_.assign(lp_[n_], 0);
  lx_.assign(lp_[n_], 0.0);
  d_.assign(n_, 0.0);
  dinv_.assign(n_, 0.0);
}

void QuasiDefiniteLdl::permute_upper(const Eigen::SparseMatrix<double>& lower) {
  std::fill(ax_.begin(), ax_.end(), 0.0);
  int k = 0;
  for (int c = 0; c < lower.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(lower, c); it; ++it, ++k) ax_[slot_.at(k)] += it.value();
  if (k != static_cast<int>(slot_.size())) throw std::logic_error("ldl: pattern changed since analysis");
}

void QuasiDefiniteLdl::factorize(const Eigen::SparseMatrix<double>& lower) {
  permute_upper(lower);
  std::vector<int> psign(n_);
  for (int i = 0; i < n_; ++i) psign[newidx_[i]] = sign_[i];

  std::vector<char> used(n_, 0);
  std::vector<double> y(n_, 0.0);
  std::vector<int> yidx(n_), stack(n_), next(lp_.begin(), lp_.end() - 1);
  bumped_ = 0;

  for (int k = 0; k < n_; ++k) {
    int nnz_y = 0;
    d_[k] = 0.0;
    for (int p = ap_[k]; p < ap_[k + 1]; ++p) {
      const int b = ai_[p];
      if (b == k) {
        d_[k] = ax_[p];
        continue;
      }
      y[b] = ax_[p];
      if (used[b]) continue;
      // Reach of b in the elimination tree, stopping at already visited nodes.
      int depth = 0;
      for (int i = b; i != -1 && i < k && !used[i]; i = etree_[i]) {
        used[i] = 1;
        stack[depth++] = i;
      }
      while (depth) yidx[nnz_y++] = stack[--depth];
    }
    for (int q = nnz_y - 1; q >= 0; --q) {
      const int c = yidx[q];
      const double yc = y[c];
      for (int j = lp_[c]; j < next[c]; ++j) y[li_[j]] -= lx_[j] * yc;
      const int slot = next[c]++;
      li_[slot] = k;
      lx_[slot] = yc * dinv_[c];
      d_[k] -= yc * lx_[slot];
      y[c] = 0.0;
      used[c] = 0;
    }
    if (psign[k] * d_[k] <= eps_) {
      d_[k] = psign[k] * delta_;
      ++bumped_;
    }
    dinv_[k] = 1.0 / d_[k];
  }
}

Eigen::VectorXd QuasiDefiniteLdl::solve(const Eigen::VectorXd& b) const {
  std::vector<double> x(n_);
  for (int i = 0; i < n_; ++i) x[newidx_[i]] = b[i];
  for (int i = 0; i < n_; ++i)
    for (int j = lp_[i]; j < lp_[i + 1]; ++j) x[li_[j]] -= lx_[j] * x[i];
  for (int i = 0; i < n_; ++i) x[i] *= dinv_[i];
  for (int i = n_ - 1; i >= 0; --i)
    for (int j = lp_[i]; j < lp_[i + 1]; ++j) x[i] -= lx_[j] * x[li_[j]];
  Eigen::VectorXd out(n_);
  for (int i = 0; i < n_; ++i) out[i] = x[newidx_[i]];
  return out;
}

}  // namespace resq::detail
