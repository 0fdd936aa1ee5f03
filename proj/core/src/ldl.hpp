#pragma once

#include <Eigen/Sparse>
#include <vector>

namespace resq::detail {

/// Sparse LDL^T for quasi-definite matrices with known pivot signs.
///
/// Pivots whose sign disagrees with the expected one, or whose magnitude is
/// below a small threshold, are replaced by +-delta (dynamic regularisation),
/// so rank-deficient constraint blocks still factor. Callers recover accuracy
/// with iterative refinement against the unregularised matrix.
class QuasiDefiniteLdl {
 public:
  /// `sign[i]` is +1 for primal and -1 for dual indices.
  explicit QuasiDefiniteLdl(std::vector<int> sign, double delta = 1e-7, double eps = 1e-13);

  /// Symbolic analysis: fill-reducing ordering and elimination tree. The
  /// matrix holds the lower triangle, diagonal included.
  void analyze(const Eigen::SparseMatrix<double>& lower);
  /// Numeric factorization of a matrix with the analysed pattern.
  void factorize(const Eigen::SparseMatrix<double>& lower);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  int regularized_pivots() const { return bumped_; }

 private:
  void permute_upper(const Eigen::SparseMatrix<double>& lower);

  std::vector<int> sign_;
  double delta_, eps_;
  int n_ = 0;
  std::vector<int> newidx_;  // original -> permuted
  // Permuted upper triangle, CSC.
  std::vector<int> ap_, ai_;
  std::vector<double> ax_;
  std::vector<int> slot_;  // lower-triangle entry k -> position in ax_
  // Factor.
  std::vector<int> etree_, lnz_, lp_, li_;
  std::vector<double> lx_, d_, dinv_;
  int bumped_ = 0;
};

}  // namespace resq::detail
