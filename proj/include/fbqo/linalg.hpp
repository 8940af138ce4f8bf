#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <vector>

namespace fbqo {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<cplx>;
using Index = Eigen::Index;

// Dense Hermitian eigendecomposition H = U diag(e) U^dagger with ascending e.
// Real symmetric input is stored with real eigenvectors.
class Eigensystem {
 public:
  static Eigensystem hermitian(const CMat& h);
  static Eigensystem symmetric(const Mat& h);

  const Vec& values() const { return e_; }
  Index size() const { return e_.size(); }
  bool is_real() const { return real_; }

  CVec project(const CVec& x) const;
  CVec expand(const CVec& c) const;
  CMat expand(const CMat& c) const;
  cplx component(Index site, Index state) const;
  CMat projector(const std::vector<Index>& states) const;

 private:
  Vec e_;
  Mat ur_;
  CMat uc_;
  bool real_ = true;
};

bool is_real_matrix(const CMat& h);
double max_abs(const CMat& m);

// Solves (w - H) x = b for sparse Hermitian H by sparse LU.
CVec shifted_solve(const SpMat& h, double w, const CVec& b);
CMat shifted_solve(const SpMat& h, double w, const CMat& b);

// Number of eigenvalues of sparse Hermitian H below x, from the inertia of an LDL^T factorization.
// Returns -1 when x hits an eigenvalue to working precision.
Index count_eigenvalues_below(const SpMat& h, double x);

// Pairwise summation keeps BZ sums reproducible and accurate.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace fbqo
