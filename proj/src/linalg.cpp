#include "fbqo/linalg.hpp"

#include <lapacke.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <random>

#include "fbqo/error.hpp"

namespace fbqo {

namespace {

CMat combine(const Mat& re, const Mat& im) {
  CMat x(re.rows(), re.cols());
  for (Index j = 0; j < re.cols(); ++j)
    for (Index i = 0; i < re.rows(); ++i) x(i, j) = cplx(re(i, j), im(i, j));
  return x;
}

// Probe residuals ||H U x - U E x|| and ||U^T U x - x||; some BLAS kernel selections return garbage.
template <class M, class V>
bool decomposition_ok(const M& h, const M& u, const Vec& e) {
  const Index n = h.rows();
  const double scale = 1.0 + h.cwiseAbs().maxCoeff();
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int probe = 0; probe < 2; ++probe) {
    V x(n);
    for (Index i = 0; i < n; ++i) x[i] = uni(rng);
    const V ux = u * x;
    const V lhs = h * ux;
    const V rhs = u * (e.array() * x.array()).matrix();
    const double tol = 1e-9 * scale * std::sqrt(static_cast<double>(n)) * x.norm();
    if (!((lhs - rhs).norm() <= tol)) return false;
    if (!((u.adjoint() * ux - x).norm() <= tol)) return false;
  }
  return true;
}

}  // namespace

Eigensystem Eigensystem::symmetric(const Mat& h) {
  require(h.rows() == h.cols(), "eigensolve: matrix not square");
  Eigensystem es;
  es.real_ = true;
  es.ur_ = h;
  es.e_.resize(h.rows());
  const lapack_int n = static_cast<lapack_int>(h.rows());
  if (n == 0) return es;
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, es.ur_.data(), n, es.e_.data());
  if (info != 0 || !decomposition_ok<Mat, Vec>(h, es.ur_, es.e_)) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(h);
    if (solver.info() != Eigen::Success) fail(ErrorCode::Internal, "symmetric eigensolve failed");
    es.e_ = solver.eigenvalues();
    es.ur_ = solver.eigenvectors();
  }
  return es;
}

Eigensystem Eigensystem::hermitian(const CMat& h) {
  require(h.rows() == h.cols(), "eigensolve: matrix not square");
  if (is_real_matrix(h)) return symmetric(h.real());
  Eigensystem es;
  es.real_ = false;
  es.uc_ = h;
  es.e_.resize(h.rows());
  const lapack_int n = static_cast<lapack_int>(h.rows());
  if (n == 0) return es;
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n,
                                   reinterpret_cast<lapack_complex_double*>(es.uc_.data()), n,
                                   es.e_.data());
  if (info != 0 || !decomposition_ok<CMat, CVec>(h, es.uc_, es.e_)) {
    Eigen::SelfAdjointEigenSolver<CMat> solver(h);
    if (solver.info() != Eigen::Success) fail(ErrorCode::Internal, "hermitian eigensolve failed");
    es.e_ = solver.eigenvalues();
    es.uc_ = solver.eigenvectors();
  }
  return es;
}

CVec Eigensystem::project(const CVec& x) const {
  if (real_) {
    const Vec re = ur_.transpose() * x.real();
    const Vec im = ur_.transpose() * x.imag();
    return combine(re, im).col(0);
  }
  return uc_.adjoint() * x;
}

CVec Eigensystem::expand(const CVec& c) const {
  if (real_) {
    const Vec re = ur_ * c.real();
    const Vec im = ur_ * c.imag();
    return combine(re, im).col(0);
  }
  return uc_ * c;
}

CMat Eigensystem::expand(const CMat& c) const {
  if (real_) {
    const Mat re = ur_ * c.real();
    const Mat im = ur_ * c.imag();
    return combine(re, im);
  }
  return uc_ * c;
}

cplx Eigensystem::component(Index site, Index state) const {
  return real_ ? cplx(ur_(site, state), 0.0) : uc_(site, state);
}

CMat Eigensystem::projector(const std::vector<Index>& states) const {
  const Index n = size();
  const Index m = static_cast<Index>(states.size());
  if (real_) {
    Mat sub(n, m);
    for (Index j = 0; j < m; ++j) sub.col(j) = ur_.col(states[j]);
    Mat p = sub * sub.transpose();
    return p.cast<cplx>();
  }
  CMat sub(n, m);
  for (Index j = 0; j < m; ++j) sub.col(j) = uc_.col(states[j]);
  return sub * sub.adjoint();
}

bool is_real_matrix(const CMat& h) {
  for (Index j = 0; j < h.cols(); ++j)
    for (Index i = 0; i < h.rows(); ++i)
      if (h(i, j).imag() != 0.0) return false;
  return true;
}

double max_abs(const CMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

CMat shifted_solve(const SpMat& h, double w, const CMat& b) {
  const Index n = h.rows();
  require(b.rows() == n, "shifted solve: right-hand side size mismatch");
  bool real = true;
  for (int k = 0; k < h.outerSize() && real; ++k)
    for (SpMat::InnerIterator it(h, k); it; ++it)
      if (it.value().imag() != 0.0) {
        real = false;
        break;
      }
  if (real) {
    Eigen::SparseMatrix<double> a = -h.real();
    for (Index i = 0; i < n; ++i) a.coeffRef(i, i) += w;
    a.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) fail(ErrorCode::PoleProximity, "shifted solve: factorization failed");
    const Mat xr = lu.solve(Mat(b.real()));
    const Mat xi = lu.solve(Mat(b.imag()));
    return combine(xr, xi);
  }
  SpMat a = -h;
  for (Index i = 0; i < n; ++i) a.coeffRef(i, i) += w;
  a.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) fail(ErrorCode::PoleProximity, "shifted solve: factorization failed");
  return lu.solve(b);
}

CVec shifted_solve(const SpMat& h, double w, const CVec& b) {
  return shifted_solve(h, w, CMat(b)).col(0);
}

namespace {

template <class S>
Index negative_pivots(Eigen::SparseMatrix<S> a, double x) {
  for (Index i = 0; i < a.rows(); ++i) a.coeffRef(i, i) -= x;
  a.makeCompressed();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<S>> ldlt(a);
  if (ldlt.info() != Eigen::Success) return -1;
  Index count = 0;
  for (Index i = 0; i < a.rows(); ++i) {
    const double d = std::real(ldlt.vectorD()[i]);
    if (d == 0.0) return -1;
    if (d < 0.0) ++count;
  }
  return count;
}

}  // namespace

Index count_eigenvalues_below(const SpMat& h, double x) {
  bool real = true;
  for (int k = 0; k < h.outerSize() && real; ++k)
    for (SpMat::InnerIterator it(h, k); it; ++it)
      if (it.value().imag() != 0.0) real = false;
  if (real) return negative_pivots<double>(h.real(), x);
  return negative_pivots<cplx>(h, x);
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

}  // namespace fbqo
