#pragma once

#include <array>
#include <utility>
#include <vector>

#include "fbqo/lattice.hpp"

namespace fbqo {

struct StencilEntry {
  int sub;
  Cell offset;
  double c;
};

struct ClsSet {
  ModelKind kind = ModelKind::Chain;
  int dim = 1;
  double omega_fb = 0.0;
  std::vector<StencilEntry> stencil;
  std::array<int, 2> U = {1, 1};
  std::array<double, 2> alpha = {0.0, 0.0};
};

ClsSet cls_set(const LatticeModel& m);
CVec cls_state(const LatticeModel& m, const ClsSet& cls, Cell n);
double cls_overlap(const ClsSet& cls, Cell dn);

double f_of_k(const std::array<double, 2>& alpha, int dim, const KVec& k);
double f_of_k(const ClsSet& cls, const KVec& k);

// Discrete BZ sum (1/N) sum_k e^{ik.dn} / f(k) on an nk-per-axis grid.
double xi_numeric(const std::array<double, 2>& alpha, int dim, Cell dn, std::array<int, 2> nk);
double xi_numeric(const ClsSet& cls, Cell dn, int nk);

double settsech(double x);
double xi_analytic_1d(double alpha, int dn);
double lambda_1d(double alpha);
std::pair<double, double> lambda_2d(double alpha);

// Isotropic 2D weight along a lattice axis. The inner k_y integral is done by residues; the
// remaining contour integral collapses onto the cut joining z_{1,+} and z_{2,+}, evaluated by
// Gauss-Chebyshev quadrature.
double xi_2d_axis(double alpha, int d);

struct TwoExponentialFit {
  double A = 0.0;
  double B = 0.0;
  double max_rel_error = 0.0;
};

// Least-squares A, B for A e^{-d/lambda_2D} + B e^{-d/lambda'_2D} against xi_2d_axis on [d_min, d_max].
TwoExponentialFit xi_2d_two_exponential(double alpha, int d_min, int d_max);

CMat projector_cls_expansion(const ClsSet& cls, const LatticeModel& m);

// w_n = sum_n' xi_{nn'} phi*_{n'}(x0), indexed by cell.
CVec bs_cls_weights(const ClsSet& cls, const LatticeModel& m, Index x0);

}  // namespace fbqo
