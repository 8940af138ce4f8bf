#pragma once

#include "fbqo/lattice.hpp"

namespace fbqo {

constexpr double kPoleGuard = 1e-12;

// G_B(w) = sum_a u_a u_a^dagger / (w - e_a) over the cached eigendecomposition.
class Resolvent {
 public:
  Resolvent(const LatticeModel& m, double omega);
  double omega() const { return omega_; }
  cplx element(Index x, Index xp) const;
  CVec apply(const CVec& v) const;

 private:
  const Eigensystem* es_;
  double omega_;
  Vec inv_;
};

void check_pole_guard(const LatticeModel& m, double omega);

cplx resolvent_element(const LatticeModel& m, double omega, Index x, Index xp);

// G_B(w) v by a sparse direct solve; elementwise accurate far into exponential tails.
CVec resolvent_column(const LatticeModel& m, double omega, const CVec& v);

double chain_green_analytic(double j, double delta, int d);

struct FlatBandProjector {
  CMat P;
  double omega_fb = 0.0;
  double tol = 0.0;
  int count = 0;
};

FlatBandProjector fb_projector(const LatticeModel& m, double omega_fb, double tol = 1e-8);

CMat fb_green_approx(const FlatBandProjector& p, double omega);

}  // namespace fbqo
