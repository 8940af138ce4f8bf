#pragma once

#include <vector>

#include "fbqo/lattice.hpp"

namespace fbqo {

struct Coupling {
  Index site;
  cplx g;
};

struct EmitterSpec {
  double omega0 = 0.0;
  std::vector<Coupling> couplings;

  double gbar() const;
  // Normalized coupling vector chi(x_l) = g_l / gbar.
  CVec chi(Index n_sites) const;
};

struct PoleSolution {
  double omega = 0.0;
  double residual = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct BoundStateResult {
  double omega_bs = 0.0;
  double omega0 = 0.0;
  CVec psi;           // jointly normalized with the atomic amplitude
  CVec psi_unnormalized;  // gbar G_B(w) chi, atomic amplitude 1
  cplx atomic = 1.0;
  double norm_residual = 0.0;
  double eigen_residual = 0.0;
};

struct FitWindow {
  int d_min = 2;
  int d_max = -1;  // negative: automatic
};

struct LocalizationFit {
  double lambda = 0.0;
  double r2 = 0.0;
  int points = 0;
  int d_first = 0;
  int d_last = 0;
};

constexpr double kAmplitudeFloor = 1e-13;

// Self-consistency function w - w0 - gbar^2 <chi|G_B(w)|chi>.
double pole_function(const LatticeModel& m, const EmitterSpec& e, double omega);

PoleSolution solve_pole_detail(const LatticeModel& m, const EmitterSpec& e);
double solve_pole(const LatticeModel& m, const EmitterSpec& e);

BoundStateResult bs_wavefunction(const LatticeModel& m, const EmitterSpec& e, double omega_bs);
BoundStateResult bound_state(const LatticeModel& m, const EmitterSpec& e);

LocalizationFit localization_length_fit(const LatticeModel& m, const BoundStateResult& r, int sublattice,
                                        Cell center, FitWindow window = {}, int axis = 0,
                                        double floor = kAmplitudeFloor);

}  // namespace fbqo
