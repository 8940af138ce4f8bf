#pragma once

#include <vector>

#include "fbqo/boundstate.hpp"

namespace fbqo {

enum class InitialKind { Emitter, Site };

struct InitialState {
  InitialKind kind = InitialKind::Emitter;
  Index index = 0;
};

struct TimeSeries {
  std::vector<double> t;
  Mat emitter_population;  // (it, emitter)
  Mat site_population;     // (it, site), filled on request
  std::vector<double> norm;
};

// Single-excitation Hamiltonian over [sites..., emitters...].
CMat total_hamiltonian(const LatticeModel& m, const std::vector<EmitterSpec>& emitters);

TimeSeries evolve(const LatticeModel& m, const std::vector<EmitterSpec>& emitters, InitialState initial,
                  const std::vector<double>& t, bool site_populations = false);

double rabi_frequency(const LatticeModel& m, const CVec& chi, double g, double tol = 1e-8);
double rabi_frequency(const LatticeModel& m, const EmitterSpec& e, double tol = 1e-8);

struct RabiEstimate {
  double omega = 0.0;
  double t_min = 0.0;
  double p_min = 0.0;
};

// First population minimum below 1/2, refined by a parabola through three samples.
RabiEstimate rabi_from_population(const std::vector<double>& t, const std::vector<double>& p);

}  // namespace fbqo
