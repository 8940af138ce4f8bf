#pragma once

#include <string>
#include <vector>

#include "fbqo/boundstate.hpp"

namespace fbqo {

// K_ij = g <chi_i|psi_BS,j> with H_eff = sum_{i>j} (K_ij s_i^+ s_j + h.c.) + sum_i K_ii s_i^+ s_i.
constexpr const char* kKConvention = "K_ij = g<chi_i|psi_j>; H_eff sums i>j once plus diagonal";

struct InteractionMatrix {
  std::vector<EmitterSpec> emitters;
  CMat K;
  bool exact_pole = false;
  std::string convention = kKConvention;
  std::vector<std::string> warnings;
};

InteractionMatrix interaction_matrix(const LatticeModel& m, const std::vector<EmitterSpec>& emitters,
                                     bool exact_pole = false);

CMat effective_hamiltonian(const CMat& K);

struct SpinTrace {
  std::vector<double> t;
  CMat c;  // c(it, n)

  double population(Index it, Index n) const { return std::norm(c(it, n)); }
};

SpinTrace spin_dynamics(const CMat& h_eff, Index initial, const std::vector<double>& t);

}  // namespace fbqo
