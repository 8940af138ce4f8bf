#pragma once

#include <utility>
#include <vector>

#include "fbqo/boundstate.hpp"
#include "fbqo/flatband.hpp"
#include "fbqo/interactions.hpp"

namespace fbqo {

enum class SiteStateOrigin { Couplings, Cls, ClsSuperposition, Envelope };

struct SiteState {
  CVec chi;
  SiteStateOrigin origin = SiteStateOrigin::Couplings;
};

SiteState site_state(const EmitterSpec& e, Index n_sites);

// Emitters whose couplings follow a CLS stencil, a CLS superposition, or an exponential envelope.
EmitterSpec cls_emitter(const LatticeModel& m, const ClsSet& cls, Cell n, double g, double omega0);
EmitterSpec cls_superposition_emitter(const LatticeModel& m, const ClsSet& cls,
                                      const std::vector<std::pair<Cell, cplx>>& coeffs, double g, double omega0);
EmitterSpec envelope_emitter(const LatticeModel& m, int sublattice, Cell center, double ell, double g, double omega0);

constexpr double kEnvelopeCutoff = 1e-12;

// || (1 - P_FB) chi || for the states within tol of omega_fb.
double fb_membership_defect(const LatticeModel& m, double omega_fb, const CVec& chi, double tol = 1e-8);

// psi = gbar G_B(omega) chi evaluated at omega0, or at the exact pole when requested.
BoundStateResult giant_bound_state(const LatticeModel& m, const EmitterSpec& e, double omega0,
                                   bool exact_pole = false);

// K_nn' = gbar^2 / (omega0 - omega_FB) <chi_n|chi_n'>.
InteractionMatrix giant_interaction(const LatticeModel& m, const std::vector<EmitterSpec>& giants, double omega0);

}  // namespace fbqo
