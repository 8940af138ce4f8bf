#include "fbqo/giant.hpp"

#include <cmath>
#include <sstream>

#include "fbqo/error.hpp"
#include "fbqo/greens.hpp"
#include "fbqo/spectrum.hpp"

namespace fbqo {

SiteState site_state(const EmitterSpec& e, Index n_sites) {
  SiteState s;
  s.chi = e.chi(n_sites);
  s.origin = SiteStateOrigin::Couplings;
  return s;
}

namespace {

EmitterSpec emitter_from_vector(const CVec& v, double g, double omega0) {
  const double nrm = v.norm();
  require(nrm > 0.0, "site state has zero norm");
  EmitterSpec e;
  e.omega0 = omega0;
  for (Index x = 0; x < v.size(); ++x)
    if (v[x] != cplx(0.0, 0.0)) e.couplings.push_back({x, g * v[x] / nrm});
  return e;
}

}  // namespace

EmitterSpec cls_emitter(const LatticeModel& m, const ClsSet& cls, Cell n, double g, double omega0) {
  return emitter_from_vector(cls_state(m, cls, n), g, omega0);
}

EmitterSpec cls_superposition_emitter(const LatticeModel& m, const ClsSet& cls,
                                      const std::vector<std::pair<Cell, cplx>>& coeffs, double g, double omega0) {
  require(!coeffs.empty(), "CLS superposition needs at least one term");
  CVec v = CVec::Zero(m.n_sites());
  for (const auto& [cell, c] : coeffs) v += c * cls_state(m, cls, cell);
  return emitter_from_vector(v, g, omega0);
}

EmitterSpec envelope_emitter(const LatticeModel& m, int sublattice, Cell center, double ell, double g, double omega0) {
  require(ell > 0.0, "envelope length must be positive");
  require(sublattice >= 0 && sublattice < m.sublattices(), "envelope sublattice out of range");
  CVec v = CVec::Zero(m.n_sites());
  const Cell& n = m.cells();
  for (int c = 0; c < m.n_cells(); ++c) {
    const Cell cell = m.cell_of(c);
    double r2 = 0.0;
    for (int d = 0; d < m.dim(); ++d) {
      int dx = ((cell[d] - center[d]) % n[d] + n[d]) % n[d];
      if (dx > n[d] / 2) dx -= n[d];
      r2 += static_cast<double>(dx) * dx;
    }
    const double a = std::exp(-std::sqrt(r2) / ell);
    if (a >= kEnvelopeCutoff) v[m.site(cell, sublattice)] = a;
  }
  return emitter_from_vector(v, g, omega0);
}

double fb_membership_defect(const LatticeModel& m, double omega_fb, const CVec& chi, double tol) {
  const Eigensystem& es = m.eigensystem();
  CVec c = es.project(chi);
  for (Index a = 0; a < es.size(); ++a)
    if (std::abs(es.values()[a] - omega_fb) >= tol) c[a] = 0.0;
  return (chi - es.expand(c)).norm();
}

BoundStateResult giant_bound_state(const LatticeModel& m, const EmitterSpec& e, double omega0, bool exact_pole) {
  EmitterSpec em = e;
  em.omega0 = omega0;
  const double w = exact_pole ? solve_pole(m, em) : omega0;
  return bs_wavefunction(m, em, w);
}

InteractionMatrix giant_interaction(const LatticeModel& m, const std::vector<EmitterSpec>& giants, double omega0) {
  require(!giants.empty(), "giant_interaction: no emitters");
  const FlatBandInfo fb = primary_flat_band(m);
  require(omega0 != fb.energy, "giant_interaction: omega0 equals the flat-band energy");
  const Index n = m.n_sites();
  const Index ng = static_cast<Index>(giants.size());
  InteractionMatrix out;
  out.emitters = giants;
  out.K.resize(ng, ng);
  std::vector<CVec> chis;
  for (Index i = 0; i < ng; ++i) {
    out.emitters[i].omega0 = omega0;
    chis.push_back(giants[i].chi(n));
    const double defect = fb_membership_defect(m, fb.energy, chis.back());
    if (defect > 1e-8) {
      std::ostringstream os;
      os << "giant " << i << " site state leaves the flat band (defect " << defect << ")";
      out.warnings.push_back(os.str());
    }
  }
  for (Index i = 0; i < ng; ++i)
    for (Index j = 0; j < ng; ++j)
      out.K(i, j) = giants[i].gbar() * giants[j].gbar() / (omega0 - fb.energy) * chis[i].dot(chis[j]);
  return out;
}

}  // namespace fbqo
