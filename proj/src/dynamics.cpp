#include "fbqo/dynamics.hpp"

#include <cmath>
#include <numbers>

#include "fbqo/error.hpp"
#include "fbqo/spectrum.hpp"

namespace fbqo {

CMat total_hamiltonian(const LatticeModel& m, const std::vector<EmitterSpec>& emitters) {
  const Index ns = m.n_sites();
  const Index ne = static_cast<Index>(emitters.size());
  CMat h = CMat::Zero(ns + ne, ns + ne);
  h.topLeftCorner(ns, ns) = real_space_hamiltonian(m);
  for (Index i = 0; i < ne; ++i) {
    const EmitterSpec& e = emitters[i];
    h(ns + i, ns + i) = e.omega0;
    for (const Coupling& c : e.couplings) {
      require(c.site >= 0 && c.site < ns, "emitter coupling site out of range");
      // g_l a_{x_l}^dagger sigma + h.c.
      h(c.site, ns + i) += c.g;
      h(ns + i, c.site) += std::conj(c.g);
    }
  }
  return h;
}

TimeSeries evolve(const LatticeModel& m, const std::vector<EmitterSpec>& emitters, InitialState initial,
                  const std::vector<double>& t, bool site_populations) {
  const Index ns = m.n_sites();
  const Index ne = static_cast<Index>(emitters.size());
  const Index dim = ns + ne;
  Index start = 0;
  if (initial.kind == InitialKind::Emitter) {
    require(initial.index >= 0 && initial.index < ne, "evolve: initial emitter out of range");
    start = ns + initial.index;
  } else {
    require(initial.index >= 0 && initial.index < ns, "evolve: initial site out of range");
    start = initial.index;
  }
  const Eigensystem es = Eigensystem::hermitian(total_hamiltonian(m, emitters));
  CVec c0 = CVec::Zero(dim);
  c0[start] = 1.0;
  const CVec coef = es.project(c0);
  const Vec& e = es.values();

  TimeSeries ts;
  ts.t = t;
  const Index nt = static_cast<Index>(t.size());
  ts.emitter_population.resize(nt, ne);
  if (site_populations) ts.site_population.resize(nt, ns);
  ts.norm.resize(t.size());
  const Index chunk = 512;
  for (Index t0 = 0; t0 < nt; t0 += chunk) {
    const Index len = std::min(chunk, nt - t0);
    CMat c(dim, len);
    for (Index j = 0; j < len; ++j)
      for (Index a = 0; a < dim; ++a) c(a, j) = std::polar(1.0, -e[a] * t[t0 + j]) * coef[a];
    const CMat psi = es.expand(c);
    for (Index j = 0; j < len; ++j) {
      const Index it = t0 + j;
      for (Index i = 0; i < ne; ++i) ts.emitter_population(it, i) = std::norm(psi(ns + i, j));
      if (site_populations)
        for (Index s = 0; s < ns; ++s) ts.site_population(it, s) = std::norm(psi(s, j));
      ts.norm[it] = psi.col(j).norm();
    }
  }
  return ts;
}

double rabi_frequency(const LatticeModel& m, const CVec& chi, double g, double tol) {
  const FlatBandInfo fb = primary_flat_band(m);
  if (!(fb.gap_below > 0.0 && fb.gap_above > 0.0)) fail(ErrorCode::Unsupported, "rabi_frequency: flat band is not isolated");
  const Eigensystem& es = m.eigensystem();
  const CVec c = es.project(chi / chi.norm());
  double w = 0.0;
  for (Index a = 0; a < es.size(); ++a)
    if (std::abs(es.values()[a] - fb.energy) < tol) w += std::norm(c[a]);
  if (w < 1e-20) w = 0.0;  // rounding floor
  return g * std::sqrt(w);
}

double rabi_frequency(const LatticeModel& m, const EmitterSpec& e, double tol) {
  return rabi_frequency(m, e.chi(m.n_sites()), e.gbar(), tol);
}

RabiEstimate rabi_from_population(const std::vector<double>& t, const std::vector<double>& p) {
  require(t.size() == p.size() && t.size() >= 3, "rabi_from_population: need matching series of >= 3 points");
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    if (p[i] >= 0.5 || p[i] > p[i - 1] || p[i] > p[i + 1]) continue;
    // Parabola through (t[i-1], p[i-1]), (t[i], p[i]), (t[i+1], p[i+1]).
    const double x0 = t[i - 1], x1 = t[i], x2 = t[i + 1];
    const double y0 = p[i - 1], y1 = p[i], y2 = p[i + 1];
    const double d0 = (y1 - y0) / (x1 - x0);
    const double d1 = (y2 - y1) / (x2 - x1);
    const double a = (d1 - d0) / (x2 - x0);
    RabiEstimate r;
    if (a > 0.0) {
      const double b = d0 - a * (x0 + x1);
      r.t_min = -b / (2.0 * a);
      r.p_min = y0 + d0 * (r.t_min - x0) + a * (r.t_min - x0) * (r.t_min - x1);
    } else {
      r.t_min = x1;
      r.p_min = y1;
    }
    r.omega = std::numbers::pi / (2.0 * r.t_min);
    return r;
  }
  fail(ErrorCode::InsufficientData, "no population minimum below 1/2 in the time window");
}

}  // namespace fbqo
