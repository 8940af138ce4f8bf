#include "fbqo/boundstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fbqo/error.hpp"
#include "fbqo/greens.hpp"
#include "fbqo/spectrum.hpp"

namespace fbqo {

double EmitterSpec::gbar() const {
  double s = 0.0;
  for (const Coupling& c : couplings) s += std::norm(c.g);
  return std::sqrt(s);
}

CVec EmitterSpec::chi(Index n) const {
  const double g = gbar();
  require(g > 0.0, "emitter has vanishing total coupling");
  CVec x = CVec::Zero(n);
  for (const Coupling& c : couplings) {
    require(c.site >= 0 && c.site < n, "coupling site out of lattice bounds");
    x[c.site] += c.g / g;
  }
  return x;
}

namespace {

struct SelfEnergy {
  const Vec* e;
  Vec w;
  double g2;
  mutable std::vector<double> terms;

  double operator()(double omega) const {
    for (Index a = 0; a < e->size(); ++a) terms[a] = w[a] / (omega - (*e)[a]);
    return g2 * pairwise_sum(terms.data(), terms.size());
  }
};

SelfEnergy make_self_energy(const LatticeModel& m, const EmitterSpec& em) {
  const Eigensystem& es = m.eigensystem();
  const double g = em.gbar();
  SelfEnergy s{&es.values(), Vec(), g * g, std::vector<double>(static_cast<std::size_t>(es.size()))};
  if (g > 0.0) {
    const CVec c = es.project(em.chi(m.n_sites()));
    s.w = c.cwiseAbs2();
  } else {
    s.w = Vec::Zero(es.size());
  }
  return s;
}

// Bloch bands on the lattice's own k grid; in-band roots are finite-size artifacts.
void require_outside_bands(const LatticeModel& m, double w0, double guard) {
  if (m.disordered()) return;
  const BandStructure bs = band_structure(m);
  for (Index b = 0; b < bs.bands.rows(); ++b) {
    const double lo = bs.bands.row(b).minCoeff();
    const double hi = bs.bands.row(b).maxCoeff();
    if (w0 > lo + guard && w0 < hi - guard) fail(ErrorCode::NoRootInGap, "omega0 lies inside a band");
  }
}

}  // namespace

double pole_function(const LatticeModel& m, const EmitterSpec& e, double omega) {
  return omega - e.omega0 - make_self_energy(m, e)(omega);
}

PoleSolution solve_pole_detail(const LatticeModel& m, const EmitterSpec& em) {
  PoleSolution sol;
  const double g = em.gbar();
  const double w0 = em.omega0;
  if (g == 0.0) {
    sol.omega = w0;
    sol.lower = sol.upper = w0;
    return sol;
  }
  const double j = m.params().J;
  const double guard = kPoleGuard * j;
  require_outside_bands(m, w0, guard);
  const SelfEnergy sigma = make_self_energy(m, em);
  const Vec& e = *sigma.e;
  for (Index a = 0; a < e.size(); ++a)
    if (std::abs(w0 - e[a]) <= guard) fail(ErrorCode::NoRootInGap, "omega0 lies on the bath spectrum");

  const Index p = std::upper_bound(e.data(), e.data() + e.size(), w0) - e.data();
  double lo = p > 0 ? e[p - 1] + 10.0 * guard : std::min(w0, e[0]) - g - j;
  double hi = p < e.size() ? e[p] - 10.0 * guard : std::max(w0, e[e.size() - 1]) + g + j;
  sol.lower = lo;
  sol.upper = hi;
  auto f = [&](double w) { return w - w0 - sigma(w); };
  double flo = f(lo);
  double fhi = f(hi);
  if (!(flo < 0.0 && fhi > 0.0)) fail(ErrorCode::NoRootInGap, "pole function does not change sign in the gap");
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      flo = fhi = 0.0;
      break;
    }
    if (fm < 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  if (std::abs(flo) <= std::abs(fhi)) {
    sol.omega = lo;
    sol.residual = std::abs(flo);
  } else {
    sol.omega = hi;
    sol.residual = std::abs(fhi);
  }
  return sol;
}

double solve_pole(const LatticeModel& m, const EmitterSpec& e) { return solve_pole_detail(m, e).omega; }

BoundStateResult bs_wavefunction(const LatticeModel& m, const EmitterSpec& em, double omega_bs) {
  const double g = em.gbar();
  const CVec chi = em.chi(m.n_sites());
  BoundStateResult r;
  r.omega_bs = omega_bs;
  r.omega0 = em.omega0;
  CVec psi = g * resolvent_column(m, omega_bs, chi);
  r.psi_unnormalized = psi;
  const double norm = std::sqrt(1.0 + psi.squaredNorm());
  r.psi = psi / norm;
  r.atomic = 1.0 / norm;
  r.norm_residual = std::abs(std::norm(r.atomic) + r.psi.squaredNorm() - 1.0);

  const SpMat h = real_space_sparse(m);
  CVec photon = h * r.psi + g * r.atomic * chi - omega_bs * r.psi;
  const cplx atom = em.omega0 * r.atomic + g * chi.dot(r.psi) - omega_bs * r.atomic;
  r.eigen_residual = std::sqrt(photon.squaredNorm() + std::norm(atom));
  return r;
}

BoundStateResult bound_state(const LatticeModel& m, const EmitterSpec& e) {
  return bs_wavefunction(m, e, solve_pole(m, e));
}

LocalizationFit localization_length_fit(const LatticeModel& m, const BoundStateResult& r, int sublattice,
                                        Cell center, FitWindow window, int axis, double floor) {
  require(sublattice >= 0 && sublattice < m.sublattices(), "fit: sublattice out of range");
  require(axis >= 0 && axis < m.dim(), "fit: axis out of range");
  require(r.psi.size() == m.n_sites(), "fit: wavefunction does not match lattice");
  require(window.d_min >= 0, "fit: d_min must be non-negative");
  const int n_axis = m.cells()[axis];
  const double cutoff = floor * r.psi.cwiseAbs().maxCoeff();
  auto amp = [&](int d) {
    Cell c = center;
    c[axis] += d;
    return std::abs(r.psi[m.site(c, sublattice)]);
  };

  std::vector<double> xs, ys;
  if (window.d_max < 0) {
    const int limit = n_axis / 4;
    for (int d = window.d_min; d <= limit; ++d) {
      const double a = amp(d);
      if (a < cutoff) break;
      xs.push_back(d);
      ys.push_back(std::log(a));
    }
  } else {
    require(window.d_max >= window.d_min, "fit: d_max below d_min");
    require(2 * window.d_max < n_axis, "fit: d_max must stay below N/2");
    for (int d = window.d_min; d <= window.d_max; ++d) {
      const double a = amp(d);
      if (a < cutoff || a == 0.0) continue;
      xs.push_back(d);
      ys.push_back(std::log(a));
    }
  }
  if (xs.size() < 4) fail(ErrorCode::InsufficientData, "fewer than 4 usable points in the fit window");

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  LocalizationFit fit;
  fit.lambda = -1.0 / slope;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.points = static_cast<int>(xs.size());
  fit.d_first = static_cast<int>(xs.front());
  fit.d_last = static_cast<int>(xs.back());
  return fit;
}

}  // namespace fbqo
