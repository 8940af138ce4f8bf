#include "fbqo/greens.hpp"

#include <cmath>

#include "fbqo/error.hpp"

namespace fbqo {

namespace {

constexpr Index kDenseGuardSites = 1024;

}  // namespace

void check_pole_guard(const LatticeModel& m, double omega) {
  const double guard = kPoleGuard * m.params().J;
  if (!m.has_eigensystem() && m.n_sites() > kDenseGuardSites) {
    const SpMat h = real_space_sparse(m);
    const Index lo = count_eigenvalues_below(h, omega - guard);
    const Index hi = count_eigenvalues_below(h, omega + guard);
    if (lo < 0 || hi < 0 || hi != lo)
      fail(ErrorCode::PoleProximity, "evaluation energy within guard band of an eigenvalue");
    return;
  }
  const Vec& e = m.eigensystem().values();
  for (Index a = 0; a < e.size(); ++a)
    if (std::abs(omega - e[a]) <= guard)
      fail(ErrorCode::PoleProximity, "evaluation energy within guard band of eigenvalue " + std::to_string(e[a]));
}

Resolvent::Resolvent(const LatticeModel& m, double omega) : es_(&m.eigensystem()), omega_(omega) {
  check_pole_guard(m, omega);
  inv_ = (omega - es_->values().array()).inverse().matrix();
}

cplx Resolvent::element(Index x, Index xp) const {
  cplx s = 0.0;
  for (Index a = 0; a < es_->size(); ++a) s += es_->component(x, a) * std::conj(es_->component(xp, a)) * inv_[a];
  return s;
}

CVec Resolvent::apply(const CVec& v) const {
  CVec c = es_->project(v);
  c.array() *= inv_.array().cast<cplx>();
  return es_->expand(c);
}

cplx resolvent_element(const LatticeModel& m, double omega, Index x, Index xp) {
  require(x >= 0 && x < m.n_sites() && xp >= 0 && xp < m.n_sites(), "resolvent_element: site out of range");
  return Resolvent(m, omega).element(x, xp);
}

CVec resolvent_column(const LatticeModel& m, double omega, const CVec& v) {
  require(v.size() == m.n_sites(), "resolvent_column: vector size mismatch");
  check_pole_guard(m, omega);
  return shifted_solve(real_space_sparse(m), omega, v);
}

double chain_green_analytic(double j, double delta, int d) {
  require(delta > 0.0 && j > 0.0, "chain_green_analytic: need J > 0 and delta > 0");
  d = std::abs(d);
  const double sign = d % 2 == 0 ? 1.0 : -1.0;
  return sign / (2.0 * std::sqrt(j * delta)) * std::exp(-d / std::sqrt(j / delta));
}

FlatBandProjector fb_projector(const LatticeModel& m, double omega_fb, double tol) {
  const Eigensystem& es = m.eigensystem();
  std::vector<Index> states;
  for (Index a = 0; a < es.size(); ++a)
    if (std::abs(es.values()[a] - omega_fb) < tol) states.push_back(a);
  if (states.empty()) fail(ErrorCode::NoFlatBand, "no eigenvalues within tolerance of the flat-band energy");
  FlatBandProjector p;
  p.P = es.projector(states);
  p.omega_fb = omega_fb;
  p.tol = tol;
  p.count = static_cast<int>(states.size());
  return p;
}

CMat fb_green_approx(const FlatBandProjector& p, double omega) {
  require(omega != p.omega_fb, "fb_green_approx: omega equals the flat-band energy");
  return p.P / (omega - p.omega_fb);
}

}  // namespace fbqo
