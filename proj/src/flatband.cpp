#include "fbqo/flatband.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "fbqo/error.hpp"

namespace fbqo {

namespace {

double overlap_between(const std::vector<StencilEntry>& st, Cell dn) {
  double s = 0.0;
  for (const StencilEntry& p : st)
    for (const StencilEntry& q : st)
      if (p.sub == q.sub && q.offset[0] + dn[0] == p.offset[0] && q.offset[1] + dn[1] == p.offset[1]) s += p.c * q.c;
  return s;
}

}  // namespace

ClsSet cls_set(const LatticeModel& m) {
  if (m.disordered()) fail(ErrorCode::Unsupported, "CLS stencils are defined for clean lattices only");
  ClsSet cls;
  cls.kind = m.kind();
  cls.dim = m.dim();
  const ModelParams& p = m.params();
  const double r2 = std::numbers::sqrt2;
  switch (m.kind()) {
    case ModelKind::Sawtooth:
      cls.omega_fb = -2.0 * p.J;
      cls.stencil = {{0, {0, 0}, 0.5}, {0, {-1, 0}, 0.5}, {1, {0, 0}, -r2 / 2.0}};
      cls.U = {2, 1};
      break;
    case ModelKind::Stub: {
      const double nrm = std::sqrt(2.0 + p.Delta);
      cls.omega_fb = 0.0;
      cls.stencil = {{0, {0, 0}, 1.0 / nrm}, {0, {1, 0}, 1.0 / nrm}, {2, {0, 0}, -std::sqrt(p.Delta) / nrm}};
      cls.U = {2, 1};
      break;
    }
    case ModelKind::DoubleComb:
      cls.omega_fb = p.omega_c;
      cls.stencil = {{0, {0, 0}, 1.0 / r2}, {1, {0, 0}, -1.0 / r2}};
      cls.U = {1, 1};
      break;
    case ModelKind::Kagome1D: {
      const double c = 1.0 / std::sqrt(6.0);
      cls.omega_fb = 2.0 * p.J;
      cls.stencil = {{2, {0, 0}, c}, {2, {1, 0}, c}, {0, {0, 0}, -c}, {1, {0, 0}, -c}, {3, {0, 0}, -c}, {4, {0, 0}, -c}};
      cls.U = {2, 1};
      break;
    }
    case ModelKind::Checkerboard:
      cls.omega_fb = 0.0;
      cls.stencil = {{0, {0, 0}, 0.5}, {0, {-1, 0}, -0.5}, {1, {0, 0}, 0.5}, {1, {0, 1}, -0.5}};
      cls.U = {2, 2};
      break;
    case ModelKind::Chain:
      fail(ErrorCode::Unsupported, "the chain has no flat band");
  }
  std::vector<StencilEntry> kept;
  for (const StencilEntry& e : cls.stencil)
    if (e.c != 0.0) kept.push_back(e);
  cls.stencil = kept;
  cls.alpha[0] = overlap_between(cls.stencil, {1, 0});
  cls.alpha[1] = cls.dim == 2 ? overlap_between(cls.stencil, {0, 1}) : 0.0;
  return cls;
}

CVec cls_state(const LatticeModel& m, const ClsSet& cls, Cell n) {
  CVec v = CVec::Zero(m.n_sites());
  for (const StencilEntry& e : cls.stencil) v[m.site({n[0] + e.offset[0], n[1] + e.offset[1]}, e.sub)] += e.c;
  return v;
}

double cls_overlap(const ClsSet& cls, Cell dn) { return overlap_between(cls.stencil, dn); }

double f_of_k(const std::array<double, 2>& alpha, int dim, const KVec& k) {
  double f = 1.0 + 2.0 * alpha[0] * std::cos(k[0]);
  if (dim == 2) f += 2.0 * alpha[1] * std::cos(k[1]);
  return f;
}

double f_of_k(const ClsSet& cls, const KVec& k) { return f_of_k(cls.alpha, cls.dim, k); }

double xi_numeric(const std::array<double, 2>& alpha, int dim, Cell dn, std::array<int, 2> nk) {
  require(dim == 1 || dim == 2, "xi_numeric: dimension must be 1 or 2");
  if (dim == 1) nk[1] = 1;
  require(nk[0] > 0 && nk[1] > 0, "xi_numeric: grid size must be positive");
  if (alpha[0] == 0.0 && (dim == 1 || alpha[1] == 0.0)) {
    // f = 1: the zone sum is a Kronecker delta on the periodic grid.
    const bool zero = dn[0] % nk[0] == 0 && (dim == 1 || dn[1] % nk[1] == 0);
    return zero ? 1.0 : 0.0;
  }
  const std::size_t total = static_cast<std::size_t>(nk[0]) * nk[1];
  std::vector<double> re(total), im(total);
  const double two_pi = 2.0 * std::numbers::pi;
  std::size_t t = 0;
  for (int i = 0; i < nk[0]; ++i) {
    const double kx = two_pi * i / nk[0];
    for (int j = 0; j < nk[1]; ++j, ++t) {
      const double ky = dim == 2 ? two_pi * j / nk[1] : 0.0;
      const double f = f_of_k(alpha, dim, {kx, ky});
      if (f < 1e-14) fail(ErrorCode::SingularF, "f(k) vanishes on the grid");
      const double ph = kx * dn[0] + (dim == 2 ? ky * dn[1] : 0.0);
      re[t] = std::cos(ph) / f;
      im[t] = std::sin(ph) / f;
    }
  }
  const double xr = pairwise_sum(re.data(), total) / static_cast<double>(total);
  const double xim = pairwise_sum(im.data(), total) / static_cast<double>(total);
  if (std::abs(xim) > 1e-12) fail(ErrorCode::Internal, "xi_numeric: non-negligible imaginary part");
  return xr;
}

double xi_numeric(const ClsSet& cls, Cell dn, int nk) { return xi_numeric(cls.alpha, cls.dim, dn, {nk, nk}); }

double settsech(double x) {
  require(x > 0.0 && x <= 1.0, "settsech: argument must lie in (0, 1]");
  return std::log((1.0 + std::sqrt((1.0 - x) * (1.0 + x))) / x);
}

double lambda_1d(double alpha) {
  require(alpha != 0.0 && std::abs(alpha) < 0.5, "lambda_1d: need 0 < |alpha| < 1/2");
  return 1.0 / settsech(2.0 * std::abs(alpha));
}

double xi_analytic_1d(double alpha, int dn) {
  require(std::abs(alpha) < 0.5, "xi_analytic_1d: need |alpha| < 1/2");
  dn = std::abs(dn);
  if (alpha == 0.0) return dn == 0 ? 1.0 : 0.0;
  const double sign = (alpha > 0.0 && dn % 2 == 1) ? -1.0 : 1.0;
  return sign / std::sqrt(1.0 - 4.0 * alpha * alpha) * std::exp(-dn / lambda_1d(alpha));
}

std::pair<double, double> lambda_2d(double alpha) {
  require(alpha != 0.0 && std::abs(alpha) <= 0.25, "lambda_2d: need 0 < |alpha| <= 1/4");
  auto inv = [](double x) {
    const double s = settsech(std::abs(x));
    return s == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / s;
  };
  return {inv(2.0 * alpha / (1.0 - 2.0 * alpha)), inv(2.0 * alpha / (1.0 + 2.0 * alpha))};
}

double xi_2d_axis(double alpha, int d) {
  require(alpha != 0.0, "xi_2d_axis: alpha = 0 is the Kronecker delta");
  require(std::abs(alpha) <= 0.25, "xi_2d_axis: need |alpha| <= 1/4");
  require(d >= 0, "xi_2d_axis: distance must be non-negative");
  if (std::abs(alpha) == 0.25) fail(ErrorCode::SingularF, "xi diverges at |alpha| = 1/4");
  const double z1 = (2.0 * alpha - 1.0 + std::sqrt(1.0 - 4.0 * alpha)) / (2.0 * alpha);
  const double z2 = (-(2.0 * alpha + 1.0) + std::sqrt(1.0 + 4.0 * alpha)) / (2.0 * alpha);
  const double lo = std::min(z1, z2);
  const double hi = std::max(z1, z2);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const int n = 128;
  std::vector<double> terms(n);
  for (int i = 0; i < n; ++i) {
    const double x = mid + half * std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * n));
    terms[i] = std::pow(x, d) / std::sqrt(std::abs((x - 1.0 / z1) * (x - 1.0 / z2)));
  }
  return pairwise_sum(terms.data(), n) / n / std::abs(alpha);
}

TwoExponentialFit xi_2d_two_exponential(double alpha, int d_min, int d_max) {
  require(d_max > d_min + 1, "xi_2d_two_exponential: need at least 3 distances");
  const auto [l1, l2] = lambda_2d(alpha);
  const int n = d_max - d_min + 1;
  Mat a(n, 2);
  Vec b(n);
  for (int i = 0; i < n; ++i) {
    const int d = d_min + i;
    const double xi = xi_2d_axis(alpha, d);
    const double sign = (alpha > 0.0 && d % 2 == 1) ? -1.0 : 1.0;
    a(i, 0) = sign * std::exp(-d / l1) / xi;
    a(i, 1) = sign * std::exp(-d / l2) / xi;
    b[i] = 1.0;
  }
  const Vec ab = a.colPivHouseholderQr().solve(b);
  TwoExponentialFit fit;
  fit.A = ab[0];
  fit.B = ab[1];
  fit.max_rel_error = (a * ab - b).cwiseAbs().maxCoeff();
  return fit;
}

CMat projector_cls_expansion(const ClsSet& cls, const LatticeModel& m) {
  if (cls.kind == ModelKind::Checkerboard)
    fail(ErrorCode::Unsupported, "checkerboard CLSs do not span the flat band (loop states missing)");
  const int nc = m.n_cells();
  const Cell& n = m.cells();
  Mat phi = Mat::Zero(m.n_sites(), nc);
  for (int c = 0; c < nc; ++c) phi.col(c) = cls_state(m, cls, m.cell_of(c)).real();
  std::vector<double> xi_of(static_cast<std::size_t>(nc));
  for (int c = 0; c < nc; ++c) xi_of[c] = xi_numeric(cls.alpha, cls.dim, m.cell_of(c), {n[0], n[1]});
  Mat xi(nc, nc);
  for (int i = 0; i < nc; ++i) {
    const Cell ci = m.cell_of(i);
    for (int j = 0; j < nc; ++j) {
      const Cell cj = m.cell_of(j);
      xi(i, j) = xi_of[m.cell_index({ci[0] - cj[0], ci[1] - cj[1]})];
    }
  }
  Mat p = phi * xi * phi.transpose();
  return p.cast<cplx>();
}

CVec bs_cls_weights(const ClsSet& cls, const LatticeModel& m, Index x0) {
  require(x0 >= 0 && x0 < m.n_sites(), "bs_cls_weights: site out of range");
  if (cls.kind == ModelKind::Checkerboard)
    fail(ErrorCode::Unsupported, "checkerboard CLSs do not span the flat band (loop states missing)");
  const int nc = m.n_cells();
  const Cell& n = m.cells();
  std::vector<double> xi_of(static_cast<std::size_t>(nc));
  for (int c = 0; c < nc; ++c) xi_of[c] = xi_numeric(cls.alpha, cls.dim, m.cell_of(c), {n[0], n[1]});
  // phi_{n'}(x0) is nonzero only for the cells whose stencil touches x0.
  const Cell c0 = m.site_cell(x0);
  const int s0 = m.site_sublattice(x0);
  CVec w = CVec::Zero(nc);
  for (const StencilEntry& e : cls.stencil) {
    if (e.sub != s0) continue;
    const Cell np = m.wrap({c0[0] - e.offset[0], c0[1] - e.offset[1]});
    for (int c = 0; c < nc; ++c) {
      const Cell cn = m.cell_of(c);
      w[c] += xi_of[m.cell_index({cn[0] - np[0], cn[1] - np[1]})] * e.c;
    }
  }
  return w;
}

}  // namespace fbqo
