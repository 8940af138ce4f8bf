#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fbqo/error.hpp"
#include "fbqo/flatband.hpp"
#include "fbqo/giant.hpp"
#include "fbqo/interactions.hpp"
#include "fbqo/lattice.hpp"

using namespace fbqo;

namespace {

EmitterSpec small_atom(Index site, double g, double omega0) {
  EmitterSpec e;
  e.omega0 = omega0;
  e.couplings.push_back({site, cplx(g, 0.0)});
  return e;
}

std::vector<EmitterSpec> atoms_on(const LatticeModel& m, int sub, const std::vector<int>& cells, double g,
                                  double omega0) {
  std::vector<EmitterSpec> out;
  for (int c : cells) out.push_back(small_atom(m.site({c, 0}, sub), g, omega0));
  return out;
}

CMat nn_ring(int n, double k1, double k2) {
  CMat h = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, (i + 1) % n) = h((i + 1) % n, i) = k1;
    h(i, (i + 2) % n) = h((i + 2) % n, i) = k2;
  }
  return h;
}

CVec rk4(const CMat& h, CVec c, double t, int steps) {
  const double dt = t / steps;
  const cplx mi(0.0, -1.0);
  for (int s = 0; s < steps; ++s) {
    const CVec k1 = mi * (h * c);
    const CVec k2 = mi * (h * (c + 0.5 * dt * k1));
    const CVec k3 = mi * (h * (c + 0.5 * dt * k2));
    const CVec k4 = mi * (h * (c + dt * k3));
    c += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return c;
}

}  // namespace

TEST_CASE("two atoms in one cavity") {
  const LatticeModel m(ModelKind::Chain, {1, 1}, 1, ModelParams{}, {0.2}, {});
  const double g = 0.01, w0 = 1.3;
  const InteractionMatrix k = interaction_matrix(m, {small_atom(0, g, w0), small_atom(0, g, w0)});
  const double expect = g * g / (w0 - 0.2);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) {
      CHECK(std::abs(k.K(i, j).real() / expect - 1.0) < 1e-12);
      CHECK(k.K(i, j).imag() == 0.0);
    }
  CHECK(k.convention == std::string(kKConvention));
}

TEST_CASE("chain interactions alternate and decay") {
  const LatticeModel m = build_chain(2000, 1.0);
  std::vector<int> cells;
  for (int d = 0; d <= 12; ++d) cells.push_back(1000 + d);
  const InteractionMatrix k = interaction_matrix(m, atoms_on(m, 0, cells, 1e-3, -2.0 - 0.01));
  for (Index d = 0; d < 12; ++d) {
    const double ratio = (k.K(0, d + 1) / k.K(0, d)).real();
    CHECK(ratio == doctest::Approx(-std::exp(-0.1)).epsilon(0.02));
  }
  CHECK(std::abs(k.K(0, 0)) == doctest::Approx(1e-6 / (2.0 * 0.1)).epsilon(0.01));
}

TEST_CASE("double comb: cross-cell coupling comes only from the dispersive bands") {
  const LatticeModel m = build_double_comb(40, 1.0, 1.0, 0.0);
  const InteractionMatrix k3 = interaction_matrix(m, atoms_on(m, 0, {10, 11, 14}, 1e-3, 1e-3));
  const InteractionMatrix k4 = interaction_matrix(m, atoms_on(m, 0, {10, 11, 14}, 1e-3, 1e-4));
  // On-cell K ~ g^2 <x|P_FB|x> / delta; cross-cell K is detuning independent.
  CHECK(std::abs(k3.K(0, 0) * 1e-3 / (k4.K(0, 0) * 1e-4) - 1.0) < 1e-2);
  CHECK(std::abs(k3.K(0, 1) / k4.K(0, 1) - 1.0) < 1e-2);
  CHECK(std::abs(k4.K(0, 1)) / std::abs(k4.K(0, 0)) < 0.2 * std::abs(k3.K(0, 1)) / std::abs(k3.K(0, 0)));
  CHECK(std::abs(k4.K(0, 2)) < 1e-6 * std::abs(k4.K(0, 0)));

  // Site states inside a single cell's CLS do not interact across cells at all.
  const ClsSet cls = cls_set(m);
  std::vector<EmitterSpec> giants;
  for (int c : {10, 11, 14}) giants.push_back(cls_emitter(m, cls, {c, 0}, 1e-3, 1e-3));
  const InteractionMatrix kg = interaction_matrix(m, giants);
  const double on = std::abs(kg.K(0, 0));
  CHECK(on == doctest::Approx(1e-6 / 1e-3).epsilon(1e-10));
  CHECK(std::abs(kg.K(0, 1)) < 1e-10 * on);
  CHECK(std::abs(kg.K(0, 2)) < 1e-10 * on);
  CHECK(std::abs(kg.K(1, 2)) < 1e-10 * on);
}

TEST_CASE("reciprocity and Hermiticity") {
  for (const LatticeModel& m : {build_sawtooth(40, 1.0), build_stub(40, 1.0, 1.5), build_checkerboard(10, 10, 1.0)}) {
    std::vector<EmitterSpec> em;
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<Index> pick(0, m.n_sites() - 1);
    const double w0 = m.kind() == ModelKind::Sawtooth ? -1.9 : (m.kind() == ModelKind::Stub ? 0.2 : -0.1);
    for (int i = 0; i < 5; ++i) em.push_back(small_atom(pick(rng), 1e-3, w0));
    const InteractionMatrix k = interaction_matrix(m, em);
    CHECK((k.K - k.K.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * k.K.cwiseAbs().maxCoeff());
    const CMat h = effective_hamiltonian(k.K);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);

    // Identical emitters on equivalent sites share one exact pole.
    std::vector<EmitterSpec> same;
    for (int c = 0; c < 4; ++c) same.push_back(small_atom(m.site({2 + 3 * c, 1}, 0), 1e-3, w0));
    const InteractionMatrix ke = interaction_matrix(m, same, true);
    CHECK((ke.K - ke.K.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * ke.K.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("near an isolated flat band K scales as 1/detuning") {
  const LatticeModel m = build_sawtooth(80, 1.0);
  const InteractionMatrix k3 = interaction_matrix(m, atoms_on(m, 0, {40, 41, 42, 43}, 1e-3, -2.0 + 1e-3));
  const InteractionMatrix k4 = interaction_matrix(m, atoms_on(m, 0, {40, 41, 42, 43}, 1e-3, -2.0 + 1e-4));
  for (Index j = 0; j < 4; ++j) CHECK(std::abs(k3.K(0, j) * 1e-3 / (k4.K(0, j) * 1e-4) - 1.0) < 0.01);
}

TEST_CASE("sawtooth interaction range") {
  const LatticeModel m = build_sawtooth(100, 1.0);
  std::vector<int> cells;
  for (int d = 0; d <= 10; ++d) cells.push_back(50 + d);
  const InteractionMatrix k = interaction_matrix(m, atoms_on(m, 0, cells, 1e-3, -2.0 + 1e-3));
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (int d = 2; d <= 10; ++d, ++n) {
    const double y = std::log(std::abs(k.K(0, d)));
    sx += d;
    sy += y;
    sxx += d * d;
    sxy += d * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(-1.0 / lambda_1d(0.25)).epsilon(0.03));
}

TEST_CASE("interaction preconditions") {
  const LatticeModel m = build_sawtooth(20, 1.0);
  CHECK_THROWS_AS(interaction_matrix(m, {}), Error);
  CHECK_THROWS_AS(interaction_matrix(m, {small_atom(0, 1e-3, -1.9), small_atom(2, 1e-3, -1.8)}), Error);
  try {
    interaction_matrix(m, {small_atom(0, 1e-3, -2.0)});
    FAIL("expected PoleProximity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PoleProximity);
  }
}

TEST_CASE("effective hamiltonian") {
  CMat k(2, 2);
  k << cplx(0.3, 0.0), cplx(0.1, 0.2), cplx(0.1, -0.2), cplx(-0.4, 0.0);
  const CMat h = effective_hamiltonian(k);
  CHECK(h(0, 1) == cplx(0.1, 0.2));
  CHECK(h(1, 0) == cplx(0.1, -0.2));
  CHECK(h(0, 0) == cplx(0.3, 0.0));

  // CLS-coupled giants on a stub: strictly nearest-neighbour hopping g^2 alpha / (w0 - w_FB).
  const LatticeModel stub = build_stub(30, 1.0, 2.0);
  const ClsSet cls = cls_set(stub);
  const double g = 1e-3, w0 = 0.01;
  std::vector<EmitterSpec> giants;
  for (int c = 5; c < 12; ++c) giants.push_back(cls_emitter(stub, cls, {c, 0}, g, w0));
  const CMat he = effective_hamiltonian(giant_interaction(stub, giants, w0).K);
  for (Index i = 0; i < he.rows(); ++i)
    for (Index j = 0; j < he.cols(); ++j) {
      const Index d = std::abs(i - j);
      const double expect = d == 0 ? g * g / w0 : (d == 1 ? g * g * cls.alpha[0] / w0 : 0.0);
      CHECK(std::abs(he(i, j) - expect) < 1e-12 * g * g / w0);
    }
}

TEST_CASE("spin dynamics") {
  const int n = 64;
  const double k1 = 0.7;
  const CMat h = nn_ring(n, k1, 0.0);
  std::vector<double> t;
  for (int i = 0; i <= 50; ++i) t.push_back(i * 0.1 / k1);
  const SpinTrace tr = spin_dynamics(h, 0, t);
  for (Index m = 0; m < n; ++m) CHECK(std::abs(tr.c(0, m) - (m == 0 ? 1.0 : 0.0)) < 1e-14);
  double worst = 0.0;
  for (std::size_t it = 0; it < t.size(); ++it) {
    const double x = -2.0 * k1 * t[it];
    for (int site = -20; site <= 20; ++site) {
      const int an = std::abs(site);
      double jn = std::cyl_bessel_j(an, std::abs(x));
      if (x < 0.0 && an % 2 == 1) jn = -jn;
      if (site < 0 && an % 2 == 1) jn = -jn;
      const cplx expect = std::pow(cplx(0.0, 1.0), site) * jn;
      worst = std::max(worst, std::abs(tr.c(static_cast<Index>(it), (site + n) % n) - expect));
    }
    CHECK(std::abs(tr.c.row(static_cast<Index>(it)).norm() - 1.0) < 1e-10);
  }
  CHECK(worst < 1e-6);

  const CMat h2 = nn_ring(16, 0.5, 0.2);
  const SpinTrace t2 = spin_dynamics(h2, 3, {0.0, 1.0, 4.0});
  for (int i = 1; i < 3; ++i) {
    CVec c0 = CVec::Zero(16);
    c0[3] = 1.0;
    const CVec ref = rk4(h2, c0, t2.t[i], 4000);
    CHECK((t2.c.row(i).transpose() - ref).cwiseAbs().maxCoeff() < 1e-8);
  }
  CHECK(t2.population(1, 3) == doctest::Approx(std::norm(t2.c(1, 3))));

  CMat bad = h2;
  bad(0, 1) += 0.1;
  CHECK_THROWS_AS(spin_dynamics(bad, 0, {0.0}), Error);
  CHECK_THROWS_AS(spin_dynamics(h2, 16, {0.0}), Error);
}
