#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fbqo/boundstate.hpp"
#include "fbqo/error.hpp"
#include "fbqo/greens.hpp"
#include "fbqo/lattice.hpp"

using namespace fbqo;

namespace {

EmitterSpec small_atom(Index site, double g, double omega0) {
  EmitterSpec e;
  e.omega0 = omega0;
  e.couplings.push_back({site, cplx(g, 0.0)});
  return e;
}

LatticeModel single_cavity(double wc) {
  return LatticeModel(ModelKind::Chain, {1, 1}, 1, ModelParams{}, {wc}, {});
}

double fitted_lambda(const LatticeModel& m, Cell cell, int sub, double g, double omega0, int axis = 0) {
  const EmitterSpec e = small_atom(m.site(cell, sub), g, omega0);
  const BoundStateResult r = bound_state(m, e);
  return localization_length_fit(m, r, sub, cell, {}, axis).lambda;
}

}  // namespace

TEST_CASE("emitter spec") {
  EmitterSpec e;
  e.couplings = {{0, cplx(3.0, 0.0)}, {2, cplx(0.0, 4.0)}};
  CHECK(e.gbar() == doctest::Approx(5.0));
  const CVec chi = e.chi(4);
  CHECK(chi.norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(chi[2] == cplx(0.0, 0.8));
  CHECK_THROWS_AS(e.chi(2), Error);
  CHECK_THROWS_AS(small_atom(0, 0.0, 0.0).chi(3), Error);
}

TEST_CASE("single cavity pole") {
  const LatticeModel m = single_cavity(0.0);
  const PoleSolution up = solve_pole_detail(m, small_atom(0, 0.1, 1.0));
  CHECK(up.omega == doctest::Approx((1.0 + std::sqrt(1.04)) / 2.0).epsilon(1e-14));
  CHECK(up.residual < 1e-12);
  CHECK(solve_pole(m, small_atom(0, 0.1, -1.0)) == doctest::Approx((-1.0 - std::sqrt(1.04)) / 2.0).epsilon(1e-14));

  const BoundStateResult r = bound_state(m, small_atom(0, 0.1, 1.0));
  CHECK(r.psi_unnormalized[0].real() == doctest::Approx(0.1 / r.omega_bs).epsilon(1e-13));
  CHECK(r.psi_unnormalized[0].real() == doctest::Approx(0.1 / 1.0).epsilon(0.02));
  CHECK(r.norm_residual < 1e-12);
  CHECK(r.eigen_residual < 1e-8);
}

TEST_CASE("zero coupling leaves the emitter frequency unchanged") {
  const LatticeModel m = build_sawtooth(20, 1.0);
  CHECK(solve_pole(m, small_atom(3, 0.0, -1.9)) == -1.9);
}

TEST_CASE("no root on the bath spectrum") {
  const LatticeModel m = build_sawtooth(20, 1.0);
  try {
    solve_pole(m, small_atom(m.site({10, 0}, 0), 1e-3, -2.0));
    FAIL("expected NoRootInGap");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoRootInGap);
  }
  for (double w0 : {1.0, 2.5, 3.9}) {
    try {
      solve_pole(m, small_atom(m.site({10, 0}, 0), 1e-3, w0));
      FAIL("expected NoRootInGap inside the dispersive band");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoRootInGap);
    }
  }
  const LatticeModel chain = build_chain(50, 1.0);
  try {
    solve_pole(chain, small_atom(chain.site({25, 0}, 0), 1e-3, 0.3));
    FAIL("expected NoRootInGap inside the chain band");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoRootInGap);
  }
  CHECK(solve_pole(m, small_atom(m.site({10, 0}, 0), 1e-3, 4.1)) > 4.1);
}

TEST_CASE("weak coupling barely shifts the pole") {
  const LatticeModel m = build_sawtooth(100, 1.0);
  const EmitterSpec e = small_atom(m.site({50, 0}, 0), 1e-4, -2.0 + 0.1);
  const PoleSolution p = solve_pole_detail(m, e);
  CHECK(std::abs(p.omega - e.omega0) < 1e-7);
  CHECK(p.residual < 1e-12);
  CHECK(std::abs(pole_function(m, e, p.omega)) < 1e-12);
}

TEST_CASE("bound states are normalized eigenstates with tight pole residuals") {
  struct Case {
    LatticeModel m;
    Cell cell;
    int sub;
    double omega0;
  };
  const Case cases[] = {
      {build_sawtooth(60, 1.0), {30, 0}, 0, -2.0 + 1e-2},
      {build_sawtooth(60, 1.0), {30, 0}, 1, -2.0 - 0.5},
      {build_stub(40, 1.0, 2.0), {20, 0}, 0, 0.1},
      {build_kagome1d(40, 1.0), {20, 0}, 0, 2.03},
      {build_checkerboard(12, 12, 1.0), {6, 6}, 0, -0.05},
      {build_double_comb(30, 1.0, 1.0, 0.5), {15, 0}, 2, 3.0},
  };
  for (const Case& c : cases) {
    for (double g : {1e-3, 0.05}) {
      const EmitterSpec e = small_atom(c.m.site(c.cell, c.sub), g, c.omega0);
      const PoleSolution p = solve_pole_detail(c.m, e);
      CHECK(p.residual < 1e-12 * c.m.params().J);
      CHECK(p.omega > p.lower);
      CHECK(p.omega < p.upper);
      const BoundStateResult r = bs_wavefunction(c.m, e, p.omega);
      CHECK(r.norm_residual < 1e-12);
      CHECK(r.eigen_residual < 1e-8 * c.m.params().J);
    }
  }
}

TEST_CASE("flat-band regime wavefunction follows the projector") {
  const LatticeModel m = build_sawtooth(100, 1.0);
  const Index x0 = m.site({50, 0}, 0);
  const double g = 1e-4;
  const BoundStateResult r = bound_state(m, small_atom(x0, g, -2.0 + 1e-3));
  CHECK(std::abs(r.omega_bs + 2.0 - 1e-3) < 1e-5);
  const CMat approx = g * fb_green_approx(fb_projector(m, -2.0), r.omega_bs);
  for (int c = 45; c <= 55; ++c)
    for (int s = 0; s < 2; ++s) {
      const Index x = m.site({c, 0}, s);
      const cplx a = approx(x, x0);
      if (std::abs(a) < 1e-6 * std::abs(approx(x0, x0))) continue;
      CHECK(std::abs(r.psi_unnormalized[x] - a) / std::abs(a) < 2e-3);
    }
}

TEST_CASE("chain bound state") {
  const LatticeModel m = build_chain(2000, 1.0);
  const Index x0 = 1000;
  const BoundStateResult r = bound_state(m, small_atom(x0, 1e-3, -2.0 - 0.01));
  for (int d = 0; d <= 15; ++d) {
    const cplx ratio = r.psi[x0 + d] / r.psi[x0];
    CHECK(std::abs(ratio) == doctest::Approx(std::exp(-d / 10.0)).epsilon(0.02));
    CHECK((d % 2 == 0 ? ratio.real() > 0.0 : ratio.real() < 0.0));
  }
  const LocalizationFit fit = localization_length_fit(m, r, 0, {1000, 0});
  CHECK(fit.lambda == doctest::Approx(10.0).epsilon(0.05));
  CHECK(fit.r2 > 0.9999);
  CHECK(fit.d_first == 2);

  // lambda ~ delta^{-1/2} near a dispersive edge.
  const double l1 = fitted_lambda(m, {1000, 0}, 0, 1e-3, -2.0 - 0.04);
  const double l2 = fitted_lambda(m, {1000, 0}, 0, 1e-3, -2.0 - 0.01);
  CHECK(l2 / l1 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("sawtooth flat-band localization length") {
  const LatticeModel m = build_sawtooth(100, 1.0);
  const double l3 = fitted_lambda(m, {50, 0}, 0, 1e-3, -2.0 + 1e-3);
  const double l2 = fitted_lambda(m, {50, 0}, 0, 1e-3, -2.0 + 1e-2);
  CHECK(l3 == doctest::Approx(0.759).epsilon(0.03));
  CHECK(std::abs(l2 / l3 - 1.0) < 0.01);
}

TEST_CASE("stub flat-band localization length is detuning independent") {
  for (double delta : {2.0, 3.0}) {
    const LatticeModel m = build_stub(100, 1.0, delta);
    const double l1 = fitted_lambda(m, {50, 0}, 0, 1e-3, 1e-2);
    const double l2 = fitted_lambda(m, {50, 0}, 0, 1e-3, 1e-3);
    CHECK(std::abs(l2 / l1 - 1.0) < 0.01);
  }
}

TEST_CASE("kagome band touching: lambda grows as the detuning shrinks") {
  const LatticeModel m = build_kagome1d(200, 1.0);
  double prev = 0.0;
  for (double d : {0.1, 0.03, 0.01}) {
    const double l = fitted_lambda(m, {100, 0}, 0, 1e-3, 2.0 + d);
    CHECK(l > prev);
    prev = l;
  }
}

TEST_CASE("fit window validation") {
  const LatticeModel m = build_sawtooth(40, 1.0);
  const BoundStateResult r = bound_state(m, small_atom(m.site({20, 0}, 0), 1e-3, -2.0 + 1e-2));
  CHECK_THROWS_AS(localization_length_fit(m, r, 0, {20, 0}, {2, 20}), Error);
  CHECK_THROWS_AS(localization_length_fit(m, r, 2, {20, 0}), Error);
  CHECK_THROWS_AS(localization_length_fit(m, r, 0, {20, 0}, {}, 1), Error);
  try {
    localization_length_fit(m, r, 0, {20, 0}, {2, 4});
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientData);
  }
  const LocalizationFit f = localization_length_fit(m, r, 0, {20, 0}, {2, 5});
  CHECK(f.points == 4);
  CHECK(f.d_first == 2);
  CHECK(f.d_last == 5);
}
