#include "fbqo/interactions.hpp"

#include <cmath>

#include "fbqo/error.hpp"
#include "fbqo/greens.hpp"

namespace fbqo {

InteractionMatrix interaction_matrix(const LatticeModel& m, const std::vector<EmitterSpec>& emitters,
                                     bool exact_pole) {
  require(!emitters.empty(), "interaction_matrix: no emitters");
  const Index ne = static_cast<Index>(emitters.size());
  const double w0 = emitters.front().omega0;
  for (const EmitterSpec& e : emitters) {
    require(e.gbar() > 0.0, "interaction_matrix: emitter without coupling");
    require(e.omega0 == w0, "interaction_matrix: emitters must share omega0");
  }
  const Index n = m.n_sites();
  CMat chi(n, ne);
  for (Index j = 0; j < ne; ++j) chi.col(j) = emitters[j].chi(n);

  InteractionMatrix out;
  out.emitters = emitters;
  out.exact_pole = exact_pole;
  out.K.resize(ne, ne);
  const SpMat h = real_space_sparse(m);
  if (!exact_pole) {
    check_pole_guard(m, w0);
    const CMat cols = shifted_solve(h, w0, chi);
    for (Index j = 0; j < ne; ++j)
      for (Index i = 0; i < ne; ++i)
        out.K(i, j) = emitters[i].gbar() * emitters[j].gbar() * chi.col(i).dot(cols.col(j));
  } else {
    for (Index j = 0; j < ne; ++j) {
      const double w = solve_pole(m, emitters[j]);
      check_pole_guard(m, w);
      const CVec col = shifted_solve(h, w, CVec(chi.col(j)));
      for (Index i = 0; i < ne; ++i) out.K(i, j) = emitters[i].gbar() * emitters[j].gbar() * chi.col(i).dot(col);
    }
  }
  return out;
}

CMat effective_hamiltonian(const CMat& K) {
  require(K.rows() == K.cols(), "effective_hamiltonian: K must be square");
  const Index n = K.rows();
  CMat h(n, n);
  for (Index i = 0; i < n; ++i) {
    h(i, i) = K(i, i).real();
    for (Index j = 0; j < i; ++j) {
      h(i, j) = K(i, j);
      h(j, i) = std::conj(K(i, j));
    }
  }
  return h;
}

SpinTrace spin_dynamics(const CMat& h_eff, Index initial, const std::vector<double>& t) {
  const Index n = h_eff.rows();
  require(h_eff.cols() == n && n > 0, "spin_dynamics: H_eff must be square and nonempty");
  require(initial >= 0 && initial < n, "spin_dynamics: initial emitter out of range");
  require(max_abs(h_eff - h_eff.adjoint()) < 1e-12 * std::max(1.0, max_abs(h_eff)), "spin_dynamics: H_eff not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(h_eff);
  const CMat& u = es.eigenvectors();
  const Vec& e = es.eigenvalues();
  const CVec c0 = u.row(initial).adjoint();
  SpinTrace tr;
  tr.t = t;
  tr.c.resize(static_cast<Index>(t.size()), n);
  for (std::size_t it = 0; it < t.size(); ++it) {
    CVec ph(n);
    for (Index a = 0; a < n; ++a) ph[a] = std::polar(1.0, -e[a] * t[it]) * c0[a];
    tr.c.row(static_cast<Index>(it)) = (u * ph).transpose();
  }
  return tr;
}

}  // namespace fbqo
