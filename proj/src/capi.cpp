#include "fbqo/fbqo.h"

#include <exception>
#include <new>
#include <string>

#include "fbqo/boundstate.hpp"
#include "fbqo/config.hpp"
#include "fbqo/dynamics.hpp"
#include "fbqo/error.hpp"
#include "fbqo/flatband.hpp"
#include "fbqo/giant.hpp"
#include "fbqo/interactions.hpp"
#include "fbqo/spectrum.hpp"

struct fbqo_lattice {
  fbqo::LatticeModel m;
};

struct fbqo_emitters {
  std::vector<fbqo::EmitterSpec> v;
};

struct fbqo_bound_state {
  fbqo::BoundStateResult r;
};

namespace {

thread_local std::string g_last_error;

fbqo_status to_status(fbqo::ErrorCode c) {
  using fbqo::ErrorCode;
  switch (c) {
    case ErrorCode::InvalidArgument: return FBQO_ERR_INVALID_ARGUMENT;
    case ErrorCode::Config: return FBQO_ERR_CONFIG;
    case ErrorCode::PoleProximity: return FBQO_ERR_POLE_PROXIMITY;
    case ErrorCode::NoFlatBand: return FBQO_ERR_NO_FLAT_BAND;
    case ErrorCode::NoRootInGap: return FBQO_ERR_NO_ROOT_IN_GAP;
    case ErrorCode::InsufficientData: return FBQO_ERR_INSUFFICIENT_DATA;
    case ErrorCode::Unsupported: return FBQO_ERR_UNSUPPORTED;
    case ErrorCode::SingularF: return FBQO_ERR_SINGULAR_F;
    case ErrorCode::Internal: return FBQO_ERR_INTERNAL;
  }
  return FBQO_ERR_INTERNAL;
}

template <class F>
fbqo_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return FBQO_OK;
  } catch (const fbqo::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FBQO_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FBQO_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) fbqo::fail(fbqo::ErrorCode::InvalidArgument, std::string("null argument: ") + what);
}

const fbqo::EmitterSpec& pick(const fbqo_emitters* set, size_t which) {
  need(set, "emitters");
  fbqo::require(which < set->v.size(), "emitter index out of range");
  return set->v[which];
}

void write_matrix(const fbqo::CMat& k, double* re, double* im) {
  const auto n = k.rows();
  for (fbqo::Index i = 0; i < n; ++i)
    for (fbqo::Index j = 0; j < k.cols(); ++j) {
      re[i * k.cols() + j] = k(i, j).real();
      if (im) im[i * k.cols() + j] = k(i, j).imag();
    }
}

}  // namespace

extern "C" {

const char* fbqo_status_name(fbqo_status s) {
  switch (s) {
    case FBQO_OK: return "OK";
    case FBQO_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case FBQO_ERR_CONFIG: return "ConfigError";
    case FBQO_ERR_POLE_PROXIMITY: return "PoleProximity";
    case FBQO_ERR_NO_FLAT_BAND: return "NoFlatBand";
    case FBQO_ERR_NO_ROOT_IN_GAP: return "NoRootInGap";
    case FBQO_ERR_INSUFFICIENT_DATA: return "InsufficientData";
    case FBQO_ERR_UNSUPPORTED: return "Unsupported";
    case FBQO_ERR_SINGULAR_F: return "SingularF";
    case FBQO_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* fbqo_last_error(void) { return g_last_error.c_str(); }

fbqo_status fbqo_lattice_from_json(const char* json, fbqo_lattice** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new fbqo_lattice{fbqo::lattice_from_json(json)};
  });
}

fbqo_status fbqo_lattice_disorder(const fbqo_lattice* lat, int off_diagonal, double strength, uint64_t seed,
                                  fbqo_lattice** out) {
  return guarded([&] {
    need(lat, "lattice");
    need(out, "out");
    fbqo::DisorderSpec spec;
    spec.kind = off_diagonal ? fbqo::DisorderKind::OffDiagonal : fbqo::DisorderKind::Diagonal;
    spec.strength = strength;
    spec.seed = seed;
    *out = new fbqo_lattice{fbqo::apply_disorder(lat->m, spec)};
  });
}

void fbqo_lattice_free(fbqo_lattice* lat) { delete lat; }
int fbqo_lattice_dim(const fbqo_lattice* lat) { return lat ? lat->m.dim() : 0; }
int fbqo_lattice_sublattices(const fbqo_lattice* lat) { return lat ? lat->m.sublattices() : 0; }
int fbqo_lattice_cells(const fbqo_lattice* lat, int axis) {
  return (lat && (axis == 0 || axis == 1)) ? lat->m.cells()[axis] : 0;
}
size_t fbqo_lattice_sites(const fbqo_lattice* lat) { return lat ? static_cast<size_t>(lat->m.n_sites()) : 0; }
double fbqo_lattice_J(const fbqo_lattice* lat) { return lat ? lat->m.params().J : 0.0; }

fbqo_status fbqo_lattice_site(const fbqo_lattice* lat, const char* spec, size_t* site) {
  return guarded([&] {
    need(lat, "lattice");
    need(spec, "spec");
    need(site, "site");
    *site = static_cast<size_t>(fbqo::parse_site(lat->m, spec));
  });
}

fbqo_status fbqo_lattice_site_info(const fbqo_lattice* lat, size_t site, int* cx, int* cy, int* sub) {
  return guarded([&] {
    need(lat, "lattice");
    fbqo::require(site < static_cast<size_t>(lat->m.n_sites()), "site out of range");
    const auto c = lat->m.site_cell(static_cast<fbqo::Index>(site));
    if (cx) *cx = c[0];
    if (cy) *cy = c[1];
    if (sub) *sub = lat->m.site_sublattice(static_cast<fbqo::Index>(site));
  });
}

fbqo_status fbqo_lattice_eigenvalues(const fbqo_lattice* lat, double* out) {
  return guarded([&] {
    need(lat, "lattice");
    need(out, "out");
    const fbqo::Vec& e = lat->m.eigensystem().values();
    for (fbqo::Index i = 0; i < e.size(); ++i) out[i] = e[i];
  });
}

fbqo_status fbqo_bands(const fbqo_lattice* lat, size_t* nk, size_t* nbands, double* k, double* energies) {
  return guarded([&] {
    need(lat, "lattice");
    need(nk, "nk");
    need(nbands, "nbands");
    const auto grid = fbqo::k_grid(lat->m);
    *nk = grid.size();
    *nbands = static_cast<size_t>(lat->m.sublattices());
    if (!k && !energies) return;
    const fbqo::BandStructure bs = fbqo::band_structure(lat->m, grid);
    for (size_t i = 0; i < grid.size(); ++i) {
      if (k) {
        k[2 * i] = grid[i][0];
        k[2 * i + 1] = grid[i][1];
      }
      if (energies)
        for (size_t b = 0; b < *nbands; ++b)
          energies[i * *nbands + b] = bs.bands(static_cast<fbqo::Index>(b), static_cast<fbqo::Index>(i));
    }
  });
}

fbqo_status fbqo_flat_bands(const fbqo_lattice* lat, double tol, fbqo_flat_band* out, size_t capacity,
                            size_t* count) {
  return guarded([&] {
    need(lat, "lattice");
    need(count, "count");
    const auto fbs = fbqo::detect_flat_bands(fbqo::band_structure(lat->m), tol);
    *count = fbs.size();
    for (size_t i = 0; i < fbs.size() && i < capacity && out; ++i)
      out[i] = {fbs[i].band, fbs[i].energy, fbs[i].bandwidth, fbs[i].gap_below, fbs[i].gap_above};
  });
}

fbqo_status fbqo_emitters_from_json(const fbqo_lattice* lat, const char* json, fbqo_emitters** out) {
  return guarded([&] {
    need(lat, "lattice");
    need(json, "json");
    need(out, "out");
    *out = new fbqo_emitters{fbqo::emitters_from_json(lat->m, json)};
  });
}

fbqo_status fbqo_emitters_create(fbqo_emitters** out) {
  return guarded([&] {
    need(out, "out");
    *out = new fbqo_emitters{};
  });
}

fbqo_status fbqo_emitters_add(fbqo_emitters* set, double omega0, size_t n, const size_t* sites, const double* g_re,
                              const double* g_im) {
  return guarded([&] {
    need(set, "emitters");
    need(sites, "sites");
    need(g_re, "g_re");
    fbqo::require(n > 0, "emitter needs at least one coupling");
    fbqo::EmitterSpec e;
    e.omega0 = omega0;
    for (size_t i = 0; i < n; ++i)
      e.couplings.push_back({static_cast<fbqo::Index>(sites[i]), fbqo::cplx(g_re[i], g_im ? g_im[i] : 0.0)});
    set->v.push_back(e);
  });
}

fbqo_status fbqo_emitters_add_cls(fbqo_emitters* set, const fbqo_lattice* lat, int cx, int cy, double g,
                                  double omega0) {
  return guarded([&] {
    need(set, "emitters");
    need(lat, "lattice");
    set->v.push_back(fbqo::cls_emitter(lat->m, fbqo::cls_set(lat->m), {cx, cy}, g, omega0));
  });
}

void fbqo_emitters_free(fbqo_emitters* set) { delete set; }
size_t fbqo_emitters_count(const fbqo_emitters* set) { return set ? set->v.size() : 0; }

fbqo_status fbqo_emitters_set_omega0(fbqo_emitters* set, double omega0) {
  return guarded([&] {
    need(set, "emitters");
    for (auto& e : set->v) e.omega0 = omega0;
  });
}

fbqo_status fbqo_emitters_gbar(const fbqo_emitters* set, size_t which, double* gbar) {
  return guarded([&] {
    need(gbar, "gbar");
    *gbar = pick(set, which).gbar();
  });
}

fbqo_status fbqo_solve_pole(const fbqo_lattice* lat, const fbqo_emitters* set, size_t which, double* omega,
                            double* residual) {
  return guarded([&] {
    need(lat, "lattice");
    need(omega, "omega");
    const auto sol = fbqo::solve_pole_detail(lat->m, pick(set, which));
    *omega = sol.omega;
    if (residual) *residual = sol.residual;
  });
}

fbqo_status fbqo_bound_state_compute(const fbqo_lattice* lat, const fbqo_emitters* set, size_t which, int exact_pole,
                             fbqo_bound_state** out) {
  return guarded([&] {
    need(lat, "lattice");
    need(out, "out");
    const auto& e = pick(set, which);
    const double w = exact_pole ? fbqo::solve_pole(lat->m, e) : e.omega0;
    *out = new fbqo_bound_state{fbqo::bs_wavefunction(lat->m, e, w)};
  });
}

void fbqo_bound_state_free(fbqo_bound_state* bs) { delete bs; }
double fbqo_bound_state_energy(const fbqo_bound_state* bs) { return bs ? bs->r.omega_bs : 0.0; }

fbqo_status fbqo_bound_state_atomic(const fbqo_bound_state* bs, double* re, double* im) {
  return guarded([&] {
    need(bs, "bound state");
    if (re) *re = bs->r.atomic.real();
    if (im) *im = bs->r.atomic.imag();
  });
}

fbqo_status fbqo_bound_state_residuals(const fbqo_bound_state* bs, double* norm_residual, double* eigen_residual) {
  return guarded([&] {
    need(bs, "bound state");
    if (norm_residual) *norm_residual = bs->r.norm_residual;
    if (eigen_residual) *eigen_residual = bs->r.eigen_residual;
  });
}

fbqo_status fbqo_bound_state_amplitudes(const fbqo_bound_state* bs, double* re, double* im) {
  return guarded([&] {
    need(bs, "bound state");
    need(re, "re");
    for (fbqo::Index i = 0; i < bs->r.psi.size(); ++i) {
      re[i] = bs->r.psi[i].real();
      if (im) im[i] = bs->r.psi[i].imag();
    }
  });
}

fbqo_status fbqo_bound_state_fit(const fbqo_lattice* lat, const fbqo_bound_state* bs, int sublattice, int cx,
                                 int cy, int axis, int d_min, int d_max, fbqo_fit* out) {
  return guarded([&] {
    need(lat, "lattice");
    need(bs, "bound state");
    need(out, "out");
    const auto f = fbqo::localization_length_fit(lat->m, bs->r, sublattice, {cx, cy}, {d_min, d_max}, axis);
    *out = {f.lambda, f.r2, f.points, f.d_first, f.d_last};
  });
}

fbqo_status fbqo_settsech(double x, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = fbqo::settsech(x);
  });
}

fbqo_status fbqo_xi_numeric(int dim, double ax, double ay, int dx, int dy, int nk, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = fbqo::xi_numeric({ax, ay}, dim, {dx, dy}, {nk, nk});
  });
}

fbqo_status fbqo_xi_analytic_1d(double alpha, int dn, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = fbqo::xi_analytic_1d(alpha, dn);
  });
}

fbqo_status fbqo_xi_2d_axis(double alpha, int d, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = fbqo::xi_2d_axis(alpha, d);
  });
}

fbqo_status fbqo_lambda_1d(double alpha, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = fbqo::lambda_1d(alpha);
  });
}

fbqo_status fbqo_lambda_2d(double alpha, double* lambda, double* lambda_prime) {
  return guarded([&] {
    const auto [a, b] = fbqo::lambda_2d(alpha);
    if (lambda) *lambda = a;
    if (lambda_prime) *lambda_prime = b;
  });
}

fbqo_status fbqo_cls_overlaps(const fbqo_lattice* lat, double* ax, double* ay, double* omega_fb) {
  return guarded([&] {
    need(lat, "lattice");
    const auto cls = fbqo::cls_set(lat->m);
    if (ax) *ax = cls.alpha[0];
    if (ay) *ay = cls.alpha[1];
    if (omega_fb) *omega_fb = cls.omega_fb;
  });
}

fbqo_status fbqo_interaction_matrix(const fbqo_lattice* lat, const fbqo_emitters* set, int exact_pole,
                                    double* k_re, double* k_im) {
  return guarded([&] {
    need(lat, "lattice");
    need(set, "emitters");
    need(k_re, "k_re");
    write_matrix(fbqo::interaction_matrix(lat->m, set->v, exact_pole != 0).K, k_re, k_im);
  });
}

fbqo_status fbqo_giant_interaction(const fbqo_lattice* lat, const fbqo_emitters* set, double omega0, double* k_re,
                                   double* k_im, size_t* warnings) {
  return guarded([&] {
    need(lat, "lattice");
    need(set, "emitters");
    need(k_re, "k_re");
    const auto im = fbqo::giant_interaction(lat->m, set->v, omega0);
    write_matrix(im.K, k_re, k_im);
    if (warnings) *warnings = im.warnings.size();
  });
}

fbqo_status fbqo_giant_fidelity(const fbqo_lattice* lat, const fbqo_emitters* set, size_t which, double omega0,
                                double* fidelity) {
  return guarded([&] {
    need(lat, "lattice");
    need(fidelity, "fidelity");
    const auto& e = pick(set, which);
    const auto r = fbqo::giant_bound_state(lat->m, e, omega0);
    const fbqo::CVec chi = e.chi(lat->m.n_sites());
    *fidelity = std::abs(chi.dot(r.psi_unnormalized)) / r.psi_unnormalized.norm();
  });
}

fbqo_status fbqo_spin_dynamics(size_t n, const double* k_re, const double* k_im, size_t initial, size_t nt,
                               const double* t, double* c_re, double* c_im) {
  return guarded([&] {
    need(k_re, "k_re");
    need(t, "t");
    need(c_re, "c_re");
    fbqo::CMat k(static_cast<fbqo::Index>(n), static_cast<fbqo::Index>(n));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) k(i, j) = fbqo::cplx(k_re[i * n + j], k_im ? k_im[i * n + j] : 0.0);
    const auto tr = fbqo::spin_dynamics(fbqo::effective_hamiltonian(k), static_cast<fbqo::Index>(initial),
                                        std::vector<double>(t, t + nt));
    write_matrix(tr.c, c_re, c_im);
  });
}

fbqo_status fbqo_evolve(const fbqo_lattice* lat, const fbqo_emitters* set, size_t initial, size_t nt,
                        const double* t, double* populations, double* max_norm_error) {
  return guarded([&] {
    need(lat, "lattice");
    need(set, "emitters");
    need(t, "t");
    need(populations, "populations");
    fbqo::InitialState init{fbqo::InitialKind::Emitter, static_cast<fbqo::Index>(initial)};
    const auto ts = fbqo::evolve(lat->m, set->v, init, std::vector<double>(t, t + nt));
    write_matrix(ts.emitter_population.cast<fbqo::cplx>(), populations, nullptr);
    if (max_norm_error) {
      double m = 0.0;
      for (double v : ts.norm) m = std::max(m, std::abs(v - 1.0));
      *max_norm_error = m;
    }
  });
}

fbqo_status fbqo_rabi_frequency(const fbqo_lattice* lat, const fbqo_emitters* set, size_t which, double* omega) {
  return guarded([&] {
    need(lat, "lattice");
    need(omega, "omega");
    *omega = fbqo::rabi_frequency(lat->m, pick(set, which));
  });
}

fbqo_status fbqo_rabi_from_population(size_t nt, const double* t, const double* p, double* omega) {
  return guarded([&] {
    need(t, "t");
    need(p, "p");
    need(omega, "omega");
    *omega = fbqo::rabi_from_population(std::vector<double>(t, t + nt), std::vector<double>(p, p + nt)).omega;
  });
}

}  // extern "C"
