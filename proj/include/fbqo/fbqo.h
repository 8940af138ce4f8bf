#ifndef FBQO_H
#define FBQO_H

#include <stddef.h>
#include <stdint.h>

#if defined(FBQO_BUILDING)
#define FBQO_API __attribute__((visibility("default")))
#else
#define FBQO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fbqo_status {
  FBQO_OK = 0,
  FBQO_ERR_INVALID_ARGUMENT = 1,
  FBQO_ERR_CONFIG = 2,
  FBQO_ERR_POLE_PROXIMITY = 3,
  FBQO_ERR_NO_FLAT_BAND = 4,
  FBQO_ERR_NO_ROOT_IN_GAP = 5,
  FBQO_ERR_INSUFFICIENT_DATA = 6,
  FBQO_ERR_UNSUPPORTED = 7,
  FBQO_ERR_SINGULAR_F = 8,
  FBQO_ERR_INTERNAL = 9
} fbqo_status;

typedef struct fbqo_lattice fbqo_lattice;
typedef struct fbqo_emitters fbqo_emitters;
typedef struct fbqo_bound_state fbqo_bound_state;

typedef struct fbqo_flat_band {
  int band;
  double energy;
  double bandwidth;
  double gap_below;
  double gap_above;
} fbqo_flat_band;

typedef struct fbqo_fit {
  double lambda;
  double r2;
  int points;
  int d_first;
  int d_last;
} fbqo_fit;

FBQO_API const char* fbqo_status_name(fbqo_status status);
/* Message of the last failure on the calling thread. */
FBQO_API const char* fbqo_last_error(void);

/* Lattices */
FBQO_API fbqo_status fbqo_lattice_from_json(const char* json, fbqo_lattice** out);
FBQO_API fbqo_status fbqo_lattice_disorder(const fbqo_lattice* lat, int off_diagonal, double strength,
                                           uint64_t seed, fbqo_lattice** out);
FBQO_API void fbqo_lattice_free(fbqo_lattice* lat);
FBQO_API int fbqo_lattice_dim(const fbqo_lattice* lat);
FBQO_API int fbqo_lattice_sublattices(const fbqo_lattice* lat);
FBQO_API int fbqo_lattice_cells(const fbqo_lattice* lat, int axis);
FBQO_API size_t fbqo_lattice_sites(const fbqo_lattice* lat);
FBQO_API double fbqo_lattice_J(const fbqo_lattice* lat);
FBQO_API fbqo_status fbqo_lattice_site(const fbqo_lattice* lat, const char* spec, size_t* site);
FBQO_API fbqo_status fbqo_lattice_site_info(const fbqo_lattice* lat, size_t site, int* cell_x, int* cell_y,
                                            int* sublattice);
/* All real-space eigenvalues, ascending; out holds fbqo_lattice_sites() values. */
FBQO_API fbqo_status fbqo_lattice_eigenvalues(const fbqo_lattice* lat, double* out);

/* Bands on the commensurate grid: k has 2 * nk entries, energies nk * Q (row per k). */
FBQO_API fbqo_status fbqo_bands(const fbqo_lattice* lat, size_t* nk, size_t* nbands, double* k, double* energies);
FBQO_API fbqo_status fbqo_flat_bands(const fbqo_lattice* lat, double tol, fbqo_flat_band* out, size_t capacity,
                                     size_t* count);

/* Emitters */
FBQO_API fbqo_status fbqo_emitters_from_json(const fbqo_lattice* lat, const char* json, fbqo_emitters** out);
FBQO_API fbqo_status fbqo_emitters_create(fbqo_emitters** out);
FBQO_API fbqo_status fbqo_emitters_add(fbqo_emitters* set, double omega0, size_t n, const size_t* sites,
                                       const double* g_re, const double* g_im);
FBQO_API fbqo_status fbqo_emitters_add_cls(fbqo_emitters* set, const fbqo_lattice* lat, int cell_x, int cell_y,
                                           double g, double omega0);
FBQO_API void fbqo_emitters_free(fbqo_emitters* set);
FBQO_API size_t fbqo_emitters_count(const fbqo_emitters* set);
FBQO_API fbqo_status fbqo_emitters_set_omega0(fbqo_emitters* set, double omega0);
FBQO_API fbqo_status fbqo_emitters_gbar(const fbqo_emitters* set, size_t which, double* gbar);

/* Bound states */
FBQO_API fbqo_status fbqo_solve_pole(const fbqo_lattice* lat, const fbqo_emitters* set, size_t which,
                                     double* omega, double* residual);
FBQO_API fbqo_status fbqo_bound_state_compute(const fbqo_lattice* lat, const fbqo_emitters* set, size_t which,
                                              int exact_pole, fbqo_bound_state** out);
FBQO_API void fbqo_bound_state_free(fbqo_bound_state* bs);
FBQO_API double fbqo_bound_state_energy(const fbqo_bound_state* bs);
FBQO_API fbqo_status fbqo_bound_state_atomic(const fbqo_bound_state* bs, double* re, double* im);
FBQO_API fbqo_status fbqo_bound_state_residuals(const fbqo_bound_state* bs, double* norm_residual,
                                                double* eigen_residual);
/* Normalized photonic amplitudes, one entry per site. */
FBQO_API fbqo_status fbqo_bound_state_amplitudes(const fbqo_bound_state* bs, double* re, double* im);
/* d_max < 0 selects the automatic window. */
FBQO_API fbqo_status fbqo_bound_state_fit(const fbqo_lattice* lat, const fbqo_bound_state* bs, int sublattice,
                                          int center_x, int center_y, int axis, int d_min, int d_max,
                                          fbqo_fit* out);

/* Weight function and localization lengths */
FBQO_API fbqo_status fbqo_settsech(double x, double* out);
FBQO_API fbqo_status fbqo_xi_numeric(int dim, double alpha_x, double alpha_y, int dx, int dy, int nk, double* out);
FBQO_API fbqo_status fbqo_xi_analytic_1d(double alpha, int dn, double* out);
FBQO_API fbqo_status fbqo_xi_2d_axis(double alpha, int d, double* out);
FBQO_API fbqo_status fbqo_lambda_1d(double alpha, double* out);
FBQO_API fbqo_status fbqo_lambda_2d(double alpha, double* lambda, double* lambda_prime);
FBQO_API fbqo_status fbqo_cls_overlaps(const fbqo_lattice* lat, double* alpha_x, double* alpha_y,
                                       double* omega_fb);

/* Interactions; K is row-major n x n with n = fbqo_emitters_count(). */
FBQO_API fbqo_status fbqo_interaction_matrix(const fbqo_lattice* lat, const fbqo_emitters* set, int exact_pole,
                                             double* k_re, double* k_im);
FBQO_API fbqo_status fbqo_giant_interaction(const fbqo_lattice* lat, const fbqo_emitters* set, double omega0,
                                            double* k_re, double* k_im, size_t* warnings);
FBQO_API fbqo_status fbqo_giant_fidelity(const fbqo_lattice* lat, const fbqo_emitters* set, size_t which,
                                         double omega0, double* fidelity);
/* c is row-major nt x n; H_eff built from K with the library's double-counting convention. */
FBQO_API fbqo_status fbqo_spin_dynamics(size_t n, const double* k_re, const double* k_im, size_t initial,
                                        size_t nt, const double* t, double* c_re, double* c_im);

/* Dynamics; populations row-major nt x emitters. */
FBQO_API fbqo_status fbqo_evolve(const fbqo_lattice* lat, const fbqo_emitters* set, size_t initial_emitter,
                                 size_t nt, const double* t, double* populations, double* max_norm_error);
FBQO_API fbqo_status fbqo_rabi_frequency(const fbqo_lattice* lat, const fbqo_emitters* set, size_t which,
                                         double* omega);
FBQO_API fbqo_status fbqo_rabi_from_population(size_t nt, const double* t, const double* p, double* omega);

#ifdef __cplusplus
}
#endif

#endif
