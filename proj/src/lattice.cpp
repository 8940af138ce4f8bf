#include "fbqo/lattice.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>

#include "fbqo/error.hpp"

namespace fbqo {

struct LatticeModel::Cache {
  std::once_flag once;
  std::unique_ptr<Eigensystem> es;
  std::atomic<bool> ready{false};
};

const char* model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Sawtooth: return "sawtooth";
    case ModelKind::Stub: return "stub";
    case ModelKind::DoubleComb: return "doublecomb";
    case ModelKind::Kagome1D: return "kagome1d";
    case ModelKind::Checkerboard: return "checkerboard";
    case ModelKind::Chain: return "chain";
  }
  return "unknown";
}

ModelKind parse_model_name(const std::string& name) {
  for (ModelKind k : {ModelKind::Sawtooth, ModelKind::Stub, ModelKind::DoubleComb, ModelKind::Kagome1D,
                      ModelKind::Checkerboard, ModelKind::Chain})
    if (name == model_name(k)) return k;
  fail(ErrorCode::Config, "unknown model '" + name + "'");
}

LatticeModel::LatticeModel(ModelKind kind, Cell cells, int dim, ModelParams params, std::vector<double> onsite,
                           std::vector<Hopping> hoppings)
    : kind_(kind),
      cells_(cells),
      dim_(dim),
      params_(params),
      onsite_(std::move(onsite)),
      hoppings_(std::move(hoppings)),
      cache_(std::make_shared<Cache>()) {
  require(dim == 1 || dim == 2, "lattice dimension must be 1 or 2");
  if (dim == 1) cells_[1] = 1;
  require(cells_[0] > 0 && cells_[1] > 0, "cell counts must be positive");
  require(!onsite_.empty(), "lattice needs at least one sublattice");
  const int q = sublattices();
  for (const Hopping& h : hoppings_) {
    require(h.from >= 0 && h.from < q && h.to >= 0 && h.to < q, "hopping sublattice out of range");
    for (int d = 0; d < 2; ++d) require(std::abs(h.offset[d]) < cells_[d], "hopping offset wraps onto itself");
    require(!(h.from == h.to && h.offset[0] == 0 && h.offset[1] == 0), "on-site term listed as hopping");
  }
}

Cell LatticeModel::wrap(Cell c) const {
  for (int d = 0; d < 2; ++d) c[d] = ((c[d] % cells_[d]) + cells_[d]) % cells_[d];
  return c;
}

int LatticeModel::cell_index(Cell c) const {
  c = wrap(c);
  return c[0] * cells_[1] + c[1];
}

Cell LatticeModel::cell_of(int idx) const { return {idx / cells_[1], idx % cells_[1]}; }

Index LatticeModel::site(Cell c, int sub) const {
  return static_cast<Index>(cell_index(c)) * sublattices() + sub;
}

Cell LatticeModel::site_cell(Index s) const { return cell_of(static_cast<int>(s / sublattices())); }

int LatticeModel::site_sublattice(Index s) const { return static_cast<int>(s % sublattices()); }

double LatticeModel::site_energy(Index s) const {
  double e = onsite_[site_sublattice(s)];
  if (!site_shift_.empty()) e += site_shift_[s];
  return e;
}

cplx LatticeModel::bond_amplitude(int cell, std::size_t h) const {
  cplx t = hoppings_[h].t;
  if (bond_shift_.empty()) return t;
  const double r = bond_shift_[static_cast<std::size_t>(cell) * hoppings_.size() + h];
  const double mag = std::abs(t);
  const cplx phase = mag > 0.0 ? t / mag : cplx(1.0, 0.0);
  return (mag + r) * phase;
}

const Eigensystem& LatticeModel::eigensystem() const {
  std::call_once(cache_->once, [this] {
    cache_->es = std::make_unique<Eigensystem>(Eigensystem::hermitian(real_space_hamiltonian(*this)));
    cache_->ready.store(true, std::memory_order_release);
  });
  return *cache_->es;
}

bool LatticeModel::has_eigensystem() const { return cache_->ready.load(std::memory_order_acquire); }

std::string sublattice_name(int sub) { return std::string(1, static_cast<char>('a' + sub)); }

int sublattice_from_name(const LatticeModel& m, const std::string& name) {
  for (int s = 0; s < m.sublattices(); ++s)
    if (name == sublattice_name(s)) return s;
  fail(ErrorCode::Config, "unknown sublattice '" + name + "' for model " + model_name(m.kind()));
}

namespace {

void check_1d(int n, int min_n, double j) {
  require(n >= min_n, "need at least " + std::to_string(min_n) + " cells");
  require(j > 0.0, "J must be positive");
}

}  // namespace

LatticeModel build_sawtooth(int n, double j) {
  check_1d(n, 4, j);
  const double s = std::numbers::sqrt2 * j;
  ModelParams p;
  p.J = j;
  // a = 0 (tooth), b = 1 (base). All amplitudes positive gives the flat band at -2J.
  std::vector<Hopping> hops = {{1, 1, {1, 0}, j}, {1, 0, {0, 0}, s}, {1, 0, {-1, 0}, s}};
  return LatticeModel(ModelKind::Sawtooth, {n, 1}, 1, p, {0.0, 0.0}, std::move(hops));
}

LatticeModel build_stub(int n, double j, double delta) {
  check_1d(n, 4, j);
  require(delta >= 0.0, "stub Delta must be non-negative");
  ModelParams p;
  p.J = j;
  p.Delta = delta;
  // a = 0 (stub), b = 1 (hub), c = 2 (backbone).
  std::vector<Hopping> hops = {{0, 1, {0, 0}, j * std::sqrt(delta)}, {1, 2, {0, 0}, j}, {2, 1, {1, 0}, j}};
  return LatticeModel(ModelKind::Stub, {n, 1}, 1, p, {0.0, 0.0, 0.0}, std::move(hops));
}

LatticeModel build_double_comb(int n, double j, double t, double omega_c) {
  check_1d(n, 3, j);
  require(t > 0.0, "double-comb t must be positive");
  ModelParams p;
  p.J = j;
  p.t = t;
  p.omega_c = omega_c;
  std::vector<Hopping> hops = {{0, 2, {0, 0}, t}, {1, 2, {0, 0}, t}, {2, 2, {1, 0}, j}};
  return LatticeModel(ModelKind::DoubleComb, {n, 1}, 1, p, {omega_c, omega_c, 0.0}, std::move(hops));
}

LatticeModel build_kagome1d(int n, double j) {
  check_1d(n, 4, j);
  ModelParams p;
  p.J = j;
  enum { A, B, C, D, E };
  std::vector<Hopping> hops = {
      {A, B, {0, 0}, j},  {B, C, {0, 0}, -j}, {C, D, {0, 0}, -j}, {D, E, {0, 0}, j},
      {E, C, {1, 0}, -j}, {A, C, {1, 0}, -j}, {A, B, {1, 0}, -j}, {E, D, {1, 0}, -j},
  };
  return LatticeModel(ModelKind::Kagome1D, {n, 1}, 1, p, std::vector<double>(5, 0.0), std::move(hops));
}

LatticeModel build_checkerboard(int nx, int ny, double j) {
  require(nx >= 4 && ny >= 4, "checkerboard needs at least 4 cells per axis");
  require(j > 0.0, "J must be positive");
  ModelParams p;
  p.J = j;
  // Real-space form of H_k = w_d(k) I - J v v^dagger.
  std::vector<Hopping> hops = {
      {0, 0, {0, 1}, -j}, {1, 1, {1, 0}, -j}, {0, 1, {0, 0}, -j},
      {0, 1, {1, 0}, j},  {0, 1, {0, 1}, j},  {0, 1, {1, 1}, -j},
  };
  return LatticeModel(ModelKind::Checkerboard, {nx, ny}, 2, p, {2.0 * j, 2.0 * j}, std::move(hops));
}

LatticeModel build_chain(int n, double j) {
  require(n >= 3, "chain needs at least 3 cells");
  ModelParams p;
  p.J = j;
  return LatticeModel(ModelKind::Chain, {n, 1}, 1, p, {0.0}, {{0, 0, {1, 0}, j}});
}

LatticeModel build_model(ModelKind kind, Cell cells, const ModelParams& p) {
  switch (kind) {
    case ModelKind::Sawtooth: return build_sawtooth(cells[0], p.J);
    case ModelKind::Stub: return build_stub(cells[0], p.J, p.Delta);
    case ModelKind::DoubleComb: return build_double_comb(cells[0], p.J, p.t, p.omega_c);
    case ModelKind::Kagome1D: return build_kagome1d(cells[0], p.J);
    case ModelKind::Checkerboard: return build_checkerboard(cells[0], cells[1], p.J);
    case ModelKind::Chain: return build_chain(cells[0], p.J);
  }
  fail(ErrorCode::Config, "unknown model");
}

namespace {

template <class Add>
void for_each_term(const LatticeModel& m, Add add) {
  const Index n = m.n_sites();
  for (Index s = 0; s < n; ++s) add(s, s, cplx(m.site_energy(s), 0.0));
  const auto& hops = m.hoppings();
  for (int c = 0; c < m.n_cells(); ++c) {
    const Cell cell = m.cell_of(c);
    for (std::size_t h = 0; h < hops.size(); ++h) {
      const Hopping& hp = hops[h];
      const Index i = m.site(cell, hp.from);
      const Index j = m.site({cell[0] + hp.offset[0], cell[1] + hp.offset[1]}, hp.to);
      const cplx t = m.bond_amplitude(c, h);
      add(i, j, t);
      add(j, i, std::conj(t));
    }
  }
}

}  // namespace

CMat real_space_hamiltonian(const LatticeModel& m) {
  CMat h = CMat::Zero(m.n_sites(), m.n_sites());
  for_each_term(m, [&](Index i, Index j, cplx v) { h(i, j) += v; });
  return h;
}

SpMat real_space_sparse(const LatticeModel& m) {
  std::vector<Eigen::Triplet<cplx>> trips;
  for_each_term(m, [&](Index i, Index j, cplx v) {
    if (v != cplx(0.0, 0.0)) trips.emplace_back(i, j, v);
  });
  SpMat h(m.n_sites(), m.n_sites());
  h.setFromTriplets(trips.begin(), trips.end());
  return h;
}

CMat bloch_hamiltonian(const LatticeModel& m, const KVec& k) {
  if (m.disordered()) fail(ErrorCode::Unsupported, "Bloch Hamiltonian undefined for a disordered lattice");
  const int q = m.sublattices();
  CMat h = CMat::Zero(q, q);
  for (int s = 0; s < q; ++s) h(s, s) = m.onsite()[s];
  for (const Hopping& hp : m.hoppings()) {
    const double phase = k[0] * hp.offset[0] + k[1] * hp.offset[1];
    const cplx v = hp.t * std::polar(1.0, phase);
    h(hp.from, hp.to) += v;
    h(hp.to, hp.from) += std::conj(v);
  }
  return h;
}

LatticeModel apply_disorder(const LatticeModel& m, const DisorderSpec& spec) {
  require(spec.strength >= 0.0, "disorder strength must be non-negative");
  LatticeModel out = m;
  out.cache_ = std::make_shared<LatticeModel::Cache>();
  if (spec.strength == 0.0) return out;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> dist(-spec.strength, spec.strength);
  if (spec.kind == DisorderKind::Diagonal) {
    if (out.site_shift_.empty()) out.site_shift_.assign(static_cast<std::size_t>(m.n_sites()), 0.0);
    for (double& v : out.site_shift_) v += dist(rng);
  } else {
    const std::size_t nb = static_cast<std::size_t>(m.n_cells()) * m.hoppings().size();
    if (out.bond_shift_.empty()) out.bond_shift_.assign(nb, 0.0);
    for (double& v : out.bond_shift_) v += dist(rng);
  }
  return out;
}

std::vector<KVec> k_grid(const LatticeModel& m) {
  std::vector<KVec> ks;
  const Cell& n = m.cells();
  auto fold = [](int i, int nn) {
    const int mm = i <= (nn - 1) / 2 ? i : i - nn;
    return 2.0 * std::numbers::pi * mm / nn;
  };
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < (m.dim() == 2 ? n[1] : 1); ++j) ks.push_back({fold(i, n[0]), m.dim() == 2 ? fold(j, n[1]) : 0.0});
  return ks;
}

}  // namespace fbqo
