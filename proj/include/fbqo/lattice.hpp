#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fbqo/linalg.hpp"

namespace fbqo {

enum class ModelKind { Sawtooth, Stub, DoubleComb, Kagome1D, Checkerboard, Chain };

const char* model_name(ModelKind kind);
ModelKind parse_model_name(const std::string& name);

using Cell = std::array<int, 2>;
using KVec = std::array<double, 2>;

// <n, from| H |n + offset, to> = t. The conjugate entry is implied.
struct Hopping {
  int from;
  int to;
  Cell offset;
  cplx t;
};

struct ModelParams {
  double J = 1.0;
  double Delta = 0.0;
  double t = 0.0;
  double omega_c = 0.0;
};

enum class DisorderKind { Diagonal, OffDiagonal };

struct DisorderSpec {
  DisorderKind kind = DisorderKind::Diagonal;
  double strength = 0.0;
  std::uint64_t seed = 0;
};

class LatticeModel {
 public:
  LatticeModel(ModelKind kind, Cell cells, int dim, ModelParams params, std::vector<double> onsite,
               std::vector<Hopping> hoppings);

  ModelKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Cell& cells() const { return cells_; }
  int sublattices() const { return static_cast<int>(onsite_.size()); }
  const ModelParams& params() const { return params_; }
  const std::vector<double>& onsite() const { return onsite_; }
  const std::vector<Hopping>& hoppings() const { return hoppings_; }
  bool disordered() const { return !site_shift_.empty() || !bond_shift_.empty(); }

  int n_cells() const { return cells_[0] * cells_[1]; }
  Index n_sites() const { return static_cast<Index>(n_cells()) * sublattices(); }
  Cell wrap(Cell c) const;
  int cell_index(Cell c) const;
  Cell cell_of(int cell_index) const;
  Index site(Cell c, int sub) const;
  Cell site_cell(Index site) const;
  int site_sublattice(Index site) const;

  double site_energy(Index site) const;
  cplx bond_amplitude(int cell_index, std::size_t hopping) const;

  // Cached dense eigendecomposition of the real-space Hamiltonian.
  const Eigensystem& eigensystem() const;
  bool has_eigensystem() const;

 private:
  friend LatticeModel apply_disorder(const LatticeModel&, const DisorderSpec&);
  struct Cache;

  ModelKind kind_;
  Cell cells_;
  int dim_;
  ModelParams params_;
  std::vector<double> onsite_;
  std::vector<Hopping> hoppings_;
  std::vector<double> site_shift_;
  std::vector<double> bond_shift_;
  std::shared_ptr<Cache> cache_;
};

int sublattice_from_name(const LatticeModel& m, const std::string& name);
std::string sublattice_name(int sub);

LatticeModel build_sawtooth(int n, double j);
LatticeModel build_stub(int n, double j, double delta);
LatticeModel build_double_comb(int n, double j, double t, double omega_c);
LatticeModel build_kagome1d(int n, double j);
LatticeModel build_checkerboard(int nx, int ny, double j);
LatticeModel build_chain(int n, double j);

// Convenience dispatcher used by config parsing.
LatticeModel build_model(ModelKind kind, Cell cells, const ModelParams& params);

CMat real_space_hamiltonian(const LatticeModel& m);
SpMat real_space_sparse(const LatticeModel& m);
CMat bloch_hamiltonian(const LatticeModel& m, const KVec& k);

LatticeModel apply_disorder(const LatticeModel& m, const DisorderSpec& spec);

// The commensurate grid k_d = 2 pi m_d / N_d folded into [-pi, pi).
std::vector<KVec> k_grid(const LatticeModel& m);

}  // namespace fbqo
