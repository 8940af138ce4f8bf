#pragma once

#include <vector>

#include "fbqo/lattice.hpp"

namespace fbqo {

struct BandStructure {
  int dim = 1;
  std::vector<KVec> k;
  Mat bands;                  // bands(m, ik), ascending in m
  std::vector<CMat> vectors;  // columns are Bloch eigenvectors at each k
};

struct FlatBandInfo {
  int band = 0;
  double energy = 0.0;
  double bandwidth = 0.0;
  double gap_below = 0.0;
  double gap_above = 0.0;
};

BandStructure band_structure(const LatticeModel& m, const std::vector<KVec>& grid);
BandStructure band_structure(const LatticeModel& m);

std::vector<FlatBandInfo> detect_flat_bands(const BandStructure& bs, double tol = 1e-8);

// Lorentzian-broadened density of states per unit cell.
Vec density_of_states(const BandStructure& bs, const Vec& omega, double eta);

// First flat band of a clean model on its own k-grid.
FlatBandInfo primary_flat_band(const LatticeModel& m, double tol = 1e-8);

}  // namespace fbqo
