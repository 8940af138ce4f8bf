#include "fbqo/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fbqo/error.hpp"

namespace fbqo {

BandStructure band_structure(const LatticeModel& m, const std::vector<KVec>& grid) {
  require(!grid.empty(), "band_structure: empty k-grid");
  BandStructure bs;
  bs.dim = m.dim();
  bs.k = grid;
  const int q = m.sublattices();
  bs.bands.resize(q, static_cast<Index>(grid.size()));
  bs.vectors.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Eigen::SelfAdjointEigenSolver<CMat> es(bloch_hamiltonian(m, grid[i]));
    bs.bands.col(static_cast<Index>(i)) = es.eigenvalues();
    bs.vectors.push_back(es.eigenvectors());
  }
  return bs;
}

BandStructure band_structure(const LatticeModel& m) { return band_structure(m, k_grid(m)); }

std::vector<FlatBandInfo> detect_flat_bands(const BandStructure& bs, double tol) {
  std::vector<FlatBandInfo> out;
  const Index nb = bs.bands.rows();
  const double inf = std::numeric_limits<double>::infinity();
  for (Index b = 0; b < nb; ++b) {
    const double lo = bs.bands.row(b).minCoeff();
    const double hi = bs.bands.row(b).maxCoeff();
    if (hi - lo >= tol) continue;
    FlatBandInfo fb;
    fb.band = static_cast<int>(b);
    fb.energy = bs.bands.row(b).mean();
    fb.bandwidth = hi - lo;
    fb.gap_below = b > 0 ? lo - bs.bands.row(b - 1).maxCoeff() : inf;
    fb.gap_above = b + 1 < nb ? bs.bands.row(b + 1).minCoeff() - hi : inf;
    if (fb.gap_below < tol) fb.gap_below = 0.0;
    if (fb.gap_above < tol) fb.gap_above = 0.0;
    out.push_back(fb);
  }
  return out;
}

Vec density_of_states(const BandStructure& bs, const Vec& omega, double eta) {
  require(eta > 0.0, "density_of_states: broadening must be positive");
  const double nk = static_cast<double>(bs.bands.cols());
  Vec dos(omega.size());
  std::vector<double> terms(static_cast<std::size_t>(bs.bands.size()));
  for (Index w = 0; w < omega.size(); ++w) {
    std::size_t t = 0;
    for (Index k = 0; k < bs.bands.cols(); ++k)
      for (Index b = 0; b < bs.bands.rows(); ++b) {
        const double x = omega[w] - bs.bands(b, k);
        terms[t++] = eta / std::numbers::pi / (x * x + eta * eta);
      }
    dos[w] = pairwise_sum(terms.data(), terms.size()) / nk;
  }
  return dos;
}

FlatBandInfo primary_flat_band(const LatticeModel& m, double tol) {
  auto fbs = detect_flat_bands(band_structure(m), tol);
  if (fbs.empty()) fail(ErrorCode::NoFlatBand, std::string("no flat band in model ") + model_name(m.kind()));
  return fbs.front();
}

}  // namespace fbqo
