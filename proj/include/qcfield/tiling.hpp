#pragma once

// Cut-and-project tilings: lattice cells of 2 pi Z^N whose cube intersects
// the cut y = K^T x + gamma, projected back to R^d and joined across faces.

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "qcfield/wavefield.hpp"

namespace qcfield::tiling {

using Center = std::vector<long long>;

enum class Solver { Auto, Clipping, Simplex };

/// Cell faces are relaxed by this much so that tangencies count as hits.
inline constexpr double kBoundaryTie = 1e-10;

struct Feasibility {
  bool feasible = false;
  RVec witness;            // x with K^T x + gamma inside the closed cell
  double violation = 0.0;  // max constraint excess at the witness
};

/// Does the closed cube prod_j [2 pi c_j - pi, 2 pi c_j + pi] meet the cut?
/// An optional window restricts x to a box.
Feasibility cell_intersects_subspace(const Center& c, const Subspace& sub,
                                     Solver solver = Solver::Auto,
                                     const Box* window = nullptr);

/// (K K^T)^{-1} K (2 pi c - gamma).
RVec project_center(const Center& c, const Subspace& sub);

struct Node {
  Center center;
  RVec x;        // projected position
  RVec witness;  // point of the cut inside this cell
};

struct Edge {
  std::size_t a;  // index of the node with the smaller center
  std::size_t b;  // a's center plus e_dir
  int dir;
};

struct TilingGraph {
  std::vector<Node> nodes;  // sorted by center, lexicographic
  std::vector<Edge> edges;  // sorted by (a, dir)
  Box region;
};

struct TilingOptions {
  std::size_t node_cap = 1'000'000;
  Solver solver = Solver::Auto;
};

/// Seeds a grid with `seed_density` points per wavelength per axis, rounds
/// the lifted points to lattice centers, closes the set under face adjacency
/// restricted to cells meeting the cut inside `region`, then links neighbours.
/// Throws ResourceError past options.node_cap.
TilingGraph build_tiling(const Box& region, double seed_density, const Subspace& sub,
                         double wavelength, const TilingOptions& options = {});
inline TilingGraph build_tiling(const Box& region, double seed_density, const WaveConfig& cfg,
                                const TilingOptions& options = {}) {
  return build_tiling(region, seed_density, cfg.subspace(), cfg.wavelength(), options);
}

/// The line y2 = slope * y1 through the origin of Z^2 cells.
struct Tiling1D {
  std::vector<double> positions;  // arc-length positions of the projected centers
  std::vector<double> gaps;       // consecutive differences
  std::vector<double> lengths;    // distinct gap lengths, ascending
  std::vector<int> symbols;       // index into `lengths` for each gap
};

/// `extent` is the full window length along x, centered on the origin.
Tiling1D tiling_1d(double slope, double extent);

/// Smallest p with s[i] = s[i + p] for all valid i, or 0 if none below size/2.
std::size_t detect_period(const std::vector<int>& s);

struct Histogram {
  double bin_width = 0.0;
  std::map<long long, std::size_t> counts;  // bin index round(value / width)

  void add(double v);
  std::size_t total() const;
  double bin_center(long long bin) const { return static_cast<double>(bin) * bin_width; }
};

struct TileStatistics {
  Histogram edge_lengths;  // one entry per edge
  Histogram edge_angles;   // one entry per pair of edges sharing a node, in [0, pi]
  /// Acute rhombus angle (radians, binned) -> number of rhombi c, c+e_i, c+e_j, c+e_i+e_j.
  Histogram rhombus_angles;
  std::size_t wedges = 0;
};

TileStatistics tile_statistics(const TilingGraph& g, double length_bin = 1e-7,
                               double angle_bin = 1e-7);

}  // namespace qcfield::tiling
