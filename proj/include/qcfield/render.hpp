#pragma once

// Grid sampling of the ARP and file output: graymap rasters, CSV tables,
// tiling overlays as SVG, 3D level-set point clouds and transition frames.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qcfield/control.hpp"
#include "qcfield/tiling.hpp"
#include "qcfield/wavefield.hpp"

namespace qcfield::render {

/// Samples on the nodes lo + i (hi - lo) / (n - 1) of each axis (the centre
/// when n = 1). Axis 0 varies fastest: index = i0 + n0 (i1 + n1 i2).
struct FieldGrid {
  Box region;
  std::vector<int> resolution;
  std::vector<double> values;
  double min = 0.0;
  double max = 0.0;

  int dim() const { return static_cast<int>(resolution.size()); }
  std::size_t size() const { return values.size(); }
  double coord(int axis, int i) const;
  RVec node(std::size_t index) const;
  std::vector<int> indices(std::size_t index) const;
  std::size_t flat(const std::vector<int>& idx) const;
};

inline constexpr std::size_t kDefaultGridCap = std::size_t{1} << 28;

/// Throws ResourceError when the node count exceeds `cap`.
FieldGrid sample_grid(const Box& region, const std::vector<int>& resolution,
                      const std::function<double(const RVec&)>& f,
                      std::size_t cap = kDefaultGridCap);
FieldGrid sample_grid(const Box& region, const std::vector<int>& resolution, const Controls& u,
                      const WaveConfig& cfg, const PotentialSpec& spec = {},
                      std::size_t cap = kDefaultGridCap);

struct PointCloud {
  double threshold = 0.0;
  std::vector<std::size_t> indices;  // grid indices, ascending
  std::vector<RVec> points;
};

/// Grid points with psi <= min + fraction (max - min). 3D grids only.
PointCloud level_set_points_3d(const FieldGrid& grid, double fraction);

/// 8-bit levels: round(255 (v - min) / (max - min)), or 128 for a constant grid.
std::vector<std::uint8_t> gray_levels(const FieldGrid& grid);

/// Binary graymap (P5). 1D grids become a single row; row 0 is the lowest y.
void render_raster(const FieldGrid& grid, const std::string& path);
/// One line per grid row, comma separated, 17 significant digits.
void render_csv(const FieldGrid& grid, const std::string& path);
void render_points_csv(const PointCloud& cloud, const std::string& path);

/// Maps physical x to SVG user units: (x0 - lo0) / wavelength, (hi1 - x1) / wavelength.
struct Canvas {
  Box region;
  double wavelength = kTwoPi;
  Eigen::Vector2d map(const RVec& x) const;
  double width() const;
  double height() const;
};

/// Edges as lines and nodes as circles in node order, over an optional
/// underlay whose pixel centres sit on the grid nodes.
void render_tiling_svg(const tiling::TilingGraph& g, const FieldGrid* underlay,
                       const std::string& path, double wavelength = kTwoPi);
std::string tiling_svg(const tiling::TilingGraph& g, const FieldGrid* underlay,
                       double wavelength = kTwoPi);

struct FrameSet {
  std::vector<std::string> files;
  double spacing = 0.0;  // arc length between consecutive frames
};

/// Rasters at equal arc-length steps named <prefix>_000.pgm, ...
FrameSet render_transition_frames(const control::TransitionPath& path, int frames,
                                  const Box& region, const std::vector<int>& resolution,
                                  const WaveConfig& cfg, const PotentialSpec& spec,
                                  const std::string& prefix);

/// Exact text of a double with 17 significant digits.
std::string format_double(double v);

}  // namespace qcfield::render
