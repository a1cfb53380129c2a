#include "qcfield/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qcfield/parallel.hpp"

namespace qcfield::render {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  return os;
}

void close_out(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw IoError("write to '" + path + "' failed");
}

std::string fmt(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string base64(const std::vector<std::uint8_t>& in) {
  static const char* tbl = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((in.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < in.size(); i += 3) {
    const unsigned v = (in[i] << 16) | (in[i + 1] << 8) | in[i + 2];
    out += tbl[(v >> 18) & 63];
    out += tbl[(v >> 12) & 63];
    out += tbl[(v >> 6) & 63];
    out += tbl[v & 63];
  }
  if (i < in.size()) {
    unsigned v = in[i] << 16;
    if (i + 1 < in.size()) v |= in[i + 1] << 8;
    out += tbl[(v >> 18) & 63];
    out += tbl[(v >> 12) & 63];
    out += i + 1 < in.size() ? tbl[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

void put_le(std::vector<std::uint8_t>& b, std::uint32_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) b.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

// 24-bit top-down BMP; the first image row is the highest y.
std::vector<std::uint8_t> gray_bmp(const FieldGrid& grid) {
  const auto w = static_cast<std::uint32_t>(grid.resolution[0]);
  const auto h = static_cast<std::uint32_t>(grid.resolution[1]);
  const std::uint32_t stride = (3 * w + 3) & ~3u;
  const std::uint32_t data = stride * h;
  std::vector<std::uint8_t> b;
  b.reserve(54 + data);
  b.push_back('B');
  b.push_back('M');
  put_le(b, 54 + data, 4);
  put_le(b, 0, 4);
  put_le(b, 54, 4);
  put_le(b, 40, 4);
  put_le(b, w, 4);
  put_le(b, static_cast<std::uint32_t>(-static_cast<std::int32_t>(h)), 4);
  put_le(b, 1, 2);
  put_le(b, 24, 2);
  put_le(b, 0, 4);
  put_le(b, data, 4);
  put_le(b, 2835, 4);
  put_le(b, 2835, 4);
  put_le(b, 0, 4);
  put_le(b, 0, 4);
  const auto levels = gray_levels(grid);
  for (std::uint32_t r = 0; r < h; ++r) {
    const std::size_t row = h - 1 - r;
    for (std::uint32_t c = 0; c < w; ++c) {
      const std::uint8_t g = levels[row * w + c];
      b.insert(b.end(), {g, g, g});
    }
    for (std::uint32_t p = 3 * w; p < stride; ++p) b.push_back(0);
  }
  return b;
}

}  // namespace

std::string format_double(double v) { return fmt(v, 17); }

double FieldGrid::coord(int axis, int i) const {
  const int n = resolution[axis];
  if (n == 1) return 0.5 * (region.lo[axis] + region.hi[axis]);
  return region.lo[axis] + (region.hi[axis] - region.lo[axis]) * i / (n - 1);
}

std::vector<int> FieldGrid::indices(std::size_t index) const {
  std::vector<int> idx(resolution.size());
  for (std::size_t a = 0; a < resolution.size(); ++a) {
    idx[a] = static_cast<int>(index % resolution[a]);
    index /= resolution[a];
  }
  return idx;
}

std::size_t FieldGrid::flat(const std::vector<int>& idx) const {
  std::size_t f = 0;
  for (std::size_t a = resolution.size(); a-- > 0;) f = f * resolution[a] + idx[a];
  return f;
}

RVec FieldGrid::node(std::size_t index) const {
  const auto idx = indices(index);
  RVec x(dim());
  for (int a = 0; a < dim(); ++a) x[a] = coord(a, idx[a]);
  return x;
}

FieldGrid sample_grid(const Box& region, const std::vector<int>& resolution,
                      const std::function<double(const RVec&)>& f, std::size_t cap) {
  require(static_cast<int>(resolution.size()) == region.dim() && region.dim() > 0,
          "sample_grid: resolution must give one count per region axis");
  std::size_t total = 1;
  for (int n : resolution) {
    require(n >= 1, "sample_grid: resolution must be at least 1 on every axis");
    if (total > cap / static_cast<std::size_t>(n))
      throw ResourceError("sample_grid: grid exceeds the cap of " + std::to_string(cap) + " nodes");
    total *= static_cast<std::size_t>(n);
  }
  FieldGrid g;
  g.region = region;
  g.resolution = resolution;
  g.values.assign(total, 0.0);
  const std::size_t n0 = static_cast<std::size_t>(resolution[0]);
  parallel_for(total / n0, [&](std::size_t line) {
    RVec x = g.node(line * n0);
    for (std::size_t i = 0; i < n0; ++i) {
      x[0] = g.coord(0, static_cast<int>(i));
      g.values[line * n0 + i] = f(x);
    }
  });
  auto [lo, hi] = std::minmax_element(g.values.begin(), g.values.end());
  g.min = *lo;
  g.max = *hi;
  return g;
}

FieldGrid sample_grid(const Box& region, const std::vector<int>& resolution, const Controls& u,
                      const WaveConfig& cfg, const PotentialSpec& spec, std::size_t cap) {
  require(region.dim() == cfg.d(), "sample_grid: region dimension must equal d");
  return sample_grid(
      region, resolution, [&](const RVec& x) { return arp_value(x, u, cfg, spec); }, cap);
}

PointCloud level_set_points_3d(const FieldGrid& grid, double fraction) {
  require(grid.dim() == 3, "level_set_points_3d: grid must be three-dimensional");
  require(fraction > 0.0 && fraction <= 1.0, "level_set_points_3d: fraction must lie in (0, 1]");
  PointCloud pc;
  pc.threshold = grid.min + fraction * (grid.max - grid.min);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.values[i] <= pc.threshold) {
      pc.indices.push_back(i);
      pc.points.push_back(grid.node(i));
    }
  }
  return pc;
}

std::vector<std::uint8_t> gray_levels(const FieldGrid& grid) {
  std::vector<std::uint8_t> out(grid.size(), 128);
  const double range = grid.max - grid.min;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = (grid.values[i] - grid.min) / range;
    out[i] = static_cast<std::uint8_t>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
  }
  return out;
}

void render_raster(const FieldGrid& grid, const std::string& path) {
  require(grid.dim() == 1 || grid.dim() == 2, "render_raster: grid must be 1D or 2D");
  const int w = grid.resolution[0];
  const int h = grid.dim() == 2 ? grid.resolution[1] : 1;
  const auto levels = gray_levels(grid);
  auto os = open_out(path);
  os << "P5\n" << w << ' ' << h << "\n255\n";
  os.write(reinterpret_cast<const char*>(levels.data()), static_cast<std::streamsize>(levels.size()));
  close_out(os, path);
}

void render_csv(const FieldGrid& grid, const std::string& path) {
  auto os = open_out(path);
  const std::size_t n0 = static_cast<std::size_t>(grid.resolution[0]);
  std::string line;
  for (std::size_t r = 0; r < grid.size() / n0; ++r) {
    line.clear();
    for (std::size_t i = 0; i < n0; ++i) {
      if (i) line += ',';
      line += format_double(grid.values[r * n0 + i]);
    }
    line += '\n';
    os << line;
  }
  close_out(os, path);
}

void render_points_csv(const PointCloud& cloud, const std::string& path) {
  auto os = open_out(path);
  os << "x,y,z\n";
  for (const auto& p : cloud.points) {
    for (Eigen::Index a = 0; a < p.size(); ++a) os << (a ? "," : "") << format_double(p[a]);
    os << '\n';
  }
  close_out(os, path);
}

Eigen::Vector2d Canvas::map(const RVec& x) const {
  return {(x[0] - region.lo[0]) / wavelength, (region.hi[1] - x[1]) / wavelength};
}

double Canvas::width() const { return (region.hi[0] - region.lo[0]) / wavelength; }
double Canvas::height() const { return (region.hi[1] - region.lo[1]) / wavelength; }

std::string tiling_svg(const tiling::TilingGraph& g, const FieldGrid* underlay,
                       double wavelength) {
  require(g.region.dim() == 2, "render_tiling_svg: tiling must be planar");
  require(wavelength > 0.0, "render_tiling_svg: wavelength must be positive");
  const Canvas cv{g.region, wavelength};
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << fmt(cv.width(), 10) << ' '
     << fmt(cv.height(), 10) << "\" width=\"" << fmt(100 * cv.width(), 10) << "\" height=\""
     << fmt(100 * cv.height(), 10) << "\">\n";

  if (underlay) {
    require(underlay->dim() == 2, "render_tiling_svg: underlay grid must be 2D");
    const int nx = underlay->resolution[0], ny = underlay->resolution[1];
    auto pitch = [&](int axis, int n) {
      const double span = underlay->region.hi[axis] - underlay->region.lo[axis];
      return (n > 1 ? span / (n - 1) : span) / wavelength;
    };
    const double px = pitch(0, nx), py = pitch(1, ny);
    RVec top_left(2);
    top_left << underlay->coord(0, 0), underlay->coord(1, ny - 1);
    const Eigen::Vector2d c = cv.map(top_left);
    os << "<image x=\"" << fmt(c.x() - px / 2, 10) << "\" y=\"" << fmt(c.y() - py / 2, 10)
       << "\" width=\"" << fmt(px * nx, 10) << "\" height=\"" << fmt(py * ny, 10)
       << "\" preserveAspectRatio=\"none\" style=\"image-rendering:pixelated\" href=\"data:image/bmp;base64,"
       << base64(gray_bmp(*underlay)) << "\"/>\n";
  }

  if (!g.edges.empty()) {
    os << "<g stroke=\"#1f3a93\" stroke-width=\"0.02\" stroke-linecap=\"round\">\n";
    for (const auto& e : g.edges) {
      const auto a = cv.map(g.nodes[e.a].x), b = cv.map(g.nodes[e.b].x);
      os << "<line x1=\"" << fmt(a.x(), 10) << "\" y1=\"" << fmt(a.y(), 10) << "\" x2=\""
         << fmt(b.x(), 10) << "\" y2=\"" << fmt(b.y(), 10) << "\"/>\n";
    }
    os << "</g>\n";
  }
  if (!g.nodes.empty()) {
    os << "<g fill=\"#c0392b\">\n";
    for (const auto& n : g.nodes) {
      const auto p = cv.map(n.x);
      os << "<circle cx=\"" << fmt(p.x(), 10) << "\" cy=\"" << fmt(p.y(), 10) << "\" r=\"0.04\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void render_tiling_svg(const tiling::TilingGraph& g, const FieldGrid* underlay,
                       const std::string& path, double wavelength) {
  const std::string doc = tiling_svg(g, underlay, wavelength);
  auto os = open_out(path);
  os << doc;
  close_out(os, path);
}

FrameSet render_transition_frames(const control::TransitionPath& path, int frames,
                                  const Box& region, const std::vector<int>& resolution,
                                  const WaveConfig& cfg, const PotentialSpec& spec,
                                  const std::string& prefix) {
  FrameSet fs;
  const auto us = path.frames(frames);
  fs.spacing = path.arc_length() / (frames - 1);
  for (int i = 0; i < frames; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "_%03d.pgm", i);
    const std::string file = prefix + name;
    render_raster(sample_grid(region, resolution, us[i], cfg, spec), file);
    fs.files.push_back(file);
  }
  return fs;
}

}  // namespace qcfield::render
