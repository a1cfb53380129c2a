#include "qcfield/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include <Eigen/Eigenvalues>

#include "qcfield/lp.hpp"

namespace qcfield::tiling {

namespace {

lp::HalfSpaces cell_constraints(const Center& c, const Subspace& sub, const Box* window,
                                double tie) {
  const int d = sub.d(), N = sub.N();
  const int extra = window ? 2 * d : 0;
  lp::HalfSpaces hs{RMat(2 * N + extra, d), RVec(2 * N + extra)};
  for (int j = 0; j < N; ++j) {
    const double mid = kTwoPi * static_cast<double>(c[j]) - sub.gamma()[j];
    const double slack = tie * (1.0 + std::abs(mid));
    hs.A.row(2 * j) = sub.K().col(j).transpose();
    hs.b[2 * j] = mid + kPi + slack;
    hs.A.row(2 * j + 1) = -sub.K().col(j).transpose();
    hs.b[2 * j + 1] = -(mid - kPi) + slack;
  }
  if (window) {
    for (int i = 0; i < d; ++i) {
      RVec e = RVec::Zero(d);
      e[i] = 1.0;
      hs.A.row(2 * N + 2 * i) = e.transpose();
      hs.b[2 * N + 2 * i] = window->hi[i];
      hs.A.row(2 * N + 2 * i + 1) = -e.transpose();
      hs.b[2 * N + 2 * i + 1] = -window->lo[i];
    }
  }
  return hs;
}

double smallest_singular_value(const RMat& K) {
  Eigen::SelfAdjointEigenSolver<RMat> es(K * K.transpose(), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues()[0], 0.0));
}

double angle_between(const RVec& u, const RVec& v) {
  const RVec a = u.normalized(), b = v.normalized();
  return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
}

}  // namespace

Feasibility cell_intersects_subspace(const Center& c, const Subspace& sub, Solver solver,
                                     const Box* window) {
  require(static_cast<int>(c.size()) == sub.N(), "cell_intersects_subspace: center must have length N");
  if (window) require(window->dim() == sub.d(), "cell_intersects_subspace: window dimension mismatch");
  if (solver == Solver::Auto) solver = sub.d() == 2 ? Solver::Clipping : Solver::Simplex;
  require(solver != Solver::Clipping || sub.d() == 2,
          "cell_intersects_subspace: clipping solver requires d = 2");

  const lp::HalfSpaces hs = cell_constraints(c, sub, window, kBoundaryTie);
  std::optional<RVec> x;
  if (solver == Solver::Clipping) {
    // Any feasible x has ||K^T (x - x*)|| <= 2 pi sqrt(N) around the projection x*.
    const RVec mid = project_center(c, sub);
    const double half = 1.01 * kTwoPi * std::sqrt(static_cast<double>(sub.N())) /
                            smallest_singular_value(sub.K()) + 1.0;
    x = lp::clip_feasible(hs, Box((mid.array() - half).matrix(), (mid.array() + half).matrix()));
  } else {
    x = lp::simplex_feasible(hs);
  }

  Feasibility out;
  if (!x) return out;
  out.feasible = true;
  out.witness = *x;
  out.violation = lp::max_violation(cell_constraints(c, sub, window, 0.0), *x);
  return out;
}

RVec project_center(const Center& c, const Subspace& sub) {
  require(static_cast<int>(c.size()) == sub.N(), "project_center: center must have length N");
  RVec t(sub.N());
  for (int j = 0; j < sub.N(); ++j) t[j] = kTwoPi * static_cast<double>(c[j]) - sub.gamma()[j];
  const RMat& K = sub.K();
  return (K * K.transpose()).llt().solve(K * t);
}

TilingGraph build_tiling(const Box& region, double seed_density, const Subspace& sub,
                         double wavelength, const TilingOptions& options) {
  const int d = sub.d(), N = sub.N();
  require(region.dim() == d, "build_tiling: region dimension must equal d");
  require(!region.degenerate(), "build_tiling: region is empty");
  require(seed_density > 0.0 && wavelength > 0.0,
          "build_tiling: seed density and wavelength must be positive");

  std::map<Center, RVec> accepted;  // center -> witness
  std::set<Center> rejected;
  std::deque<Center> queue;

  auto consider = [&](const Center& c) {
    if (accepted.count(c) || rejected.count(c)) return;
    Feasibility f = cell_intersects_subspace(c, sub, options.solver, &region);
    if (!f.feasible) {
      rejected.insert(c);
      return;
    }
    accepted.emplace(c, std::move(f.witness));
    queue.push_back(c);
    if (accepted.size() > options.node_cap)
      throw ResourceError("build_tiling: node count exceeds cap of " +
                          std::to_string(options.node_cap));
  };

  // Step 1-2: seed grid, rounded to lattice centers.
  std::vector<long long> counts(d);
  long long total = 1;
  for (int i = 0; i < d; ++i) {
    const double span = region.hi[i] - region.lo[i];
    counts[i] = std::max<long long>(2, static_cast<long long>(std::ceil(span / wavelength * seed_density)) + 1);
    total *= counts[i];
  }
  for (long long s = 0; s < total; ++s) {
    RVec x(d);
    long long r = s;
    for (int i = 0; i < d; ++i) {
      const long long idx = r % counts[i];
      r /= counts[i];
      x[i] = region.lo[i] + (region.hi[i] - region.lo[i]) * static_cast<double>(idx) /
                                static_cast<double>(counts[i] - 1);
    }
    const RVec y = sub.lift(x);
    Center c(N);
    for (int j = 0; j < N; ++j) c[j] = std::llround(y[j] / kTwoPi);
    consider(c);
  }

  // Step 3: close under face adjacency until nothing new is feasible.
  while (!queue.empty()) {
    Center c = std::move(queue.front());
    queue.pop_front();
    for (int j = 0; j < N; ++j) {
      for (int s : {1, -1}) {
        Center nb = c;
        nb[j] += s;
        consider(nb);
      }
    }
  }

  // Steps 4-5.
  TilingGraph g;
  g.region = region;
  std::map<Center, std::size_t> index;
  for (auto& [c, w] : accepted) {
    index.emplace(c, g.nodes.size());
    g.nodes.push_back(Node{c, project_center(c, sub), w});
  }
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    for (int j = 0; j < N; ++j) {
      Center nb = g.nodes[i].center;
      ++nb[j];
      auto it = index.find(nb);
      if (it != index.end()) g.edges.push_back(Edge{i, it->second, j});
    }
  }
  return g;
}

Tiling1D tiling_1d(double slope, double extent) {
  require(slope > 0.0, "tiling_1d: slope must be positive");
  require(extent > 0.0, "tiling_1d: extent must be positive");
  RMat K(1, 2);
  K << 1.0, slope;
  const Subspace sub(K);
  const Box region(RVec::Constant(1, -extent / 2.0), RVec::Constant(1, extent / 2.0));
  const TilingGraph g = build_tiling(region, 1.0, sub, kTwoPi);

  const double stretch = std::sqrt(1.0 + slope * slope);
  Tiling1D out;
  std::vector<double> pos;
  for (const auto& n : g.nodes) pos.push_back(n.x[0] * stretch);
  std::sort(pos.begin(), pos.end());
  // Rational slopes put several centers on the same projected point.
  for (double p : pos)
    if (out.positions.empty() || p - out.positions.back() > 1e-9 * (1.0 + std::abs(p)))
      out.positions.push_back(p);

  for (std::size_t i = 1; i < out.positions.size(); ++i)
    out.gaps.push_back(out.positions[i] - out.positions[i - 1]);

  std::vector<double> sorted = out.gaps;
  std::sort(sorted.begin(), sorted.end());
  for (double v : sorted)
    if (out.lengths.empty() || v - out.lengths.back() > 1e-9 * v) out.lengths.push_back(v);
  for (double v : out.gaps) {
    auto it = std::min_element(out.lengths.begin(), out.lengths.end(), [v](double a, double b) {
      return std::abs(a - v) < std::abs(b - v);
    });
    out.symbols.push_back(static_cast<int>(it - out.lengths.begin()));
  }
  return out;
}

std::size_t detect_period(const std::vector<int>& s) {
  for (std::size_t p = 1; p <= s.size() / 2; ++p) {
    bool ok = true;
    for (std::size_t i = 0; i + p < s.size() && ok; ++i) ok = s[i] == s[i + p];
    if (ok) return p;
  }
  return 0;
}

void Histogram::add(double v) { ++counts[std::llround(v / bin_width)]; }

std::size_t Histogram::total() const {
  std::size_t t = 0;
  for (const auto& [bin, n] : counts) t += n;
  return t;
}

TileStatistics tile_statistics(const TilingGraph& g, double length_bin, double angle_bin) {
  require(length_bin > 0.0 && angle_bin > 0.0, "tile_statistics: bin widths must be positive");
  TileStatistics st;
  st.edge_lengths.bin_width = length_bin;
  st.edge_angles.bin_width = angle_bin;
  st.rhombus_angles.bin_width = angle_bin;

  std::vector<std::vector<RVec>> incident(g.nodes.size());
  for (const auto& e : g.edges) {
    const RVec v = g.nodes[e.b].x - g.nodes[e.a].x;
    st.edge_lengths.add(v.norm());
    incident[e.a].push_back(v);
    incident[e.b].push_back(-v);
  }
  for (const auto& vs : incident) {
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j) {
        st.edge_angles.add(angle_between(vs[i], vs[j]));
        ++st.wedges;
      }
  }

  std::map<Center, std::size_t> index;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) index.emplace(g.nodes[i].center, i);
  for (const auto& n : g.nodes) {
    const int N = static_cast<int>(n.center.size());
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) {
        Center ci = n.center, cj = n.center, cij = n.center;
        ++ci[i];
        ++cj[j];
        ++cij[i];
        ++cij[j];
        auto a = index.find(ci), b = index.find(cj), c = index.find(cij);
        if (a == index.end() || b == index.end() || c == index.end()) continue;
        double t = angle_between(g.nodes[a->second].x - n.x, g.nodes[b->second].x - n.x);
        st.rhombus_angles.add(std::min(t, kPi - t));
      }
  }
  return st;
}

}  // namespace qcfield::tiling
