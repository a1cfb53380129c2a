#include "qcfield/lp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qcfield::lp {

double max_violation(const HalfSpaces& hs, const RVec& x) {
  if (hs.A.rows() == 0) return 0.0;
  return std::max(0.0, (hs.A * x - hs.b).maxCoeff());
}

std::optional<RVec> clip_feasible(const HalfSpaces& hs, const Box& start) {
  require(hs.A.cols() == 2 && start.dim() == 2, "clip_feasible: requires d = 2");
  using P2 = Eigen::Vector2d;
  std::vector<P2> poly = {{start.lo[0], start.lo[1]},
                          {start.hi[0], start.lo[1]},
                          {start.hi[0], start.hi[1]},
                          {start.lo[0], start.hi[1]}};
  std::vector<P2> next;
  for (Eigen::Index i = 0; i < hs.A.rows() && !poly.empty(); ++i) {
    const P2 a = hs.A.row(i).transpose();
    const double b = hs.b[i];
    next.clear();
    const std::size_t n = poly.size();
    for (std::size_t v = 0; v < n; ++v) {
      const P2& p = poly[v];
      const P2& q = poly[(v + 1) % n];
      const double fp = a.dot(p) - b, fq = a.dot(q) - b;
      if (fp <= 0.0) next.push_back(p);
      if ((fp <= 0.0) != (fq <= 0.0)) {
        const double t = fp / (fp - fq);
        next.push_back(p + t * (q - p));
      }
    }
    poly.swap(next);
  }
  if (poly.empty()) return std::nullopt;
  P2 mean = P2::Zero();
  for (const auto& p : poly) mean += p;
  mean /= static_cast<double>(poly.size());
  return RVec(mean);
}

std::optional<RVec> simplex_feasible(const HalfSpaces& hs) {
  const int m = static_cast<int>(hs.A.rows());
  const int d = static_cast<int>(hs.A.cols());
  if (m == 0) return RVec::Zero(d);

  std::vector<int> art_row;
  for (int i = 0; i < m; ++i)
    if (hs.b[i] < 0.0) art_row.push_back(i);
  const int na = static_cast<int>(art_row.size());
  const int nv = 2 * d + m + na;
  const int rhs = nv;

  RMat T = RMat::Zero(m, nv + 1);
  std::vector<int> basis(m);
  for (int i = 0, a = 0; i < m; ++i) {
    const double s = hs.b[i] < 0.0 ? -1.0 : 1.0;
    T.block(i, 0, 1, d) = s * hs.A.row(i);
    T.block(i, d, 1, d) = -s * hs.A.row(i);
    T(i, 2 * d + i) = s;
    T(i, rhs) = s * hs.b[i];
    if (s < 0.0) {
      T(i, 2 * d + m + a) = 1.0;
      basis[i] = 2 * d + m + a;
      ++a;
    } else {
      basis[i] = 2 * d + i;
    }
  }
  // Reduced costs of the phase-1 objective sum(artificials).
  RVec z = RVec::Zero(nv + 1);
  for (int a = 0; a < na; ++a) z[2 * d + m + a] = 1.0;
  for (int r : art_row) z -= T.row(r).transpose();

  const double scale = std::max(1.0, hs.b.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * scale;
  const int max_iter = 50 * (m + nv);
  for (int it = 0; it < max_iter; ++it) {
    int enter = -1;
    for (int j = 0; j < nv; ++j)
      if (z[j] < -1e-12) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    int leave = -1;
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      if (T(i, enter) <= 1e-12) continue;
      const double ratio = T(i, rhs) / T(i, enter);
      if (leave < 0 || ratio < best - eps ||
          (std::abs(ratio - best) <= eps && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) break;  // phase-1 objective is bounded below; not reached
    T.row(leave) /= T(leave, enter);
    for (int i = 0; i < m; ++i)
      if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    z -= z[enter] * T.row(leave).transpose();
    basis[leave] = enter;
  }

  if (-z[rhs] > 1e-9 * scale) return std::nullopt;
  RVec x = RVec::Zero(d);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < d)
      x[basis[i]] += T(i, rhs);
    else if (basis[i] < 2 * d)
      x[basis[i] - d] -= T(i, rhs);
  }
  return x;
}

}  // namespace qcfield::lp
