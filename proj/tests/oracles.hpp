#pragma once

// Reference computations used only by the tests. They avoid the library's
// evaluation paths: plain loops over plane waves, their own finite
// differences and closed forms worked out by hand.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "qcfield/wavefield.hpp"

namespace oracle {

using qcfield::cplx;
using qcfield::CMat;
using qcfield::CVec;
using qcfield::RMat;
using qcfield::RVec;

/// psi from p = sum_j alpha_j e^{i t_j} + beta_j e^{-i t_j}, t = K^T x + gamma,
/// and grad p = sum_j i k_j (alpha_j e^{i t_j} - beta_j e^{-i t_j}).
inline double psi(const RVec& x, const CVec& u, const RMat& K, const RVec& gamma, const CMat& A) {
  const int d = static_cast<int>(K.rows()), N = static_cast<int>(K.cols());
  std::vector<cplx> v(d + 1, 0.0);
  for (int j = 0; j < N; ++j) {
    double t = gamma[j];
    for (int r = 0; r < d; ++r) t += K(r, j) * x[r];
    const cplx ep(std::cos(t), std::sin(t));
    const cplx em = std::conj(ep);
    v[0] += u[j] * ep + u[N + j] * em;
    for (int r = 0; r < d; ++r) v[r + 1] += cplx(0, K(r, j)) * (u[j] * ep - u[N + j] * em);
  }
  cplx s = 0.0;
  for (int a = 0; a <= d; ++a)
    for (int b = 0; b <= d; ++b) s += std::conj(v[a]) * A(a, b) * v[b];
  return s.real();
}

inline CMat diag_A(int d, double a, double b) {
  CMat A = CMat::Zero(d + 1, d + 1);
  A(0, 0) = a;
  for (int i = 1; i <= d; ++i) A(i, i) = -b;
  return A;
}

/// Fourth-order central differences.
inline RVec fd_grad(const std::function<double(const RVec&)>& f, const RVec& x, double h) {
  RVec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    auto at = [&](double s) {
      RVec y = x;
      y[i] += s * h;
      return f(y);
    };
    g[i] = (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
  }
  return g;
}

/// Second-order central differences of the fourth-order gradient.
inline RMat fd_hess(const std::function<double(const RVec&)>& f, const RVec& x, double h) {
  const auto n = x.size();
  RMat H(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    RVec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    H.col(i) = (fd_grad(f, xp, h) - fd_grad(f, xm, h)) / (2 * h);
  }
  return 0.5 * (H + H.transpose());
}

inline CMat random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = cplx(g(rng), g(rng));
  return 0.5 * (A + A.adjoint());
}

inline CVec random_controls(int N, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVec u(2 * N);
  for (auto& z : u) z = cplx(g(rng), g(rng));
  return u;
}

inline RVec random_vec(int n, std::mt19937_64& rng, double span) {
  std::uniform_real_distribution<double> U(-span, span);
  RVec v(n);
  for (auto& z : v) z = U(rng);
  return v;
}

/// d x N with random unit directions scaled by k.
inline RMat random_K(int d, int N, double k, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  RMat K(d, N);
  for (;;) {
    for (int j = 0; j < N; ++j) {
      RVec v(d);
      for (auto& z : v) z = g(rng);
      K.col(j) = k * v.normalized();
    }
    Eigen::JacobiSVD<RMat> svd(K);
    if (svd.singularValues()[d - 1] > 0.05 * svd.singularValues()[0]) return K;
  }
}

/// psi at the origin for the N-fan with alpha = 1, beta = -1, a = b = 1:
/// p(0) = 0 and grad p(0) = 2i sum_j k_j, so psi = -4 |sum_j e^{i (j-1) pi / N}|^2
/// = -4 / sin^2(pi / 2N) = -8 / (1 - cos(pi / N)).
inline double fan_origin_value(int N) { return -8.0 / (1.0 - std::cos(M_PI / N)); }

/// Cosine of the great-circle angle between u0 = [1..1, -1..-1]/sqrt(2N) and
/// its translate by h: the real inner product is sum_j cos(h_j) / N.
inline double translate_cosine(const RVec& h) {
  double s = 0.0;
  for (auto v : h) s += std::cos(v);
  return s / static_cast<double>(h.size());
}

/// Feasibility of c for the line y = (phi x, x) (K = [phi, 1]): interval intersection.
inline bool interval_feasible(double k1, double k2, long long c1, long long c2) {
  const double lo1 = (2 * M_PI * c1 - M_PI) / k1, hi1 = (2 * M_PI * c1 + M_PI) / k1;
  const double lo2 = (2 * M_PI * c2 - M_PI) / k2, hi2 = (2 * M_PI * c2 + M_PI) / k2;
  return std::max(std::min(lo1, hi1), std::min(lo2, hi2)) <= std::min(std::max(lo1, hi1), std::max(lo2, hi2));
}

/// Does the strip system |k_j . x - (2 pi c_j - gamma_j)| <= pi + slack (d = 2)
/// have a solution? The set is a bounded polygon, so it is non-empty iff some
/// pairwise intersection of boundary lines satisfies every strip.
inline bool strips_feasible_2d(const RMat& K, const RVec& gamma, const std::vector<long long>& c,
                               double slack) {
  const int N = static_cast<int>(K.cols());
  std::vector<std::pair<RVec, double>> lines;  // n . x = t
  for (int j = 0; j < N; ++j) {
    const double mid = 2 * M_PI * static_cast<double>(c[j]) - gamma[j];
    lines.push_back({K.col(j), mid + M_PI});
    lines.push_back({K.col(j), mid - M_PI});
  }
  auto inside = [&](const RVec& x) {
    for (int j = 0; j < N; ++j) {
      const double mid = 2 * M_PI * static_cast<double>(c[j]) - gamma[j];
      if (std::abs(K.col(j).dot(x) - mid) > M_PI + slack * (1 + std::abs(mid))) return false;
    }
    return true;
  };
  for (std::size_t a = 0; a < lines.size(); ++a)
    for (std::size_t b = a + 1; b < lines.size(); ++b) {
      Eigen::Matrix2d M;
      M << lines[a].first.transpose(), lines[b].first.transpose();
      if (std::abs(M.determinant()) < 1e-12) continue;
      const RVec x = M.inverse() * Eigen::Vector2d(lines[a].second, lines[b].second);
      if (inside(x)) return true;
    }
  return false;
}

/// Fibonacci word over {0 = short, 1 = long}: 1 -> 10, 0 -> 1.
inline std::vector<int> fibonacci_word(std::size_t n) {
  std::vector<int> w{1};
  while (w.size() < n) {
    std::vector<int> next;
    for (int s : w) {
      if (s == 1) {
        next.push_back(1);
        next.push_back(0);
      } else {
        next.push_back(1);
      }
    }
    w.swap(next);
  }
  w.resize(n);
  return w;
}

}  // namespace oracle
