#pragma once

// Periodic / quasiperiodic classification of a cut y = K^T x + gamma.
//
// The restricted field is periodic iff range(K^T) contains d independent
// vectors of (2 pi) Z^N. Since 2 pi n lies in range(K^T) iff Z^T n = 0 for an
// orthonormal basis Z of null(K), the search looks for integer n with
// ||Z^T n|| small. In floating point this can only certify the absence of
// witnesses inside the searched box; the report states the box and tolerance.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qcfield/wavefield.hpp"

namespace qcfield::qp {

enum class Verdict { Periodic, Quasiperiodic, Indeterminate };
enum class Strategy { Auto, Enumerate, PivotSearch };

std::string to_string(Verdict v);
std::string to_string(Strategy s);

using IntVec = std::vector<long long>;

struct PeriodicityReport {
  Verdict verdict = Verdict::Indeterminate;
  int lattice_dim = 0;
  std::vector<IntVec> witnesses;  // independent, shortest first
  long long search_bound = 0;
  double tolerance = 0.0;
  Strategy strategy = Strategy::Auto;
  std::uint64_t candidates = 0;  // integer vectors examined
  bool exhaustive = false;       // the whole box was searched
};

struct ClassifyOptions {
  Strategy strategy = Strategy::Auto;
  /// Enumeration stops (verdict Indeterminate unless already Periodic) past this.
  std::uint64_t max_candidates = 400'000'000ULL;
};

inline constexpr long long kDefaultBound = 1000;
inline constexpr double kDefaultTol = 1e-9;

/// Witnesses are integer n with ||n||_inf <= bound and
/// ||Z^T n|| < tol * max(1, ||n||).
PeriodicityReport classify(const Subspace& sub, long long bound = kDefaultBound,
                           double tol = kDefaultTol, const ClassifyOptions& opt = {});
inline PeriodicityReport classify(const WaveConfig& cfg, long long bound = kDefaultBound,
                                  double tol = kDefaultTol, const ClassifyOptions& opt = {}) {
  return classify(cfg.subspace(), bound, tol, opt);
}

/// Least-squares x with K^T x = 2 pi n, and the residual norm.
std::pair<RVec, double> lattice_translation(const Subspace& sub, const IntVec& n);

/// cos theta(m, r) = (6m^2 + 6mr + r^2) / (6m^2 + 6mr + 2r^2), as a reduced fraction.
std::pair<long long, long long> moire_cosine(long long m, long long r);
/// Commensurate twist angle; requires m, r non-zero and coprime, theta in (0, pi/3).
double moire_angle(long long m, long long r);
/// Hexagonal pair k1 = [sqrt3/2, 1/2], k2 = [-sqrt3/2, 1/2] and its rotation by theta.
WaveConfig moire_wavevectors(double theta);

}  // namespace qcfield::qp
