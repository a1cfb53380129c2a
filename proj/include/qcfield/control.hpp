#pragma once

// Pattern transformations acting on the controls, and constant-power paths
// between control vectors.

#include <optional>
#include <vector>

#include "qcfield/wavefield.hpp"

namespace qcfield::control {

/// A d x d orthogonal R realized by permuting the controls:
/// (P u)_i = u_{perm[i]}, so that psi(R x; u) = psi(x; P u).
struct SymmetryAction {
  RMat R;
  std::vector<int> perm;     // length 2N, zero-based
  std::vector<int> columns;  // R^T k_j = signs[j] * k_{columns[j]}
  std::vector<int> signs;

  Controls apply(const Controls& u) const;
  /// perm with one-based indices.
  std::vector<int> one_based() const;
};

/// exp[i D(K^T eps)] u: psi(x + eps; u) = psi(x; result).
Controls translate_controls(const Controls& u, const RVec& eps, const WaveConfig& cfg);

/// Rotation by (j-1) pi / N of the standard fan.
SymmetryAction rotation_action(const WaveConfig& cfg, int j);
/// Reflection across the line through the origin at angle (j-1) pi / (2N).
SymmetryAction reflection_action(const WaveConfig& cfg, int j);
/// Nothing when some R^T k_j is not +-k_m within 1e-8, or the match is not a bijection.
std::optional<SymmetryAction> match_unitary(const RMat& R, const WaveConfig& cfg);

/// C^{2N} -> R^{4N}, [Re u; Im u].
RVec realify(const CVec& u);
CVec complexify(const RVec& v);

class TransitionPath {
 public:
  enum class Kind { Direct, Geodesic };

  Kind kind() const { return kind_; }
  double arc_length() const { return length_; }
  const Controls& start() const { return u0_; }
  const Controls& end() const { return u1_; }

  /// Controls at arc length s, clamped to [0, arc_length()]. The endpoints
  /// are returned exactly.
  Controls at_arc(double s) const;
  /// n >= 2 samples at equal arc-length spacing, including both endpoints.
  std::vector<Controls> frames(int n) const;

  friend TransitionPath direct_path(const Controls&, const RVec&, const WaveConfig&);
  friend TransitionPath geodesic_path(const Controls&, const Controls&);
  friend TransitionPath geodesic_path(const Controls&, const std::vector<Controls>&,
                                      const Controls&);

 private:
  struct Arc {
    RVec a, v;  // unit, orthogonal
    double length;
  };
  Kind kind_ = Kind::Direct;
  Controls u0_, u1_;
  double length_ = 0.0;
  RVec h_;                 // direct: phase velocity per unit t
  std::vector<Arc> arcs_;  // geodesic pieces
};

/// u(t) = exp[i t D(K^T eps)] u0, t in [0, 1]; arc length ||D(K^T eps) u0||.
TransitionPath direct_path(const Controls& u0, const RVec& eps, const WaveConfig& cfg);
/// Great circle through the real 4N-dimensional isomorph. Throws for
/// antipodal endpoints; use the waypoint overload there.
TransitionPath geodesic_path(const Controls& u0, const Controls& u1);
/// Piecewise great circle u0 -> w_1 -> ... -> u1.
TransitionPath geodesic_path(const Controls& u0, const std::vector<Controls>& waypoints,
                             const Controls& u1);

inline constexpr int kDefaultQuadrature = 129;
inline constexpr int kDefaultPathSamples = 257;

/// Midpoint-rule average of psi over the region, `resolution` points per axis.
double total_arp(const Box& region, const Controls& u, const WaveConfig& cfg,
                 const PotentialSpec& spec = {}, int resolution = kDefaultQuadrature);

/// Composite midpoint rule in arc length of total_arp along the path.
double transition_cost(const TransitionPath& path, const Box& region, const WaveConfig& cfg,
                       const PotentialSpec& spec = {}, int n_samples = kDefaultPathSamples,
                       int resolution = kDefaultQuadrature);

}  // namespace qcfield::control
