#pragma once

// Plane-wave superpositions and their acoustic radiation potential (ARP).
//
// A configuration of N transducer pairs in R^d is described by the d x N
// wavevector matrix K. The restricted field p_d(x) is the N-dimensional
// periodic field p_N evaluated on the affine subspace y = K^T x + gamma.

#include <variant>
#include <vector>

#include "qcfield/types.hpp"

namespace qcfield {

/// Affine cut y = K^T x + gamma of the periodic N-space. Only requires
/// full row rank; the equal-norm wavevector condition lives in WaveConfig.
class Subspace {
 public:
  Subspace(RMat K, RVec gamma);
  explicit Subspace(RMat K);

  const RMat& K() const { return K_; }
  const RVec& gamma() const { return gamma_; }
  int d() const { return static_cast<int>(K_.rows()); }
  int N() const { return static_cast<int>(K_.cols()); }

  /// y = K^T x + gamma.
  RVec lift(const RVec& x) const;

 private:
  RMat K_;
  RVec gamma_;
};

/// Wavevector geometry: columns of K are the wavevectors k_j, all of the
/// same length k.
class WaveConfig {
 public:
  WaveConfig(RMat K, RVec gamma);
  explicit WaveConfig(RMat K);

  /// k_j = k [cos((j-1) pi/N), sin((j-1) pi/N)].
  static WaveConfig fan(int N, double k = 1.0);
  /// The six icosahedral directions in R^3, unit length times k.
  static WaveConfig icosahedral(double k = 1.0);
  /// Fan of five planar wavevectors lifted to R^3 plus k_6 = e_3.
  static WaveConfig fan_with_axis(int N_planar, double k = 1.0);

  WaveConfig with_gamma(RVec gamma) const { return WaveConfig(K(), std::move(gamma)); }

  const RMat& K() const { return sub_.K(); }
  const RVec& gamma() const { return sub_.gamma(); }
  int d() const { return sub_.d(); }
  int N() const { return sub_.N(); }
  double k() const { return k_; }
  double wavelength() const { return kTwoPi / k_; }
  const Subspace& subspace() const { return sub_; }

 private:
  Subspace sub_;
  double k_ = 1.0;
};

/// Complex transducer parameters u = [alpha_1..alpha_N, beta_1..beta_N].
struct Controls {
  CVec u;

  Controls() = default;
  explicit Controls(CVec v) : u(std::move(v)) {
    require(u.size() % 2 == 0, "Controls: length must be even (2N)");
  }

  /// alpha_j = a, beta_j = b for all j.
  static Controls uniform(int N, cplx a, cplx b);
  /// Same direction with unit Euclidean norm.
  static Controls normalized(const CVec& v);

  int N() const { return static_cast<int>(u.size() / 2); }
  cplx alpha(int j) const { return u[j]; }
  cplx beta(int j) const { return u[N() + j]; }
  double norm() const { return u.norm(); }
};

/// Quadratic potential psi = [p; grad p]^* A [p; grad p].
class PotentialSpec {
 public:
  struct Diagonal {
    double a = 1.0;
    double b = 1.0;
  };
  struct General {
    CMat A;
  };

  PotentialSpec() : rep_(Diagonal{}) {}
  static PotentialSpec diagonal(double a, double b) { return PotentialSpec(Diagonal{a, b}); }
  /// Throws if A is not square or not Hermitian within 1e-12.
  static PotentialSpec general(CMat A);

  bool is_diagonal() const { return std::holds_alternative<Diagonal>(rep_); }
  const Diagonal& as_diagonal() const { return std::get<Diagonal>(rep_); }
  /// The (d+1) x (d+1) Hermitian matrix; Diagonal converts to diag(a, -b I_d).
  CMat matrix(int d) const;
  /// Dimension d implied by a General matrix, or -1 for Diagonal.
  int fixed_dim() const;

 private:
  explicit PotentialSpec(Diagonal dg) : rep_(dg) {}
  explicit PotentialSpec(General g) : rep_(std::move(g)) {}
  std::variant<Diagonal, General> rep_;
};

/// exp[i D(gamma)] u with D(gamma) = diag(gamma, -gamma).
CVec phase_shift(const CVec& u, const RVec& gamma);
inline Controls phase_shift(const Controls& u, const RVec& gamma) {
  return Controls(phase_shift(u.u, gamma));
}
/// D(h) u (no exponential), used for path velocities.
CVec apply_D(const CVec& u, const RVec& h);

/// p_N(y; u) = sum_j alpha_j e^{i y_j} + beta_j e^{-i y_j}.
cplx pressure_nd(const RVec& y, const Controls& u);
/// Gradient of p_N with respect to y.
CVec pressure_gradient_nd(const RVec& y, const Controls& u);

/// p_d(x; u) = p_N(K^T x + gamma; u).
cplx pressure_restricted(const RVec& x, const Controls& u, const WaveConfig& cfg);
/// grad_x p_d = K grad_y p_N.
CVec pressure_gradient_restricted(const RVec& x, const Controls& u, const WaveConfig& cfg);

/// M(x): the (d+1) x 2N matrix with M(x) u = [p_d(x); grad p_d(x)].
CMat m_matrix(const RVec& x, const WaveConfig& cfg);
/// Q(x) = M(x)^* A M(x).
CMat q_matrix(const RVec& x, const WaveConfig& cfg, const PotentialSpec& spec);

/// psi_d(x; u) from p and grad p directly (fast path).
double arp_value(const RVec& x, const Controls& u, const WaveConfig& cfg,
                 const PotentialSpec& spec = {});
/// psi_d(x; u) = u^* Q(x) u (quadratic-form path).
double arp_value_quadratic(const RVec& x, const Controls& u, const WaveConfig& cfg,
                           const PotentialSpec& spec = {});

/// psi_N(y; u) with A_N = T^T A T, T = diag(1, K); psi_d(x) = psi_N(K^T x + gamma).
double arp_nd(const RVec& y, const Controls& u, const WaveConfig& cfg,
              const PotentialSpec& spec = {});

/// The N-dimensional periodic setting as its own configuration: wavevectors
/// e_1..e_N (K = I_N) and potential matrix A_N. arp_value on the result
/// equals arp_nd on the original.
struct AmbientLift {
  WaveConfig cfg;
  PotentialSpec spec;
};
AmbientLift ambient(const WaveConfig& cfg, const PotentialSpec& spec);

/// Both sides of the 2.5-D decomposition of a six-wave 3D ARP built from a
/// planar fan plus e_3 with alpha_j = -beta_j = 1.
struct SliceDecomposition {
  double lhs;  // psi_3(x)
  double rhs;  // psi_2(x~) + 4a sin^2 x3 - 4b cos^2 x3 + 4a sin x3 Im p_2(x~)
};
SliceDecomposition arp_25d_identity(const RVec& x, const WaveConfig& cfg3,
                                    const WaveConfig& cfg2,
                                    const PotentialSpec& spec = {});

/// Extreme eigenvalues of Q(0); psi lies between them everywhere.
struct SpectralBounds {
  double lo;
  double hi;
};
SpectralBounds arp_bounds(const WaveConfig& cfg, const PotentialSpec& spec = {});

}  // namespace qcfield
