#pragma once

// Analytic derivatives of the ARP, eigenvector control synthesis, level-set
// families, Lagrange multipliers and phase sensitivities.
//
// Finite-difference oracles are part of the public surface so that callers
// can check derivatives for their own potential matrices.

#include <functional>
#include <random>
#include <vector>

#include "qcfield/wavefield.hpp"

namespace qcfield::calculus {

// --- analytic derivatives ---------------------------------------------------

/// grad psi at x in the configuration's own coordinates:
/// 2 [K, -K] Im(diag(conj u) Q(x) u).
RVec arp_gradient(const RVec& x, const Controls& u, const WaveConfig& cfg,
                  const PotentialSpec& spec = {});
/// Hessian 2 [K,-K] (diag(conj u) Q diag(u) - Re[diag(conj u) diag(Q u)]) [K^T; -K^T],
/// real part, symmetric.
RMat arp_hessian(const RVec& x, const Controls& u, const WaveConfig& cfg,
                 const PotentialSpec& spec = {});

/// Gradient of psi_N with respect to y in R^N.
RVec arp_gradient_nd(const RVec& y, const Controls& u, const WaveConfig& cfg,
                     const PotentialSpec& spec = {});
RMat arp_hessian_nd(const RVec& y, const Controls& u, const WaveConfig& cfg,
                    const PotentialSpec& spec = {});

/// Chain rule: K grad_y psi_N(K^T x + gamma).
RVec arp_gradient_restricted(const RVec& x, const Controls& u, const WaveConfig& cfg,
                             const PotentialSpec& spec = {});
/// K hess_y psi_N(K^T x + gamma) K^T.
RMat arp_hessian_restricted(const RVec& x, const Controls& u, const WaveConfig& cfg,
                            const PotentialSpec& spec = {});

// --- finite-difference oracles ----------------------------------------------

using ScalarField = std::function<double(const RVec&)>;

/// Central differences, step h.
RVec fd_gradient(const ScalarField& f, const RVec& x, double h = 1e-5);
/// Second-order central differences, step h.
RMat fd_hessian(const ScalarField& f, const RVec& x, double h = 1e-4);

/// FD gradient/Hessian of psi_d (uses arp_value).
RVec fd_arp_gradient(const RVec& x, const Controls& u, const WaveConfig& cfg,
                     const PotentialSpec& spec = {}, double h = 1e-5);
RMat fd_arp_hessian(const RVec& x, const Controls& u, const WaveConfig& cfg,
                    const PotentialSpec& spec = {}, double h = 1e-4);

/// ||a - b|| / max(||b||, floor).
double relative_error(const Eigen::Ref<const RMat>& a, const Eigen::Ref<const RMat>& b,
                      double floor = 1e-300);

// --- eigen decomposition ----------------------------------------------------

struct EigenDecomp {
  RVec eigenvalues;   // ascending
  CMat eigenvectors;  // unit-norm columns
  double max_residual = 0.0;  // max_i ||Q v_i - l_i v_i|| / ||Q||
};

EigenDecomp eigen_decomp(const CMat& Q);

/// Min-eigenvector controls pinning a minimum of psi_d at x0.
struct MinControls {
  Controls u;            // unit norm, phase-normalized
  double eigenvalue;     // lambda_min(Q(x0)) = lambda_min(Q(0))
  int multiplicity;      // dimension of the lambda_min eigenspace
  CMat eigenspace;       // orthonormal basis, 2N x multiplicity
};

/// Eigenvalues within gap_tol * spectral radius of lambda_min count as ties.
MinControls synthesize_min_controls(const RVec& x0, const WaveConfig& cfg,
                                    const PotentialSpec& spec = {}, double gap_tol = 1e-9);

/// Rotate v so its first entry above 1e-12 * ||v|| in modulus is real positive.
CVec phase_normalize(const CVec& v);

// --- constrained formulation ------------------------------------------------

struct NullBasis {
  RMat Z;  // N x (N - d), orthonormal columns spanning null(K)
};

/// Orthonormal basis of null(K) from an SVD. Throws on rank deficiency.
NullBasis null_basis(const RMat& K);
inline NullBasis null_basis(const WaveConfig& cfg) { return null_basis(cfg.K()); }

/// Lattice vectors dual to the wavevectors: K^T A = 2 pi I (square K only).
RMat dual_basis(const WaveConfig& cfg);

/// lambda(y) = Z^T grad_y psi_N(y) at y = K^T x + gamma.
RVec lagrange_multipliers(const RVec& x, const Controls& u, const WaveConfig& cfg,
                          const PotentialSpec& spec = {});
RVec lagrange_multipliers(const RVec& x, const Controls& u, const WaveConfig& cfg,
                          const NullBasis& Z, const PotentialSpec& spec = {});

/// First-order coefficient of psi_d(x; exp[i eps D(h)] u) in eps:
/// grad_y psi_N(K^T x + gamma)^T h.
double phase_sensitivity(const RVec& x, const Controls& u, const RVec& h,
                         const WaveConfig& cfg, const PotentialSpec& spec = {});

// --- level-set families (N = d) ---------------------------------------------

/// Affine subspaces S_n = span{a_j : j in Z} + sum_{i in E} n_i a_i / 2 contained
/// in the level set psi = lambda when u = [v; +-v] is a real lambda-eigenvector
/// of Q(0).
class LevelSetFamily {
 public:
  static constexpr std::size_t kMaxSupport = 20;

  double eigenvalue() const { return lambda_; }
  const RVec& v() const { return v_; }
  int sign() const { return sign_; }
  const std::vector<int>& zero_set() const { return zero_; }
  const std::vector<int>& support() const { return support_; }
  /// Columns a_j, j in Z (spans S_0).
  RMat base_space() const;
  const RMat& dual() const { return dual_; }
  /// Admissible n in {0,1}^|E|.
  const std::vector<std::vector<int>>& admissible() const { return admissible_; }

  /// Offset sum n_i a_i / 2 for admissible sign vector `which`.
  RVec offset(std::size_t which) const;
  /// Random point of S_n: offset + S_0 coordinates in [-span, span] plus
  /// random even shifts of n (also admissible).
  RVec sample(std::size_t which, std::mt19937_64& rng, double span = 3.0) const;

  friend LevelSetFamily level_set_family(const Controls&, const WaveConfig&,
                                         const PotentialSpec&);

 private:
  double lambda_ = 0.0;
  RVec v_;
  int sign_ = 1;
  std::vector<int> zero_;
  std::vector<int> support_;
  RMat dual_;
  std::vector<std::vector<int>> admissible_;
};

/// Throws if u is not a real [v; +-v] unit eigenvector of Q(0) or K is not
/// square, or |E| exceeds kMaxSupport.
LevelSetFamily level_set_family(const Controls& u, const WaveConfig& cfg,
                                const PotentialSpec& spec = {});

}  // namespace qcfield::calculus
