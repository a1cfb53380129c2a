#include "qcfield/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qcfield::calculus {

namespace {

// [K, -K], d x 2N.
RMat signed_block(const RMat& K) {
  RMat G(K.rows(), 2 * K.cols());
  G << K, -K;
  return G;
}

}  // namespace

RVec arp_gradient(const RVec& x, const Controls& u, const WaveConfig& cfg,
                  const PotentialSpec& spec) {
  require(u.u.size() == 2 * cfg.N(), "arp_gradient: controls must have length 2N");
  CMat Q = q_matrix(x, cfg, spec);
  CVec w = u.u.conjugate().cwiseProduct(Q * u.u);
  return 2.0 * signed_block(cfg.K()) * w.imag();
}

RMat arp_hessian(const RVec& x, const Controls& u, const WaveConfig& cfg,
                 const PotentialSpec& spec) {
  require(u.u.size() == 2 * cfg.N(), "arp_hessian: controls must have length 2N");
  CMat Q = q_matrix(x, cfg, spec);
  const CVec& v = u.u;
  CMat B = v.conjugate().asDiagonal() * Q * v.asDiagonal();
  RVec c = v.conjugate().cwiseProduct(Q * v).real();
  B.diagonal() -= c.cast<cplx>();
  RMat G = signed_block(cfg.K());
  RMat H = 2.0 * (G.cast<cplx>() * B * G.transpose().cast<cplx>()).real();
  return 0.5 * (H + H.transpose());
}

RVec arp_gradient_nd(const RVec& y, const Controls& u, const WaveConfig& cfg,
                     const PotentialSpec& spec) {
  AmbientLift lift = ambient(cfg, spec);
  return arp_gradient(y, u, lift.cfg, lift.spec);
}

RMat arp_hessian_nd(const RVec& y, const Controls& u, const WaveConfig& cfg,
                    const PotentialSpec& spec) {
  AmbientLift lift = ambient(cfg, spec);
  return arp_hessian(y, u, lift.cfg, lift.spec);
}

RVec arp_gradient_restricted(const RVec& x, const Controls& u, const WaveConfig& cfg,
                             const PotentialSpec& spec) {
  return cfg.K() * arp_gradient_nd(cfg.subspace().lift(x), u, cfg, spec);
}

RMat arp_hessian_restricted(const RVec& x, const Controls& u, const WaveConfig& cfg,
                            const PotentialSpec& spec) {
  RMat H = cfg.K() * arp_hessian_nd(cfg.subspace().lift(x), u, cfg, spec) * cfg.K().transpose();
  return 0.5 * (H + H.transpose());
}

// ---------------------------------------------------------------------------

RVec fd_gradient(const ScalarField& f, const RVec& x, double h) {
  RVec g(x.size());
  RVec xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
    xp[i] = xm[i] = x[i];
  }
  return g;
}

RMat fd_hessian(const ScalarField& f, const RVec& x, double h) {
  const auto n = x.size();
  RMat H(n, n);
  const double f0 = f(x);
  RVec t = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    t[i] = x[i] + h;
    double fp = f(t);
    t[i] = x[i] - h;
    double fm = f(t);
    t[i] = x[i];
    H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      auto eval = [&](double si, double sj) {
        t[i] = x[i] + si * h;
        t[j] = x[j] + sj * h;
        double v = f(t);
        t[i] = x[i];
        t[j] = x[j];
        return v;
      };
      double v = (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) / (4.0 * h * h);
      H(i, j) = H(j, i) = v;
    }
  }
  return H;
}

RVec fd_arp_gradient(const RVec& x, const Controls& u, const WaveConfig& cfg,
                     const PotentialSpec& spec, double h) {
  return fd_gradient([&](const RVec& z) { return arp_value(z, u, cfg, spec); }, x, h);
}

RMat fd_arp_hessian(const RVec& x, const Controls& u, const WaveConfig& cfg,
                    const PotentialSpec& spec, double h) {
  return fd_hessian([&](const RVec& z) { return arp_value(z, u, cfg, spec); }, x, h);
}

double relative_error(const Eigen::Ref<const RMat>& a, const Eigen::Ref<const RMat>& b,
                      double floor) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

// ---------------------------------------------------------------------------

EigenDecomp eigen_decomp(const CMat& Q) {
  require(Q.rows() == Q.cols(), "eigen_decomp: matrix must be square");
  Eigen::SelfAdjointEigenSolver<CMat> es(Q);
  require(es.info() == Eigen::Success, "eigen_decomp: eigensolver did not converge");
  EigenDecomp out{es.eigenvalues(), es.eigenvectors(), 0.0};
  double qn = std::max(Q.norm(), 1e-300);
  for (Eigen::Index i = 0; i < Q.cols(); ++i) {
    double r = (Q * out.eigenvectors.col(i) - out.eigenvalues[i] * out.eigenvectors.col(i)).norm();
    out.max_residual = std::max(out.max_residual, r / qn);
  }
  return out;
}

CVec phase_normalize(const CVec& v) {
  double n = v.norm();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12 * n) {
      cplx ph = std::abs(v[i]) / v[i];
      return v * ph;
    }
  }
  return v;
}

MinControls synthesize_min_controls(const RVec& x0, const WaveConfig& cfg,
                                    const PotentialSpec& spec, double gap_tol) {
  EigenDecomp ed = eigen_decomp(q_matrix(x0, cfg, spec));
  const RVec& ev = ed.eigenvalues;
  double radius = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
  double tol = gap_tol * std::max(radius, 1e-300);
  int mult = 1;
  while (mult < ev.size() && ev[mult] - ev[0] < tol) ++mult;
  CMat space = ed.eigenvectors.leftCols(mult);
  CVec u = phase_normalize(space.col(0));
  u /= u.norm();
  return MinControls{Controls(u), ev[0], mult, space};
}

// ---------------------------------------------------------------------------

NullBasis null_basis(const RMat& K) {
  const auto d = K.rows(), N = K.cols();
  require(N >= d, "null_basis: N must be at least d");
  Eigen::JacobiSVD<RMat> svd(K, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  require(s[d - 1] > 1e-10 * s[0], "null_basis: K is rank deficient");
  return NullBasis{svd.matrixV().rightCols(N - d)};
}

RMat dual_basis(const WaveConfig& cfg) {
  require(cfg.d() == cfg.N(), "dual_basis: requires N = d");
  // K^T A = 2 pi I
  return kTwoPi * cfg.K().transpose().fullPivLu().inverse();
}

RVec lagrange_multipliers(const RVec& x, const Controls& u, const WaveConfig& cfg,
                          const NullBasis& Z, const PotentialSpec& spec) {
  RVec g = arp_gradient_nd(cfg.subspace().lift(x), u, cfg, spec);
  return Z.Z.transpose() * g;
}

RVec lagrange_multipliers(const RVec& x, const Controls& u, const WaveConfig& cfg,
                          const PotentialSpec& spec) {
  return lagrange_multipliers(x, u, cfg, null_basis(cfg), spec);
}

double phase_sensitivity(const RVec& x, const Controls& u, const RVec& h,
                         const WaveConfig& cfg, const PotentialSpec& spec) {
  require(h.size() == cfg.N(), "phase_sensitivity: h must have length N");
  return arp_gradient_nd(cfg.subspace().lift(x), u, cfg, spec).dot(h);
}

// ---------------------------------------------------------------------------

RMat LevelSetFamily::base_space() const {
  RMat B(dual_.rows(), static_cast<Eigen::Index>(zero_.size()));
  for (std::size_t c = 0; c < zero_.size(); ++c) B.col(c) = dual_.col(zero_[c]);
  return B;
}

RVec LevelSetFamily::offset(std::size_t which) const {
  const auto& n = admissible_.at(which);
  RVec z = RVec::Zero(dual_.rows());
  for (std::size_t i = 0; i < support_.size(); ++i) z += 0.5 * n[i] * dual_.col(support_[i]);
  return z;
}

RVec LevelSetFamily::sample(std::size_t which, std::mt19937_64& rng, double span) const {
  const auto& n = admissible_.at(which);
  std::uniform_real_distribution<double> coord(-span, span);
  std::uniform_int_distribution<int> shift(-2, 2);
  RVec z = RVec::Zero(dual_.rows());
  for (int j : zero_) z += coord(rng) * dual_.col(j);
  for (std::size_t i = 0; i < support_.size(); ++i)
    z += 0.5 * (n[i] + 2 * shift(rng)) * dual_.col(support_[i]);
  return z;
}

LevelSetFamily level_set_family(const Controls& u, const WaveConfig& cfg,
                                const PotentialSpec& spec) {
  const int N = cfg.N();
  require(cfg.d() == N, "level_set_family: requires square K (N = d)");
  require(u.u.size() == 2 * N, "level_set_family: controls must have length 2N");
  require(u.u.imag().cwiseAbs().maxCoeff() < 1e-10, "level_set_family: controls must be real");
  require(std::abs(u.norm() - 1.0) < 1e-10, "level_set_family: controls must have unit norm");

  RVec head = u.u.head(N).real(), tail = u.u.tail(N).real();
  int sign = 0;
  if ((tail - head).cwiseAbs().maxCoeff() < 1e-10)
    sign = 1;
  else if ((tail + head).cwiseAbs().maxCoeff() < 1e-10)
    sign = -1;
  require(sign != 0, "level_set_family: controls are not of the form [v; +-v]");

  CMat Q0 = q_matrix(RVec::Zero(N), cfg, spec);
  double lambda = (u.u.adjoint() * Q0 * u.u)(0, 0).real();
  require((Q0 * u.u - lambda * u.u).norm() < 1e-9,
          "level_set_family: controls are not an eigenvector of Q(0)");

  LevelSetFamily fam;
  fam.lambda_ = lambda;
  fam.v_ = head;
  fam.sign_ = sign;
  fam.dual_ = dual_basis(cfg);
  for (int j = 0; j < N; ++j) (std::abs(head[j]) < 1e-10 ? fam.zero_ : fam.support_).push_back(j);
  require(fam.support_.size() <= LevelSetFamily::kMaxSupport,
          "level_set_family: support too large for exhaustive sign search");

  const std::size_t ne = fam.support_.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << ne); ++mask) {
    RVec w = head;
    std::vector<int> n(ne);
    for (std::size_t i = 0; i < ne; ++i) {
      n[i] = static_cast<int>((mask >> i) & 1u);
      if (n[i]) w[fam.support_[i]] = -w[fam.support_[i]];
    }
    CVec wt(2 * N);
    wt.head(N) = w.cast<cplx>();
    wt.tail(N) = (sign * w).cast<cplx>();
    if ((Q0 * wt - lambda * wt).norm() < 1e-8) fam.admissible_.push_back(std::move(n));
  }
  return fam;
}

}  // namespace qcfield::calculus
