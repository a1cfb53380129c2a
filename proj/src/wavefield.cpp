#include "qcfield/wavefield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qcfield {

namespace {

constexpr double kNormTol = 1e-12;
constexpr double kRankTol = 1e-10;

void check_rank(const RMat& K) {
  require(K.rows() >= 1 && K.cols() >= 1, "K must be non-empty");
  require(K.cols() >= K.rows(), "N must be at least d");
  Eigen::JacobiSVD<RMat> svd(K);
  const auto& s = svd.singularValues();
  require(s[s.size() - 1] > kRankTol * s[0], "K must have rank d");
}

void check_x(const RVec& x, int d) {
  if (x.size() != d) {
    std::ostringstream os;
    os << "position has dimension " << x.size() << ", expected " << d;
    throw std::invalid_argument(os.str());
  }
}

void check_u(const Controls& u, int N) {
  if (u.u.size() != 2 * N) {
    std::ostringstream os;
    os << "controls have length " << u.u.size() << ", expected 2N = " << 2 * N;
    throw std::invalid_argument(os.str());
  }
}

// Potential matrix checked against the configuration dimension.
CMat potential_matrix(const PotentialSpec& spec, int d) {
  int fd = spec.fixed_dim();
  if (fd >= 0 && fd != d) {
    std::ostringstream os;
    os << "potential matrix is for d = " << fd << ", configuration has d = " << d;
    throw std::invalid_argument(os.str());
  }
  return spec.matrix(d);
}

double quad_form(const CMat& A, const CVec& v) { return (v.adjoint() * A * v)(0, 0).real(); }

}  // namespace

// ---------------------------------------------------------------------------

Subspace::Subspace(RMat K, RVec gamma) : K_(std::move(K)), gamma_(std::move(gamma)) {
  check_rank(K_);
  require(gamma_.size() == K_.cols(), "gamma must have length N");
}

Subspace::Subspace(RMat K) : Subspace(K, RVec::Zero(K.cols())) {}

RVec Subspace::lift(const RVec& x) const {
  check_x(x, d());
  return K_.transpose() * x + gamma_;
}

WaveConfig::WaveConfig(RMat K, RVec gamma) : sub_(std::move(K), std::move(gamma)) {
  const RMat& M = sub_.K();
  k_ = M.col(0).norm();
  require(k_ > 0.0, "wavevectors must be non-zero");
  for (int j = 1; j < M.cols(); ++j) {
    double kj = M.col(j).norm();
    if (std::abs(kj - k_) > kNormTol * k_) {
      std::ostringstream os;
      os << "wavevector column " << j + 1 << " has norm " << kj << ", expected " << k_;
      throw std::invalid_argument(os.str());
    }
  }
}

WaveConfig::WaveConfig(RMat K) : WaveConfig(K, RVec::Zero(K.cols())) {}

WaveConfig WaveConfig::fan(int N, double k) {
  require(N >= 2, "fan: N must be at least 2");
  RMat K(2, N);
  for (int j = 0; j < N; ++j) {
    double t = j * kPi / N;
    K(0, j) = k * std::cos(t);
    K(1, j) = k * std::sin(t);
  }
  return WaveConfig(K);
}

WaveConfig WaveConfig::icosahedral(double k) {
  const double p = kGolden;
  RMat K(3, 6);
  K << 0, 1, p, 0, -1, p,
       1, p, 0, 1, p, 0,
       p, 0, 1, -p, 0, -1;
  K *= k / std::sqrt(1.0 + p * p);
  return WaveConfig(K);
}

WaveConfig WaveConfig::fan_with_axis(int N_planar, double k) {
  WaveConfig planar = fan(N_planar, k);
  RMat K = RMat::Zero(3, N_planar + 1);
  K.topLeftCorner(2, N_planar) = planar.K();
  K(2, N_planar) = k;
  return WaveConfig(K);
}

// ---------------------------------------------------------------------------

Controls Controls::uniform(int N, cplx a, cplx b) {
  CVec v(2 * N);
  v.head(N).setConstant(a);
  v.tail(N).setConstant(b);
  return Controls(v);
}

Controls Controls::normalized(const CVec& v) {
  double n = v.norm();
  require(n > 0.0, "cannot normalize zero controls");
  return Controls(v / n);
}

PotentialSpec PotentialSpec::general(CMat A) {
  require(A.rows() == A.cols() && A.rows() >= 2, "potential matrix must be square, size d+1 >= 2");
  double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      if (std::abs(A(i, j) - std::conj(A(j, i))) > 1e-12 * scale)
        throw std::invalid_argument("potential matrix is not Hermitian");
  return PotentialSpec(General{std::move(A)});
}

CMat PotentialSpec::matrix(int d) const {
  if (const auto* g = std::get_if<General>(&rep_)) return g->A;
  const auto& dg = std::get<Diagonal>(rep_);
  CMat A = CMat::Zero(d + 1, d + 1);
  A(0, 0) = dg.a;
  for (int i = 1; i <= d; ++i) A(i, i) = -dg.b;
  return A;
}

int PotentialSpec::fixed_dim() const {
  if (const auto* g = std::get_if<General>(&rep_)) return static_cast<int>(g->A.rows()) - 1;
  return -1;
}

// ---------------------------------------------------------------------------

CVec phase_shift(const CVec& u, const RVec& gamma) {
  const auto N = gamma.size();
  require(u.size() == 2 * N, "phase_shift: controls must have length 2N");
  CVec out(u.size());
  for (Eigen::Index j = 0; j < N; ++j) {
    cplx e = std::polar(1.0, gamma[j]);
    out[j] = u[j] * e;
    out[N + j] = u[N + j] * std::conj(e);
  }
  return out;
}

CVec apply_D(const CVec& u, const RVec& h) {
  const auto N = h.size();
  require(u.size() == 2 * N, "apply_D: controls must have length 2N");
  CVec out(u.size());
  for (Eigen::Index j = 0; j < N; ++j) {
    out[j] = u[j] * h[j];
    out[N + j] = -u[N + j] * h[j];
  }
  return out;
}

cplx pressure_nd(const RVec& y, const Controls& u) {
  const int N = static_cast<int>(y.size());
  check_u(u, N);
  cplx p = 0.0;
  for (int j = 0; j < N; ++j) {
    cplx e = std::polar(1.0, y[j]);
    p += u.u[j] * e + u.u[N + j] * std::conj(e);
  }
  return p;
}

CVec pressure_gradient_nd(const RVec& y, const Controls& u) {
  const int N = static_cast<int>(y.size());
  check_u(u, N);
  CVec g(N);
  const cplx I(0.0, 1.0);
  for (int j = 0; j < N; ++j) {
    cplx e = std::polar(1.0, y[j]);
    g[j] = I * (u.u[j] * e - u.u[N + j] * std::conj(e));
  }
  return g;
}

cplx pressure_restricted(const RVec& x, const Controls& u, const WaveConfig& cfg) {
  return pressure_nd(cfg.subspace().lift(x), u);
}

CVec pressure_gradient_restricted(const RVec& x, const Controls& u, const WaveConfig& cfg) {
  return cfg.K().cast<cplx>() * pressure_gradient_nd(cfg.subspace().lift(x), u);
}

CMat m_matrix(const RVec& x, const WaveConfig& cfg) {
  const int d = cfg.d(), N = cfg.N();
  RVec y = cfg.subspace().lift(x);
  CMat M(d + 1, 2 * N);
  const cplx I(0.0, 1.0);
  for (int j = 0; j < N; ++j) {
    cplx e = std::polar(1.0, y[j]);
    cplx ec = std::conj(e);
    M(0, j) = e;
    M(0, N + j) = ec;
    for (int r = 0; r < d; ++r) {
      M(r + 1, j) = I * cfg.K()(r, j) * e;
      M(r + 1, N + j) = -I * cfg.K()(r, j) * ec;
    }
  }
  return M;
}

CMat q_matrix(const RVec& x, const WaveConfig& cfg, const PotentialSpec& spec) {
  CMat A = potential_matrix(spec, cfg.d());
  CMat M = m_matrix(x, cfg);
  CMat Q = M.adjoint() * A * M;
  // Exact Hermitian symmetry; the product is Hermitian up to rounding.
  return (0.5 * (Q + Q.adjoint())).eval();
}

double arp_value(const RVec& x, const Controls& u, const WaveConfig& cfg,
                 const PotentialSpec& spec) {
  check_x(x, cfg.d());
  check_u(u, cfg.N());
  const int d = cfg.d(), N = cfg.N();
  const RMat& K = cfg.K();
  const RVec& g = cfg.gamma();
  const cplx I(0.0, 1.0);

  cplx p = 0.0;
  // grad p_d = K * grad_y p_N, accumulated column by column
  CVec grad = CVec::Zero(d);
  for (int j = 0; j < N; ++j) {
    double t = g[j];
    for (int r = 0; r < d; ++r) t += K(r, j) * x[r];
    cplx e = std::polar(1.0, t);
    cplx a = u.u[j] * e;
    cplx b = u.u[N + j] * std::conj(e);
    p += a + b;
    cplx dj = I * (a - b);
    for (int r = 0; r < d; ++r) grad[r] += K(r, j) * dj;
  }

  if (spec.is_diagonal()) {
    const auto& dg = spec.as_diagonal();
    return dg.a * std::norm(p) - dg.b * grad.squaredNorm();
  }
  CVec v(d + 1);
  v[0] = p;
  v.tail(d) = grad;
  return quad_form(potential_matrix(spec, d), v);
}

double arp_value_quadratic(const RVec& x, const Controls& u, const WaveConfig& cfg,
                           const PotentialSpec& spec) {
  check_u(u, cfg.N());
  return quad_form(q_matrix(x, cfg, spec), u.u);
}

double arp_nd(const RVec& y, const Controls& u, const WaveConfig& cfg,
              const PotentialSpec& spec) {
  const int N = cfg.N(), d = cfg.d();
  require(y.size() == N, "arp_nd: position must have length N");
  cplx p = pressure_nd(y, u);
  CVec gN = pressure_gradient_nd(y, u);
  CVec gd = cfg.K().cast<cplx>() * gN;
  if (spec.is_diagonal()) {
    const auto& dg = spec.as_diagonal();
    return dg.a * std::norm(p) - dg.b * gd.squaredNorm();
  }
  CVec v(d + 1);
  v[0] = p;
  v.tail(d) = gd;
  return quad_form(potential_matrix(spec, d), v);
}

AmbientLift ambient(const WaveConfig& cfg, const PotentialSpec& spec) {
  const int d = cfg.d(), N = cfg.N();
  CMat A = potential_matrix(spec, d);
  CMat T = CMat::Zero(d + 1, N + 1);
  T(0, 0) = 1.0;
  T.bottomRightCorner(d, N) = cfg.K().cast<cplx>();
  CMat AN = T.adjoint() * A * T;
  AN = (0.5 * (AN + AN.adjoint())).eval();
  return AmbientLift{WaveConfig(RMat::Identity(N, N)), PotentialSpec::general(AN)};
}

SliceDecomposition arp_25d_identity(const RVec& x, const WaveConfig& cfg3,
                                    const WaveConfig& cfg2, const PotentialSpec& spec) {
  require(spec.is_diagonal(), "2.5-D identity requires the diagonal potential");
  require(x.size() == 3, "2.5-D identity: x must be a 3-vector");
  const int n2 = cfg2.N();
  bool ok = cfg3.d() == 3 && cfg2.d() == 2 && cfg3.N() == n2 + 1;
  if (ok) {
    RMat expect = RMat::Zero(3, n2 + 1);
    expect.topLeftCorner(2, n2) = cfg2.K();
    expect(2, n2) = cfg2.k();
    ok = (cfg3.K() - expect).cwiseAbs().maxCoeff() < 1e-12 && cfg3.gamma().isZero() &&
         cfg2.gamma().isZero();
  }
  require(ok, "2.5-D identity: cfg_3d must be cfg_2d lifted with zero third row plus k = e_3");

  const auto& dg = spec.as_diagonal();
  Controls u3 = Controls::uniform(n2 + 1, 1.0, -1.0);
  Controls u2 = Controls::uniform(n2, 1.0, -1.0);
  RVec xt = x.head(2);
  double s = std::sin(x[2]), c = std::cos(x[2]);
  double psi2 = arp_value(xt, u2, cfg2, spec);
  double im_p2 = pressure_restricted(xt, u2, cfg2).imag();
  double rhs = psi2 + 4.0 * dg.a * s * s - 4.0 * dg.b * c * c + 4.0 * dg.a * s * im_p2;
  return {arp_value(x, u3, cfg3, spec), rhs};
}

SpectralBounds arp_bounds(const WaveConfig& cfg, const PotentialSpec& spec) {
  Eigen::SelfAdjointEigenSolver<CMat> es(q_matrix(RVec::Zero(cfg.d()), cfg, spec),
                                         Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev[0], ev[ev.size() - 1]};
}

}  // namespace qcfield
