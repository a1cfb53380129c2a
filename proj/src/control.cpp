#include "qcfield/control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qcfield/parallel.hpp"

namespace qcfield::control {

namespace {

constexpr double kUnitTol = 1e-10;

void require_unit(const Controls& u, const char* who) {
  require(std::abs(u.norm() - 1.0) < kUnitTol, std::string(who) + ": controls must have unit norm");
}

void require_fan(const WaveConfig& cfg, const char* who) {
  require(cfg.d() == 2, std::string(who) + ": requires a planar (d = 2) fan");
  const int N = cfg.N();
  for (int j = 0; j < N; ++j) {
    const double t = j * kPi / N;
    Eigen::Vector2d expect(std::cos(t), std::sin(t));
    if ((cfg.K().col(j) - cfg.k() * expect).norm() > 1e-10 * cfg.k()) {
      std::ostringstream os;
      os << who << ": column " << j + 1 << " is not the standard fan wavevector";
      throw std::invalid_argument(os.str());
    }
  }
}

RMat rotation(double t) {
  RMat R(2, 2);
  R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return R;
}

}  // namespace

Controls SymmetryAction::apply(const Controls& u) const {
  require(u.u.size() == static_cast<Eigen::Index>(perm.size()),
          "SymmetryAction::apply: controls length mismatch");
  CVec out(u.u.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out[i] = u.u[perm[i]];
  return Controls(out);
}

std::vector<int> SymmetryAction::one_based() const {
  std::vector<int> p = perm;
  for (int& v : p) ++v;
  return p;
}

Controls translate_controls(const Controls& u, const RVec& eps, const WaveConfig& cfg) {
  require(eps.size() == cfg.d(), "translate_controls: eps must have length d");
  require(u.u.size() == 2 * cfg.N(), "translate_controls: controls must have length 2N");
  return phase_shift(u, cfg.K().transpose() * eps);
}

std::optional<SymmetryAction> match_unitary(const RMat& R, const WaveConfig& cfg) {
  const int d = cfg.d(), N = cfg.N();
  require(R.rows() == d && R.cols() == d, "match_unitary: R must be d x d");
  require((R.transpose() * R - RMat::Identity(d, d)).norm() < 1e-10,
          "match_unitary: R must be orthogonal");
  require(cfg.gamma().cwiseAbs().maxCoeff() == 0.0, "match_unitary: requires gamma = 0");

  SymmetryAction act;
  act.R = R;
  act.perm.assign(2 * N, -1);
  act.columns.assign(N, -1);
  act.signs.assign(N, 0);
  const double tol = 1e-8 * cfg.k();
  std::vector<char> used(N, 0);
  for (int j = 0; j < N; ++j) {
    const RVec w = R.transpose() * cfg.K().col(j);
    for (int m = 0; m < N && act.signs[j] == 0; ++m) {
      if (used[m]) continue;
      if ((w - cfg.K().col(m)).norm() < tol)
        act.signs[j] = 1;
      else if ((w + cfg.K().col(m)).norm() < tol)
        act.signs[j] = -1;
      else
        continue;
      used[m] = 1;
      act.columns[j] = m;
    }
    if (act.signs[j] == 0) return std::nullopt;
    const int m = act.columns[j];
    if (act.signs[j] > 0) {
      act.perm[m] = j;
      act.perm[N + m] = N + j;
    } else {
      act.perm[m] = N + j;
      act.perm[N + m] = j;
    }
  }
  return act;
}

SymmetryAction rotation_action(const WaveConfig& cfg, int j) {
  require_fan(cfg, "rotation_action");
  require(j >= 1 && j <= 2 * cfg.N(), "rotation_action: j must lie in 1..2N");
  auto act = match_unitary(rotation((j - 1) * kPi / cfg.N()), cfg);
  require(act.has_value(), "rotation_action: rotation does not map the fan to itself");
  return *act;
}

SymmetryAction reflection_action(const WaveConfig& cfg, int j) {
  require_fan(cfg, "reflection_action");
  require(j >= 1 && j <= 2 * cfg.N(), "reflection_action: j must lie in 1..2N");
  const double t = (j - 1) * kPi / cfg.N();  // twice the line angle
  RMat R(2, 2);
  R << std::cos(t), std::sin(t), std::sin(t), -std::cos(t);
  auto act = match_unitary(R, cfg);
  require(act.has_value(), "reflection_action: reflection does not map the fan to itself");
  return *act;
}

// ---------------------------------------------------------------------------

RVec realify(const CVec& u) {
  RVec v(2 * u.size());
  v << u.real(), u.imag();
  return v;
}

CVec complexify(const RVec& v) {
  require(v.size() % 2 == 0, "complexify: length must be even");
  const auto n = v.size() / 2;
  CVec u(n);
  for (Eigen::Index i = 0; i < n; ++i) u[i] = cplx(v[i], v[n + i]);
  return u;
}

Controls TransitionPath::at_arc(double s) const {
  if (s <= 0.0) return u0_;
  if (s >= length_) return u1_;
  if (kind_ == Kind::Direct) return phase_shift(u0_, (s / length_) * h_);
  for (const auto& arc : arcs_) {
    if (s <= arc.length) return Controls(complexify(arc.a * std::cos(s) + arc.v * std::sin(s)));
    s -= arc.length;
  }
  return u1_;
}

std::vector<Controls> TransitionPath::frames(int n) const {
  require(n >= 2, "TransitionPath::frames: need at least two frames");
  std::vector<Controls> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (i == 0)
      out.push_back(u0_);
    else if (i == n - 1)
      out.push_back(u1_);
    else
      out.push_back(at_arc(length_ * i / (n - 1)));
  }
  return out;
}

TransitionPath direct_path(const Controls& u0, const RVec& eps, const WaveConfig& cfg) {
  require_unit(u0, "direct_path");
  TransitionPath p;
  p.kind_ = TransitionPath::Kind::Direct;
  p.u0_ = u0;
  p.u1_ = translate_controls(u0, eps, cfg);
  p.h_ = cfg.K().transpose() * eps;
  p.length_ = apply_D(u0.u, p.h_).norm();
  return p;
}

TransitionPath geodesic_path(const Controls& u0, const std::vector<Controls>& waypoints,
                             const Controls& u1) {
  require_unit(u0, "geodesic_path");
  require_unit(u1, "geodesic_path");
  std::vector<RVec> pts{realify(u0.u)};
  for (const auto& w : waypoints) {
    require(w.u.size() == u0.u.size(), "geodesic_path: waypoint length mismatch");
    require_unit(w, "geodesic_path");
    pts.push_back(realify(w.u));
  }
  require(u1.u.size() == u0.u.size(), "geodesic_path: endpoint length mismatch");
  pts.push_back(realify(u1.u));

  TransitionPath p;
  p.kind_ = TransitionPath::Kind::Geodesic;
  p.u0_ = u0;
  p.u1_ = u1;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const RVec& a = pts[i];
    const RVec& b = pts[i + 1];
    const double c = std::clamp(a.dot(b), -1.0, 1.0);
    require(c > -1.0 + 1e-12,
            "geodesic_path: antipodal endpoints, the great circle is not unique; supply a waypoint");
    const RVec w = b - c * a;
    const double wn = w.norm();
    TransitionPath::Arc arc{a, RVec::Zero(a.size()), 0.0};
    if (wn > 1e-15) {
      arc.v = w / wn;
      arc.length = std::acos(c);
    }
    p.length_ += arc.length;
    p.arcs_.push_back(std::move(arc));
  }
  return p;
}

TransitionPath geodesic_path(const Controls& u0, const Controls& u1) {
  return geodesic_path(u0, {}, u1);
}

// ---------------------------------------------------------------------------

double total_arp(const Box& region, const Controls& u, const WaveConfig& cfg,
                 const PotentialSpec& spec, int resolution) {
  const int d = cfg.d();
  require(region.dim() == d, "total_arp: region dimension must equal d");
  require(!region.degenerate(), "total_arp: region must have positive measure");
  require(resolution >= 1, "total_arp: resolution must be positive");
  const std::size_t n = static_cast<std::size_t>(resolution);
  std::size_t lines = 1;
  for (int i = 1; i < d; ++i) lines *= n;

  std::vector<double> line_sums(lines);
  parallel_for(lines, [&](std::size_t l) {
    RVec x(d);
    std::size_t r = l;
    for (int i = 1; i < d; ++i) {
      x[i] = region.lo[i] + (region.hi[i] - region.lo[i]) * (static_cast<double>(r % n) + 0.5) / n;
      r /= n;
    }
    std::vector<double> vals(n);
    for (std::size_t k = 0; k < n; ++k) {
      x[0] = region.lo[0] + (region.hi[0] - region.lo[0]) * (static_cast<double>(k) + 0.5) / n;
      vals[k] = arp_value(x, u, cfg, spec);
    }
    line_sums[l] = pairwise_sum(vals);
  });
  return pairwise_sum(line_sums) / (static_cast<double>(lines) * static_cast<double>(n));
}

double transition_cost(const TransitionPath& path, const Box& region, const WaveConfig& cfg,
                       const PotentialSpec& spec, int n_samples, int resolution) {
  require(n_samples >= 2, "transition_cost: need at least two samples");
  const double L = path.arc_length();
  if (L == 0.0) return 0.0;
  std::vector<double> vals(n_samples);
  for (int i = 0; i < n_samples; ++i)
    vals[i] = total_arp(region, path.at_arc(L * (i + 0.5) / n_samples), cfg, spec, resolution);
  return L / n_samples * pairwise_sum(vals);
}

}  // namespace qcfield::control
