#include "qcfield/quasiperiodicity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <Eigen/QR>

#include "qcfield/calculus.hpp"

namespace qcfield::qp {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Periodic: return "Periodic";
    case Verdict::Quasiperiodic: return "Quasiperiodic";
    case Verdict::Indeterminate: return "Indeterminate";
  }
  return "?";
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Auto: return "auto";
    case Strategy::Enumerate: return "enumerate";
    case Strategy::PivotSearch: return "pivot-search";
  }
  return "?";
}

namespace {

constexpr double kEnumerateLimit = 2.0e6;

double norm_of(const IntVec& n) {
  double s = 0.0;
  for (long long v : n) s += static_cast<double>(v) * static_cast<double>(v);
  return std::sqrt(s);
}

bool shorter(const IntVec& a, const IntVec& b) {
  double na = norm_of(a), nb = norm_of(b);
  if (na != nb) return na < nb;
  return a > b;  // prefer positive leading entries on ties
}

struct WitnessTest {
  const RMat& Z;
  double tol;
  bool operator()(const IntVec& n) const {
    RVec v(static_cast<Eigen::Index>(n.size()));
    for (std::size_t i = 0; i < n.size(); ++i) v[i] = static_cast<double>(n[i]);
    double r = Z.cols() == 0 ? 0.0 : (Z.transpose() * v).norm();
    return r < tol * std::max(1.0, v.norm());
  }
};

// Greedy Gram-Schmidt selection of independent witnesses, shortest first.
std::vector<IntVec> independent_subset(std::vector<IntVec> cand, int max_rank) {
  std::sort(cand.begin(), cand.end(), shorter);
  std::vector<IntVec> kept;
  std::vector<RVec> ortho;
  for (const auto& n : cand) {
    if (static_cast<int>(kept.size()) == max_rank) break;
    RVec v(static_cast<Eigen::Index>(n.size()));
    for (std::size_t i = 0; i < n.size(); ++i) v[i] = static_cast<double>(n[i]);
    const double n0 = v.norm();
    for (const auto& q : ortho) v -= q.dot(v) * q;
    if (v.norm() > 1e-8 * n0) {
      ortho.push_back(v / v.norm());
      kept.push_back(n);
    }
  }
  return kept;
}

// Canonical representative of +-n: first nonzero entry positive.
bool canonical(const IntVec& n) {
  for (long long v : n)
    if (v != 0) return v > 0;
  return false;
}

void search_enumerate(const Subspace& sub, long long B, const WitnessTest& test,
                      const ClassifyOptions& opt, PeriodicityReport& rep,
                      std::vector<IntVec>& found) {
  const int N = sub.N();
  IntVec n(N, -B);
  for (;;) {
    if (rep.candidates >= opt.max_candidates) return;
    ++rep.candidates;
    if (canonical(n) && test(n)) found.push_back(n);
    int i = N - 1;
    while (i >= 0 && n[i] == B) n[i--] = -B;
    if (i < 0) break;
    ++n[i];
  }
  rep.exhaustive = true;
}

// Visit every integer d-vector with sup-norm exactly r whose first nonzero
// entry is positive.
void for_each_shell(int d, long long r, const std::function<void(const IntVec&)>& visit) {
  IntVec v(d, 0);
  std::function<void(int, bool, bool)> rec = [&](int i, bool hit, bool lead) {
    if (i == d) {
      if (hit) visit(v);
      return;
    }
    // lead: all previous entries are zero, so this one must be >= 0.
    const long long lo = lead ? 0 : -r;
    if (i == d - 1 && !hit) {
      if (!lead) {
        v[i] = -r;
        rec(i + 1, true, false);
      }
      v[i] = r;
      rec(i + 1, true, false);
      return;
    }
    for (long long x = lo; x <= r; ++x) {
      v[i] = x;
      rec(i + 1, hit || std::llabs(x) == r, lead && x == 0);
    }
  };
  rec(0, false, true);
}

// Enumerate the d coordinates of a well-conditioned pivot set; the remaining
// coordinates of any witness are then fixed up to rounding.
void search_pivot(const Subspace& sub, long long B, const WitnessTest& test,
                  const ClassifyOptions& opt, PeriodicityReport& rep,
                  std::vector<IntVec>& found) {
  const int d = sub.d(), N = sub.N();
  const RMat& K = sub.K();
  Eigen::ColPivHouseholderQR<RMat> qr(K);
  std::vector<int> piv(d);
  for (int i = 0; i < d; ++i) piv[i] = qr.colsPermutation().indices()[i];
  std::sort(piv.begin(), piv.end());
  RMat KP(d, d);
  for (int i = 0; i < d; ++i) KP.col(i) = K.col(piv[i]);
  // Row j of C gives coordinate j of the range(K^T) vector with pivot coords n_P.
  RMat C = (KP.fullPivLu().solve(K)).transpose();

  std::vector<char> is_pivot(N, 0);
  for (int p : piv) is_pivot[p] = 1;

  int rank = 0;
  for (long long r = 1; r <= B; ++r) {
    std::vector<IntVec> shell;
    bool capped = false;
    for_each_shell(d, r, [&](const IntVec& nP) {
      if (capped) return;
      if (rep.candidates >= opt.max_candidates) {
        capped = true;
        return;
      }
      ++rep.candidates;
      IntVec n(N);
      RVec np(d);
      for (int i = 0; i < d; ++i) np[i] = static_cast<double>(nP[i]);
      for (int j = 0; j < N; ++j) {
        if (is_pivot[j]) continue;
        double v = C.row(j).dot(np);
        if (std::abs(v) > static_cast<double>(B) + 0.5) return;
        n[j] = std::llround(v);
        if (std::llabs(n[j]) > B) return;
      }
      for (int i = 0; i < d; ++i) n[piv[i]] = nP[i];
      if (!canonical(n)) {
        for (auto& x : n) x = -x;
      }
      if (test(n)) shell.push_back(std::move(n));
    });
    found.insert(found.end(), shell.begin(), shell.end());
    if (capped) return;
    if (!shell.empty()) {
      rank = static_cast<int>(independent_subset(found, d).size());
      if (rank == d) return;
    }
  }
  rep.exhaustive = true;
}

}  // namespace

PeriodicityReport classify(const Subspace& sub, long long bound, double tol,
                           const ClassifyOptions& opt) {
  require(bound >= 1, "classify: bound must be at least 1");
  require(tol > 0.0, "classify: tol must be positive");
  PeriodicityReport rep;
  rep.search_bound = bound;
  rep.tolerance = tol;

  Strategy s = opt.strategy;
  if (s == Strategy::Auto) {
    double box = std::pow(2.0 * static_cast<double>(bound) + 1.0, sub.N());
    s = box <= kEnumerateLimit ? Strategy::Enumerate : Strategy::PivotSearch;
  }
  rep.strategy = s;

  RMat Z = calculus::null_basis(sub.K()).Z;
  WitnessTest test{Z, tol};
  std::vector<IntVec> found;
  if (s == Strategy::Enumerate)
    search_enumerate(sub, bound, test, opt, rep, found);
  else
    search_pivot(sub, bound, test, opt, rep, found);

  rep.witnesses = independent_subset(std::move(found), sub.d());
  rep.lattice_dim = static_cast<int>(rep.witnesses.size());
  if (rep.lattice_dim == sub.d())
    rep.verdict = Verdict::Periodic;
  else
    rep.verdict = rep.exhaustive ? Verdict::Quasiperiodic : Verdict::Indeterminate;
  return rep;
}

std::pair<RVec, double> lattice_translation(const Subspace& sub, const IntVec& n) {
  require(static_cast<int>(n.size()) == sub.N(), "lattice_translation: n must have length N");
  RVec rhs(sub.N());
  for (int j = 0; j < sub.N(); ++j) rhs[j] = kTwoPi * static_cast<double>(n[j]);
  RMat Kt = sub.K().transpose();
  RVec x = Kt.colPivHouseholderQr().solve(rhs);
  return {x, (Kt * x - rhs).norm()};
}

std::pair<long long, long long> moire_cosine(long long m, long long r) {
  long long num = 6 * m * m + 6 * m * r + r * r;
  long long den = 6 * m * m + 6 * m * r + 2 * r * r;
  long long g = std::gcd(num, den);
  if (g == 0) g = 1;
  if (den < 0) g = -g;
  return {num / g, den / g};
}

double moire_angle(long long m, long long r) {
  require(m != 0 && r != 0, "moire_angle: m and r must be non-zero");
  require(std::gcd(m, r) == 1, "moire_angle: m and r must be coprime");
  auto [num, den] = moire_cosine(m, r);
  double theta = std::acos(static_cast<double>(num) / static_cast<double>(den));
  require(theta > 0.0 && theta < kPi / 3.0, "moire_angle: theta(m, r) outside (0, pi/3)");
  return theta;
}

WaveConfig moire_wavevectors(double theta) {
  require(theta > 0.0 && theta < kPi / 3.0, "moire_wavevectors: theta must lie in (0, pi/3)");
  const double s3 = std::sqrt(3.0) / 2.0;
  RMat R(2, 2);
  R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  RMat K(2, 4);
  K.col(0) << s3, 0.5;
  K.col(1) << -s3, 0.5;
  K.col(2) = R * K.col(0);
  K.col(3) = R * K.col(1);
  return WaveConfig(K);
}

}  // namespace qcfield::qp
