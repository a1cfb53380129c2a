#include <doctest.h>

#include "oracles.hpp"
#include "qcfield/calculus.hpp"
#include "qcfield/control.hpp"

using namespace qcfield;
using namespace qcfield::control;

namespace {

Controls alt_unit(int N) { return Controls::normalized(Controls::uniform(N, 1.0, -1.0).u); }

RMat rot(double t) {
  RMat R(2, 2);
  R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return R;
}

RVec eps_example() {
  RVec e(2);
  e << kTwoPi, 2 * kTwoPi;
  return e;
}

double field_gap(const SymmetryAction& a, const WaveConfig& cfg, std::mt19937_64& rng) {
  const CMat A = oracle::diag_A(2, 1.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    Controls u(oracle::random_controls(cfg.N(), rng));
    RVec x = oracle::random_vec(2, rng, 10.0);
    const double lhs = oracle::psi(a.R * x, u.u, cfg.K(), cfg.gamma(), A);
    const double rhs = oracle::psi(x, a.apply(u).u, cfg.K(), cfg.gamma(), A);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  return worst;
}

}  // namespace

TEST_CASE("translation as a phase change") {
  std::mt19937_64 rng(41);
  WaveConfig cfg = WaveConfig::fan(5);
  for (int t = 0; t < 100; ++t) {
    Controls u(oracle::random_controls(5, rng));
    RVec x = oracle::random_vec(2, rng, 10.0), e = oracle::random_vec(2, rng, 10.0);
    const double a = arp_value(x + e, u, cfg), b = arp_value(x, translate_controls(u, e, cfg), cfg);
    CHECK(std::abs(a - b) < 1e-11 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("five-fold rotation and reflection permutations") {
  WaveConfig cfg = WaveConfig::fan(5);
  SymmetryAction r = rotation_action(cfg, 4);
  CHECK((r.R - rot(3 * kPi / 5)).norm() < 1e-14);
  CHECK(r.one_based() == std::vector<int>{4, 5, 6, 7, 8, 9, 10, 1, 2, 3});
  SymmetryAction f = reflection_action(cfg, 3);  // line at angle pi / 5
  CHECK(f.one_based() == std::vector<int>{3, 2, 1, 10, 9, 8, 7, 6, 5, 4});
  std::mt19937_64 rng(42);
  CHECK(field_gap(r, cfg, rng) < 1e-10);
  CHECK(field_gap(f, cfg, rng) < 1e-10);
}

TEST_CASE("every fan rotation and reflection preserves the field") {
  std::mt19937_64 rng(43);
  for (int N : {3, 4, 5, 6, 7}) {
    WaveConfig cfg = WaveConfig::fan(N);
    for (int j = 1; j <= 2 * N; ++j) {
      CAPTURE(N);
      CAPTURE(j);
      SymmetryAction r = rotation_action(cfg, j);
      SymmetryAction f = reflection_action(cfg, j);
      CHECK((r.R.transpose() * r.R - RMat::Identity(2, 2)).norm() < 1e-14);
      CHECK(std::abs(f.R.determinant() + 1.0) < 1e-14);
      CHECK(field_gap(r, cfg, rng) < 1e-10);
      CHECK(field_gap(f, cfg, rng) < 1e-10);
      std::vector<int> sorted = r.perm;
      std::sort(sorted.begin(), sorted.end());
      for (int i = 0; i < 2 * N; ++i) CHECK(sorted[i] == i);
    }
  }
  CHECK(rotation_action(WaveConfig::fan(5), 1).one_based() ==
        std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK_THROWS_AS(rotation_action(WaveConfig::fan(5), 0), std::invalid_argument);
  CHECK_THROWS_AS(reflection_action(WaveConfig::fan(5), 11), std::invalid_argument);
  CHECK_THROWS_AS(rotation_action(WaveConfig::icosahedral(), 1), std::invalid_argument);
}

TEST_CASE("match_unitary rejects non-symmetries") {
  WaveConfig cfg = WaveConfig::fan(5);
  CHECK_FALSE(match_unitary(rot(0.1), cfg).has_value());
  CHECK(match_unitary(rot(kPi / 5), cfg).has_value());
}

TEST_CASE("realify round trip") {
  std::mt19937_64 rng(44);
  CVec u = oracle::random_controls(4, rng);
  RVec r = realify(u);
  CHECK(r.size() == 16);
  CHECK(std::abs(r.norm() - u.norm()) < 1e-14);
  CHECK((complexify(r) - u).norm() == 0.0);
}

TEST_CASE("direct path: length and endpoints") {
  WaveConfig cfg = WaveConfig::fan(5);
  Controls u0 = alt_unit(5);
  TransitionPath p = direct_path(u0, eps_example(), cfg);
  CHECK(std::abs(p.arc_length() - kPi * std::sqrt(10.0)) < 1e-9);
  CHECK((p.at_arc(0).u - u0.u).norm() == 0.0);
  CHECK((p.at_arc(p.arc_length()).u - translate_controls(u0, eps_example(), cfg).u).norm() == 0.0);
  for (const auto& f : p.frames(11)) CHECK(std::abs(f.norm() - 1.0) < 1e-14);

  // Constant speed: consecutive frames equally far apart as chords.
  auto fr = p.frames(50);
  const double c0 = (fr[1].u - fr[0].u).norm();
  for (std::size_t i = 1; i < fr.size(); ++i) CHECK(std::abs((fr[i].u - fr[i - 1].u).norm() - c0) < 1e-12);
}

TEST_CASE("geodesic path: length from the dot-product oracle") {
  WaveConfig cfg = WaveConfig::fan(5);
  Controls u0 = alt_unit(5);
  Controls u1 = translate_controls(u0, eps_example(), cfg);
  TransitionPath g = geodesic_path(u0, u1);
  const double ref = std::acos(oracle::translate_cosine(cfg.K().transpose() * eps_example()));
  CHECK(std::abs(g.arc_length() - ref) < 1e-12);
  CHECK(std::abs(g.arc_length() - 1.4231) < 1e-3);
  CHECK(g.arc_length() < direct_path(u0, eps_example(), cfg).arc_length());
  CHECK((g.at_arc(g.arc_length()).u - u1.u).norm() == 0.0);

  // Points on the arc keep unit norm and split the length additively.
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const double s = U(rng) * g.arc_length();
    Controls m = g.at_arc(s);
    CHECK(std::abs(m.norm() - 1.0) < 1e-14);
    const double a = std::acos(std::clamp(realify(u0.u).dot(realify(m.u)), -1.0, 1.0));
    CHECK(std::abs(a - s) < 1e-7);
  }
}

TEST_CASE("geodesic through waypoints and antipodes") {
  std::mt19937_64 rng(46);
  Controls a = Controls::normalized(oracle::random_controls(3, rng));
  Controls b(-1.0 * a.u);
  CHECK_THROWS_AS(geodesic_path(a, b), std::invalid_argument);
  Controls w = Controls::normalized(oracle::random_controls(3, rng));
  TransitionPath p = geodesic_path(a, {w}, b);
  const double la = std::acos(realify(a.u).dot(realify(w.u)));
  const double lb = std::acos(realify(w.u).dot(realify(b.u)));
  CHECK(std::abs(p.arc_length() - (la + lb)) < 1e-12);
  CHECK((p.at_arc(la).u - w.u).norm() < 1e-12);
}

TEST_CASE("total ARP: exact averages and the cost bound") {
  // |e^{i x} + e^{i y}|^2 = 2 + 2 cos(x - y) averages to 2 over a period.
  WaveConfig cfg(RMat::Identity(2, 2));
  Controls u = Controls::uniform(2, 1.0, 0.0);
  Box per = Box::centered(2, kPi);
  const double m = total_arp(per, u, cfg, PotentialSpec::diagonal(1.0, 0.0), 64);
  CHECK(std::abs(m - 2.0) < 1e-12);

  WaveConfig fan = WaveConfig::fan(5);
  Controls u0 = alt_unit(5);
  Box region = Box::centered(2, 2 * fan.wavelength());
  TransitionPath g = geodesic_path(u0, translate_controls(u0, eps_example(), fan));
  TransitionPath d = direct_path(u0, eps_example(), fan);
  const double lmax = arp_bounds(fan).hi;
  const double cg = transition_cost(g, region, fan, {}, 17, 33);
  const double cd = transition_cost(d, region, fan, {}, 17, 33);
  CHECK(cg <= g.arc_length() * lmax);
  CHECK(cd <= d.arc_length() * lmax);
  CHECK(g.arc_length() * lmax <= d.arc_length() * lmax);
}
