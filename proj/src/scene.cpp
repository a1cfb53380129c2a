#include "qcfield/scene.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "qcfield/quasiperiodicity.hpp"

namespace qcfield {

SceneError::SceneError(const std::string& file, int line_, const std::string& field_,
                       const std::string& msg)
    : std::invalid_argument(file + ":" + std::to_string(line_) + ": field '" + field_ + "': " + msg),
      field(field_),
      line(line_) {}

namespace {

namespace fs = std::filesystem;

struct Ctx {
  std::string file;
  std::string base_dir;

  int line(const YAML::Node& n) const { return n.Mark().line + 1; }

  [[noreturn]] void fail(const YAML::Node& n, const std::string& field, const std::string& msg) const {
    throw SceneError(file, n.IsDefined() ? line(n) : 0, field, msg);
  }

  double num(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected a number");
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, field, "'" + n.Scalar() + "' is not a number");
    }
  }

  long long integer(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected an integer");
    try {
      return n.as<long long>();
    } catch (const YAML::Exception&) {
      fail(n, field, "'" + n.Scalar() + "' is not an integer");
    }
  }

  bool boolean(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected true or false");
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(n, field, "'" + n.Scalar() + "' is not a boolean");
    }
  }

  std::string text(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected a string");
    return n.Scalar();
  }

  RVec vec(const YAML::Node& n, const std::string& field, int expect = -1) const {
    if (!n.IsSequence()) fail(n, field, "expected a list of numbers");
    if (expect >= 0 && static_cast<int>(n.size()) != expect)
      fail(n, field, "expected " + std::to_string(expect) + " entries, got " + std::to_string(n.size()));
    RVec v(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) v[i] = num(n[i], field);
    return v;
  }

  cplx complex(const YAML::Node& n, const std::string& field) const {
    if (n.IsSequence()) {
      if (n.size() != 2) fail(n, field, "complex entries are [re, im]");
      return {num(n[0], field), num(n[1], field)};
    }
    return {num(n, field), 0.0};
  }

  void known(const YAML::Node& map, const std::string& field, std::set<std::string> keys) const {
    for (const auto& kv : map) {
      const std::string k = kv.first.as<std::string>();
      if (!keys.count(k)) fail(kv.first, field.empty() ? k : field + "." + k, "unknown field");
    }
  }
};

WaveConfig parse_K(const Ctx& c, const YAML::Node& K, const YAML::Node& root) {
  const double k = root["k"] ? c.num(root["k"], "k") : 1.0;
  if (root["k"] && !(k > 0.0)) c.fail(root["k"], "k", "wavenumber must be positive");
  auto count_N = [&](const YAML::Node& src) -> int {
    if (!src) c.fail(K, "N", "preset 'fan' needs N");
    long long N = c.integer(src, "N");
    if (N < 2 || N > 64) c.fail(src, "N", "fan needs 2 <= N <= 64");
    return static_cast<int>(N);
  };

  std::string preset;
  YAML::Node opts;
  if (K.IsScalar()) {
    preset = K.Scalar();
  } else if (K.IsMap()) {
    if (!K["preset"]) c.fail(K, "K", "a map must name a preset");
    preset = c.text(K["preset"], "K.preset");
    opts = K;
  } else if (K.IsSequence()) {
    const int d = static_cast<int>(K.size());
    if (d < 1 || d > 3) c.fail(K, "K", "expected 1 to 3 rows, got " + std::to_string(d));
    if (!K[0].IsSequence()) c.fail(K[0], "K", "rows must be lists of numbers");
    const int N = static_cast<int>(K[0].size());
    RMat M(d, N);
    for (int r = 0; r < d; ++r) {
      if (!K[r].IsSequence() || static_cast<int>(K[r].size()) != N)
        c.fail(K[r], "K", "row " + std::to_string(r + 1) + " must have " + std::to_string(N) + " entries");
      for (int j = 0; j < N; ++j) M(r, j) = c.num(K[r][j], "K");
    }
    try {
      return WaveConfig(M);
    } catch (const std::invalid_argument& e) {
      c.fail(K, "K", e.what());
    }
  } else {
    c.fail(K, "K", "expected rows, a preset name or a preset map");
  }

  if (preset == "fan") return WaveConfig::fan(count_N(opts && opts["N"] ? opts["N"] : root["N"]), k);
  if (preset == "icosahedral") return WaveConfig::icosahedral(k);
  if (preset == "fan_with_axis") return WaveConfig::fan_with_axis(5, k);
  if (preset == "moire") {
    double theta = 0.0;
    if (opts && opts["theta"]) {
      theta = c.num(opts["theta"], "K.theta");
    } else if (opts && opts["m"] && opts["r"]) {
      try {
        theta = qp::moire_angle(c.integer(opts["m"], "K.m"), c.integer(opts["r"], "K.r"));
      } catch (const std::invalid_argument& e) {
        c.fail(opts, "K", e.what());
      }
    } else {
      c.fail(K, "K", "preset 'moire' needs theta or m and r");
    }
    try {
      RMat M = qp::moire_wavevectors(theta).K() * k;
      return WaveConfig(M);
    } catch (const std::invalid_argument& e) {
      c.fail(K, "K", e.what());
    }
  }
  c.fail(K, "K", "unknown preset '" + preset + "'");
}

Controls parse_u(const Ctx& c, const YAML::Node& n, const std::string& field, int N) {
  CVec u(2 * N);
  if (n.IsMap()) {
    c.known(n, field, {"alpha", "beta"});
    for (const char* part : {"alpha", "beta"}) {
      const YAML::Node p = n[part];
      const std::string f = field + "." + part;
      if (!p) c.fail(n, f, "missing");
      if (!p.IsSequence() || static_cast<int>(p.size()) != N)
        c.fail(p, f, "expected " + std::to_string(N) + " entries");
      const int off = std::string(part) == "alpha" ? 0 : N;
      for (int j = 0; j < N; ++j) u[off + j] = c.complex(p[j], f);
    }
  } else if (n.IsSequence()) {
    if (static_cast<int>(n.size()) != 4 * N)
      c.fail(n, field,
             "expected 4N = " + std::to_string(4 * N) + " interleaved re/im values for 2N = " +
                 std::to_string(2 * N) + " controls, got " + std::to_string(n.size()));
    for (int i = 0; i < 2 * N; ++i) u[i] = cplx(c.num(n[2 * i], field), c.num(n[2 * i + 1], field));
  } else {
    c.fail(n, field, "expected {alpha, beta} or an interleaved re/im list");
  }
  return Controls(u);
}

Scene parse(const YAML::Node& root, const Ctx& c) {
  if (!root.IsMap()) c.fail(root, "<root>", "a scene must be a mapping");
  c.known(root, "", {"d", "N", "k", "K", "gamma", "u", "normalize", "spec", "region", "resolution",
                     "output", "format", "tiling", "transition", "level_set"});

  if (!root["K"]) c.fail(root, "K", "missing");
  WaveConfig cfg = parse_K(c, root["K"], root);
  const int d = cfg.d(), N = cfg.N();
  if (root["d"] && c.integer(root["d"], "d") != d)
    c.fail(root["d"], "d", "K has " + std::to_string(d) + " rows but d = " + root["d"].Scalar());
  if (root["N"] && c.integer(root["N"], "N") != N)
    c.fail(root["N"], "N", "K has " + std::to_string(N) + " columns but N = " + root["N"].Scalar());
  if (root["gamma"]) cfg = cfg.with_gamma(c.vec(root["gamma"], "gamma", N));

  if (!root["u"]) c.fail(root, "u", "missing");
  Controls u = parse_u(c, root["u"], "u", N);
  if (root["normalize"] && c.boolean(root["normalize"], "normalize")) {
    if (u.norm() == 0.0) c.fail(root["u"], "u", "cannot normalize zero controls");
    u = Controls::normalized(u.u);
  }

  PotentialSpec spec;
  if (const YAML::Node s = root["spec"]) {
    if (!s.IsMap()) c.fail(s, "spec", "expected {a, b} or {A}");
    c.known(s, "spec", {"a", "b", "A"});
    if (s["A"]) {
      if (s["a"] || s["b"]) c.fail(s, "spec", "give either a, b or A, not both");
      const YAML::Node A = s["A"];
      if (!A.IsSequence() || static_cast<int>(A.size()) != d + 1)
        c.fail(A, "spec.A", "expected " + std::to_string(d + 1) + " rows");
      CMat M(d + 1, d + 1);
      for (int r = 0; r <= d; ++r) {
        RVec row = c.vec(A[r], "spec.A", 2 * (d + 1));
        for (int j = 0; j <= d; ++j) M(r, j) = cplx(row[2 * j], row[2 * j + 1]);
      }
      try {
        spec = PotentialSpec::general(M);
      } catch (const std::invalid_argument& e) {
        c.fail(A, "spec.A", e.what());
      }
    } else {
      const double a = s["a"] ? c.num(s["a"], "spec.a") : 1.0;
      const double b = s["b"] ? c.num(s["b"], "spec.b") : 1.0;
      spec = PotentialSpec::diagonal(a, b);
    }
  }

  Box region = Box::centered(d, 6.0 * cfg.wavelength());
  if (const YAML::Node r = root["region"]) {
    if (!r.IsMap()) c.fail(r, "region", "expected {lo, hi, units} or {half, units}");
    c.known(r, "region", {"lo", "hi", "half", "units"});
    double scale = cfg.wavelength();
    if (r["units"]) {
      const std::string un = c.text(r["units"], "region.units");
      if (un == "length")
        scale = 1.0;
      else if (un != "lambda")
        c.fail(r["units"], "region.units", "expected 'lambda' or 'length'");
    }
    if (r["half"]) {
      const double h = c.num(r["half"], "region.half");
      if (!(h > 0.0)) c.fail(r["half"], "region.half", "must be positive");
      region = Box::centered(d, h * scale);
    } else {
      if (!r["lo"] || !r["hi"]) c.fail(r, "region", "needs lo and hi, or half");
      region = Box(c.vec(r["lo"], "region.lo", d) * scale, c.vec(r["hi"], "region.hi", d) * scale);
      if (region.degenerate()) c.fail(r, "region", "hi must exceed lo on every axis");
    }
  }

  std::vector<int> resolution(d, d == 3 ? 128 : d == 2 ? 513 : 1025);
  if (const YAML::Node r = root["resolution"]) {
    if (r.IsScalar()) {
      resolution.assign(d, static_cast<int>(c.integer(r, "resolution")));
    } else if (r.IsSequence() && static_cast<int>(r.size()) == d) {
      for (int i = 0; i < d; ++i) resolution[i] = static_cast<int>(c.integer(r[i], "resolution"));
    } else {
      c.fail(r, "resolution", "expected an integer or " + std::to_string(d) + " integers");
    }
    for (int n : resolution)
      if (n < 1) c.fail(r, "resolution", "must be at least 1");
  }

  std::string output;
  if (root["output"]) {
    output = c.text(root["output"], "output");
    fs::path p(output);
    if (p.is_relative()) p = fs::path(c.base_dir) / p;
    output = p.lexically_normal().string();
    const fs::path parent = fs::path(output).parent_path();
    if (!parent.empty() && !fs::is_directory(parent))
      c.fail(root["output"], "output", "directory '" + parent.string() + "' does not exist");
  } else {
    output = (fs::path(c.base_dir) / fs::path(c.file).stem()).lexically_normal().string();
  }

  OutputFormat format = OutputFormat::Pgm;
  if (root["format"]) {
    const std::string f = c.text(root["format"], "format");
    if (f == "pgm")
      format = OutputFormat::Pgm;
    else if (f == "csv")
      format = OutputFormat::Csv;
    else if (f == "both")
      format = OutputFormat::Both;
    else
      c.fail(root["format"], "format", "expected pgm, csv or both");
  }

  std::optional<Scene::Tiling> tiling;
  if (const YAML::Node t = root["tiling"]) {
    if (!t.IsMap()) c.fail(t, "tiling", "expected a mapping");
    c.known(t, "tiling", {"seed_density", "underlay", "underlay_resolution"});
    Scene::Tiling ts;
    if (t["seed_density"]) ts.seed_density = c.num(t["seed_density"], "tiling.seed_density");
    if (!(ts.seed_density > 0.0)) c.fail(t, "tiling.seed_density", "must be positive");
    if (t["underlay"]) ts.underlay = c.boolean(t["underlay"], "tiling.underlay");
    if (t["underlay_resolution"])
      ts.underlay_resolution = static_cast<int>(c.integer(t["underlay_resolution"], "tiling.underlay_resolution"));
    if (ts.underlay_resolution < 1) c.fail(t, "tiling.underlay_resolution", "must be at least 1");
    tiling = ts;
  }

  std::optional<Scene::Transition> transition;
  if (const YAML::Node t = root["transition"]) {
    if (!t.IsMap()) c.fail(t, "transition", "expected a mapping");
    c.known(t, "transition",
            {"kind", "frames", "eps", "units", "u1", "waypoints", "cost_samples", "cost_resolution"});
    Scene::Transition tr;
    if (t["kind"]) {
      tr.kind = c.text(t["kind"], "transition.kind");
      if (tr.kind != "direct" && tr.kind != "geodesic")
        c.fail(t["kind"], "transition.kind", "expected direct or geodesic");
    }
    if (t["frames"]) tr.frames = static_cast<int>(c.integer(t["frames"], "transition.frames"));
    if (tr.frames < 2) c.fail(t, "transition.frames", "need at least 2 frames");
    double scale = cfg.wavelength();
    if (t["units"]) {
      const std::string un = c.text(t["units"], "transition.units");
      if (un == "length")
        scale = 1.0;
      else if (un != "lambda")
        c.fail(t["units"], "transition.units", "expected 'lambda' or 'length'");
    }
    if (t["eps"]) tr.eps = c.vec(t["eps"], "transition.eps", d) * scale;
    if (t["u1"]) {
      Controls u1 = parse_u(c, t["u1"], "transition.u1", N);
      if (u1.norm() == 0.0) c.fail(t["u1"], "transition.u1", "must be non-zero");
      tr.u1 = Controls::normalized(u1.u);
    }
    if (!tr.eps && !tr.u1) c.fail(t, "transition", "needs eps or u1");
    if (t["waypoints"]) {
      const YAML::Node w = t["waypoints"];
      if (!w.IsSequence()) c.fail(w, "transition.waypoints", "expected a list of controls");
      for (const auto& wi : w) {
        Controls v = parse_u(c, wi, "transition.waypoints", N);
        if (v.norm() == 0.0) c.fail(wi, "transition.waypoints", "must be non-zero");
        tr.waypoints.push_back(Controls::normalized(v.u));
      }
    }
    if (t["cost_samples"]) tr.cost_samples = static_cast<int>(c.integer(t["cost_samples"], "transition.cost_samples"));
    if (tr.cost_samples < 2) c.fail(t, "transition.cost_samples", "must be at least 2");
    if (t["cost_resolution"])
      tr.cost_resolution = static_cast<int>(c.integer(t["cost_resolution"], "transition.cost_resolution"));
    if (tr.cost_resolution < 1) c.fail(t, "transition.cost_resolution", "must be at least 1");
    transition = tr;
  }

  std::optional<Scene::LevelSet> level_set;
  if (const YAML::Node l = root["level_set"]) {
    if (!l.IsMap()) c.fail(l, "level_set", "expected a mapping");
    c.known(l, "level_set", {"fraction"});
    Scene::LevelSet ls;
    if (l["fraction"]) ls.fraction = c.num(l["fraction"], "level_set.fraction");
    if (!(ls.fraction > 0.0 && ls.fraction <= 1.0))
      c.fail(l, "level_set.fraction", "must lie in (0, 1]");
    if (d != 3) c.fail(l, "level_set", "level sets need a 3D configuration");
    level_set = ls;
  }

  return Scene{c.file, cfg,      u,      spec,       region,    resolution,
               output, format,   tiling, transition, level_set};
}

}  // namespace

Scene parse_scene_text(const std::string& text, const std::string& name,
                       const std::string& base_dir) {
  Ctx c{name, base_dir};
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw SceneError(name, e.mark.line + 1, "<syntax>", e.msg);
  }
  return parse(root, c);
}

Scene parse_scene(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read scene file '" + file + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  fs::path base = fs::path(file).parent_path();
  return parse_scene_text(ss.str(), file, base.empty() ? "." : base.string());
}

}  // namespace qcfield
