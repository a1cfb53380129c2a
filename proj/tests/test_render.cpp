#include <doctest.h>

#include <set>

#include <json.hpp>

#include "cli.hpp"
#include "oracles.hpp"
#include "qcfield/control.hpp"
#include "qcfield/parallel.hpp"
#include "qcfield/render.hpp"
#include "qcfield/scene.hpp"

using namespace qcfield;
using namespace qcfield::render;
namespace fs = std::filesystem;

namespace {

Controls alt(int N) { return Controls::uniform(N, 1.0, -1.0); }

std::string scene_error(const std::string& text) {
  try {
    parse_scene_text(text, "s.yaml", fs::temp_directory_path().string());
  } catch (const SceneError& e) {
    return e.what();
  }
  return "";
}

bool has(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

std::string line_of(const std::string& out, const std::string& key) {
  std::istringstream in(out);
  std::string l;
  while (std::getline(in, l))
    if (l.rfind(key + ": ", 0) == 0) return l.substr(key.size() + 2);
  return "";
}

}  // namespace

TEST_CASE("grid nodes, ordering and single-point grids") {
  WaveConfig cfg = WaveConfig::fan(5);
  Box region(RVec::Constant(2, -1.0), RVec::Constant(2, 2.0));
  FieldGrid g = sample_grid(region, {4, 3}, alt(5), cfg);
  CHECK(g.size() == 12);
  CHECK(g.coord(0, 0) == -1.0);
  CHECK(g.coord(0, 3) == 2.0);
  CHECK(g.coord(1, 1) == 0.5);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g.flat(g.indices(i)) == i);
    CHECK(g.values[i] == arp_value(g.node(i), alt(5), cfg));
  }
  CHECK(g.indices(5) == std::vector<int>{1, 1});

  FieldGrid one = sample_grid(region, {1, 1}, alt(5), cfg);
  RVec c(2);
  c << 0.5, 0.5;
  CHECK(one.values[0] == arp_value(c, alt(5), cfg));
  CHECK_THROWS_AS(sample_grid(region, {0, 3}, alt(5), cfg), std::invalid_argument);
  CHECK_THROWS_AS(sample_grid(region, {1000, 1000}, alt(5), cfg, {}, 1000), ResourceError);
}

TEST_CASE("values stay inside the spectral bounds") {
  std::mt19937_64 rng(51);
  WaveConfig cfg = WaveConfig::fan(6);
  Controls u(oracle::random_controls(6, rng));
  FieldGrid g = sample_grid(Box::centered(2, 20.0), {41, 41}, u, cfg);
  SpectralBounds b = arp_bounds(cfg);
  const double s = u.norm() * u.norm();
  CHECK(g.min >= s * b.lo - 1e-9);
  CHECK(g.max <= s * b.hi + 1e-9);
  CHECK(g.min <= g.max);
}

TEST_CASE("refined grids reproduce coincident samples exactly") {
  WaveConfig cfg = WaveConfig::fan(5);
  Box region = Box::centered(2, 3 * kTwoPi);
  FieldGrid a = sample_grid(region, {17, 17}, alt(5), cfg);
  FieldGrid b = sample_grid(region, {33, 33}, alt(5), cfg);
  for (int j = 0; j < 17; ++j)
    for (int i = 0; i < 17; ++i) CHECK(a.values[a.flat({i, j})] == b.values[b.flat({2 * i, 2 * j})]);
}

TEST_CASE("rotated grids match the permuted controls") {
  WaveConfig cfg = WaveConfig::fan(5);
  control::SymmetryAction r = control::rotation_action(cfg, 2);
  Controls u = alt(5);
  Box region = Box::centered(2, 6 * kTwoPi);
  FieldGrid rotated = sample_grid(region, {65, 65}, [&](const RVec& x) { return arp_value(r.R * x, u, cfg); });
  FieldGrid permuted = sample_grid(region, {65, 65}, r.apply(u), cfg);
  double worst = 0.0;
  for (std::size_t i = 0; i < rotated.size(); ++i)
    worst = std::max(worst, std::abs(rotated.values[i] - permuted.values[i]));
  CHECK(worst < 1e-8);
}

TEST_CASE("parallel sampling is independent of the thread count") {
  std::vector<double> x(1001);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(static_cast<double>(i)) * 1e3 + 1e-7 * i;
  const double s = pairwise_sum(x);
  std::vector<double> y(x.size());
  for (int t : {1, 2, 3, 8}) {
    parallel_for(x.size(), [&](std::size_t i) { y[i] = x[i] * x[i]; }, t);
    CHECK(pairwise_sum(y) == pairwise_sum(y));
    CHECK(pairwise_sum(x) == s);
  }
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
    if (i == 7) throw std::runtime_error("boom");
  }, 4), std::runtime_error);
  CHECK(pairwise_sum(nullptr, 0) == 0.0);
}

TEST_CASE("gray levels and rasters") {
  FieldGrid g = sample_grid(Box::centered(2, 1.0), {2, 2}, [](const RVec&) { return 0.0; });
  g.values = {0, 1, 2, 3};
  g.min = 0;
  g.max = 3;
  CHECK(gray_levels(g) == std::vector<std::uint8_t>{0, 85, 170, 255});

  FieldGrid c = sample_grid(Box::centered(2, 1.0), {3, 2}, [](const RVec&) { return 4.0; });
  CHECK(gray_levels(c) == std::vector<std::uint8_t>(6, 128));

  fs::path dir = cli::scratch("raster");
  render_raster(g, (dir / "g.pgm").string());
  CHECK(cli::slurp(dir / "g.pgm") == std::string("P5\n2 2\n255\n\x00\x55\xaa\xff", 15));
  CHECK_THROWS_AS(render_raster(g, (dir / "missing" / "g.pgm").string()), IoError);
  fs::remove_all(dir);
}

TEST_CASE("CSV round trip is exact") {
  std::mt19937_64 rng(52);
  Controls u(oracle::random_controls(5, rng));
  FieldGrid g = sample_grid(Box::centered(2, 7.0), {9, 5}, u, WaveConfig::fan(5));
  fs::path dir = cli::scratch("csv");
  render_csv(g, (dir / "g.csv").string());
  std::istringstream in(cli::slurp(dir / "g.csv"));
  std::vector<double> back;
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) back.push_back(std::strtod(cell.c_str(), nullptr));
  }
  CHECK(rows == 5);
  CHECK(back == g.values);
  fs::remove_all(dir);
}

TEST_CASE("3D level sets") {
  WaveConfig cfg = WaveConfig::icosahedral();
  Controls u = Controls::uniform(6, 1.0, 1.0);
  FieldGrid g = sample_grid(Box::centered(3, kTwoPi), {15, 15, 15}, u, cfg);
  PointCloud all = level_set_points_3d(g, 1.0);
  CHECK(all.points.size() == g.size());
  PointCloud pc = level_set_points_3d(g, 0.075);
  CHECK(!pc.points.empty());
  const auto imin = static_cast<std::size_t>(std::min_element(g.values.begin(), g.values.end()) - g.values.begin());
  CHECK(std::find(pc.indices.begin(), pc.indices.end(), imin) != pc.indices.end());
  for (auto i : pc.indices) CHECK(g.values[i] <= pc.threshold);
  // All-ones controls are real, so psi(-x) = psi(x) and the symmetric grid is mirror-exact.
  std::set<std::size_t> s(pc.indices.begin(), pc.indices.end());
  for (auto i : pc.indices) {
    auto idx = g.indices(i);
    for (auto& v : idx) v = 14 - v;
    CHECK(s.count(g.flat(idx)) == 1);
  }
  FieldGrid flat = sample_grid(Box::centered(2, 1.0), {3, 3}, [](const RVec&) { return 0.0; });
  CHECK_THROWS_AS(level_set_points_3d(flat, 0.1), std::invalid_argument);
}

TEST_CASE("SVG canvas aligns nodes with underlay pixels") {
  Box region(RVec::Constant(2, -kTwoPi), RVec::Constant(2, 3 * kTwoPi));
  Canvas cv{region, kTwoPi};
  CHECK(cv.width() == doctest::Approx(4.0));
  CHECK(cv.height() == doctest::Approx(4.0));
  RVec x(2);
  x << 0.0, 0.0;
  CHECK((cv.map(x) - Eigen::Vector2d(1.0, 3.0)).norm() < 1e-14);

  tiling::TilingGraph empty;
  empty.region = region;
  std::string svg = tiling_svg(empty, nullptr);
  CHECK(has(svg, "<svg"));
  CHECK(has(svg, "</svg>"));
  CHECK_FALSE(has(svg, "<line"));
  CHECK_FALSE(has(svg, "<circle"));

  WaveConfig cfg = WaveConfig::fan(5);
  tiling::TilingGraph g = tiling::build_tiling(Box::centered(2, kTwoPi), 2.0, cfg);
  FieldGrid under = sample_grid(g.region, {9, 9}, alt(5), cfg);
  std::string s2 = tiling_svg(g, &under);
  CHECK(has(s2, "data:image/bmp;base64,"));
  std::size_t lines = 0, circles = 0;
  for (std::size_t p = 0; (p = s2.find("<line", p)) != std::string::npos; ++p) ++lines;
  for (std::size_t p = 0; (p = s2.find("<circle", p)) != std::string::npos; ++p) ++circles;
  CHECK(lines == g.edges.size());
  CHECK(circles == g.nodes.size());
  CHECK(tiling_svg(g, &under) == s2);

  // Pixel (i, r) counted from the top-left of the image sits on grid node (i, ny - 1 - r).
  auto attr = [&](const std::string& name) {
    const auto p = s2.find(" " + name + "=\"", s2.find("<image"));
    return std::stod(s2.substr(p + name.size() + 3));
  };
  const double ix = attr("x"), iy = attr("y"), iw = attr("width"), ih = attr("height");
  const Canvas gc{g.region, kTwoPi};
  for (int i = 0; i < 9; ++i)
    for (int r = 0; r < 9; ++r) {
      const Eigen::Vector2d centre(ix + (i + 0.5) * iw / 9, iy + (r + 0.5) * ih / 9);
      CHECK((centre - gc.map(under.node(under.flat({i, 8 - r})))).norm() < 1e-8);
    }
}

TEST_CASE("transition frames") {
  WaveConfig cfg = WaveConfig::fan(5);
  Controls u0 = Controls::normalized(alt(5).u);
  RVec eps(2);
  eps << kTwoPi, 2 * kTwoPi;
  control::TransitionPath p = control::direct_path(u0, eps, cfg);
  fs::path dir = cli::scratch("frames");
  Box region = Box::centered(2, 2 * kTwoPi);
  FrameSet two = render_transition_frames(p, 2, region, {17, 17}, cfg, {}, (dir / "two").string());
  CHECK(two.files.size() == 2);
  CHECK(std::abs(two.spacing - p.arc_length()) < 1e-12);
  render_raster(sample_grid(region, {17, 17}, u0, cfg), (dir / "start.pgm").string());
  render_raster(sample_grid(region, {17, 17}, p.end(), cfg), (dir / "end.pgm").string());
  CHECK(cli::slurp(two.files[0]) == cli::slurp(dir / "start.pgm"));
  CHECK(cli::slurp(two.files[1]) == cli::slurp(dir / "end.pgm"));

  FrameSet six = render_transition_frames(p, 6, region, {9, 9}, cfg, {}, (dir / "six").string());
  CHECK(six.files.back() == (dir / "six_005.pgm").string());
  CHECK(std::abs(six.spacing - kPi * std::sqrt(10.0) / 5) < 1e-12);
  fs::remove_all(dir);
}

TEST_CASE("scene parsing: valid forms") {
  const std::string base = fs::temp_directory_path().string();
  Scene s = parse_scene_text("K: fan\nN: 5\nu: {alpha: [1,1,1,1,1], beta: [-1,-1,-1,-1,-1]}\n", "a.yaml", base);
  CHECK(s.cfg.N() == 5);
  CHECK(s.resolution == std::vector<int>{513, 513});
  CHECK(s.region.hi[0] == doctest::Approx(6 * kTwoPi));
  CHECK(s.output == (fs::path(base) / "a").string());
  CHECK_FALSE(s.tiling.has_value());

  Scene m = parse_scene_text(
      "K: {preset: moire, m: 2, r: 3}\nu: [1,0, 0,1, 1,0, 0,1, 1,0, 0,1, 1,0, 0,1]\nnormalize: true\n"
      "spec: {a: 2, b: 0.5}\nregion: {lo: [0, 0], hi: [1, 2], units: length}\nresolution: [5, 7]\n",
      "m.yaml", base);
  CHECK(m.cfg.N() == 4);
  CHECK(std::abs(m.u.norm() - 1.0) < 1e-14);
  CHECK(std::abs(m.u.u[1] - cplx(0, 1) / std::sqrt(8.0)) < 1e-15);
  CHECK(m.spec.matrix(2)(0, 0) == cplx(2, 0));
  CHECK(m.resolution == std::vector<int>{5, 7});
  CHECK(m.region.hi[1] == 2.0);

  Scene a = parse_scene_text(
      "K: [[1, 0], [0, 1]]\nu: {alpha: [[1, 2], 3], beta: [0, 0]}\n"
      "spec: {A: [[1,0, 0,0, 0,0], [0,0, -1,0, 0,0.5], [0,0, 0,-0.5, -1,0]]}\n"
      "transition: {kind: direct, frames: 3, eps: [1, 0], units: length}\n",
      "A.yaml", base);
  CHECK(a.u.u[0] == cplx(1, 2));
  CHECK(a.spec.matrix(2)(1, 2) == cplx(0, 0.5));
  REQUIRE(a.transition);
  CHECK((*a.transition->eps)[0] == 1.0);

  Scene d3 = parse_scene_text("K: icosahedral\nu: [1,0,1,0,1,0,1,0,1,0,1,0,1,0,1,0,1,0,1,0,1,0,1,0]\nlevel_set: {}\n",
                              "i.yaml", base);
  CHECK(d3.resolution == std::vector<int>{128, 128, 128});
  CHECK(d3.level_set->fraction == 0.075);
}

TEST_CASE("scene parsing: diagnostics name the field and line") {
  const std::string u5 = "u: {alpha: [1,1,1,1,1], beta: [1,1,1,1,1]}\n";
  struct Bad {
    std::string text, field, phrase;
  };
  const std::vector<Bad> cases{
      {"K: [[1, 0, 0.6], [0, 1, 0.9]]\nu: [1,0,1,0,1,0,1,0,1,0,1,0]\n", "K", "column 3"},
      {"K: fan\nN: 5\nu: [1, 0, 1]\n", "u", "4N = 20"},
      {"K: fan\nN: 5\nu: {alpha: [1,1,1,1], beta: [1,1,1,1,1]}\n", "u.alpha", "expected 5 entries"},
      {"K: fan\nN: 5\n" + u5 + "colour: red\n", "colour", "unknown field"},
      {"K: fan\n" + u5, "N", "needs N"},
      {"K: fan\nN: 1\n" + u5, "N", "2 <= N"},
      {"K: fan\nN: 5\nd: 3\n" + u5, "d", "2 rows"},
      {"K: hexagon\n" + u5, "K", "unknown preset"},
      {"K: {preset: moire, m: 2, r: 4}\nu: [1,0,1,0,1,0,1,0,1,0,1,0,1,0,1,0]\n", "K", "coprime"},
      {"K: fan\nN: 5\n" + u5 + "spec: {a: 1, A: [[1]]}\n", "spec", "not both"},
      {"K: fan\nN: 5\n" + u5 + "spec: {A: [[1,0, 0,0, 0,0], [0,1, 1,0, 0,0], [0,0, 0,0, 1,0]]}\n", "spec.A",
       "Hermitian"},
      {"K: fan\nN: 5\n" + u5 + "region: {half: -1}\n", "region.half", "positive"},
      {"K: fan\nN: 5\n" + u5 + "region: {lo: [1, 1], hi: [0, 2]}\n", "region", "hi must exceed lo"},
      {"K: fan\nN: 5\n" + u5 + "region: {half: 1, units: feet}\n", "region.units", "lambda"},
      {"K: fan\nN: 5\n" + u5 + "resolution: 0\n", "resolution", "at least 1"},
      {"K: fan\nN: 5\n" + u5 + "resolution: [3, 3, 3]\n", "resolution", "2 integers"},
      {"K: fan\nN: 5\n" + u5 + "format: png\n", "format", "pgm, csv or both"},
      {"K: fan\nN: 5\n" + u5 + "output: nowhere/at/all/x\n", "output", "does not exist"},
      {"K: fan\nN: 5\n" + u5 + "tiling: {seed_density: 0}\n", "tiling.seed_density", "positive"},
      {"K: fan\nN: 5\n" + u5 + "transition: {kind: teleport, eps: [1, 1]}\n", "transition.kind", "direct or geodesic"},
      {"K: fan\nN: 5\n" + u5 + "transition: {frames: 1, eps: [1, 1]}\n", "transition.frames", "at least 2"},
      {"K: fan\nN: 5\n" + u5 + "transition: {kind: direct}\n", "transition", "eps or u1"},
      {"K: fan\nN: 5\n" + u5 + "transition: {eps: [1, 2, 3]}\n", "transition.eps", "expected 2 entries"},
      {"K: fan\nN: 5\n" + u5 + "level_set: {}\n", "level_set", "3D"},
      {"K: fan\nN: 5\nu: [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]\nnormalize: true\n", "u", "zero"},
      {"K: fan\nN: 5\n" + u5 + "gamma: [1, x, 0, 0, 0]\n", "gamma", "not a number"},
      {"K: fan\nN: [5\n", "<syntax>", ""},
      {"- 1\n- 2\n", "<root>", "mapping"},
      {"N: 5\n" + u5, "K", "missing"},
  };
  std::set<std::string> messages;
  for (const auto& b : cases) {
    CAPTURE(b.text);
    const std::string msg = scene_error(b.text);
    CHECK(has(msg, "s.yaml:"));
    CHECK(has(msg, "field '" + b.field + "'"));
    CHECK(has(msg, b.phrase));
    messages.insert(msg);
  }
  CHECK(messages.size() == cases.size());

  const std::string msg = scene_error("K: fan\nN: 5\n" + u5 + "\nformat: png\n");
  CHECK(has(msg, "s.yaml:5:"));
  CHECK_THROWS_AS(parse_scene("/nonexistent/scene.yaml"), IoError);
}

TEST_CASE("command line: outputs, formats and exit codes") {
  fs::path dir = cli::scratch("cli");
  cli::stage(dir, {"fan5.yaml", "line.yaml", "ico.yaml", "moire.yaml"});
  const std::string fan = (dir / "fan5.yaml").string();

  cli::Result e = cli::run({"eval", fan});
  CHECK(e.code == 0);
  CHECK(line_of(e.out, "min") == "-41.888543819998318");
  CHECK(fs::exists(dir / "fan5.pgm"));
  CHECK(fs::exists(dir / "fan5.csv"));
  CHECK(cli::slurp(dir / "fan5.pgm").substr(0, 13) == "P5\n65 65\n255\n");

  cli::Result t = cli::run({"tile", fan});
  CHECK(t.code == 0);
  CHECK(line_of(t.out, "nodes") == "153");
  CHECK(has(t.out, "  36.0000: "));
  CHECK(has(t.out, "  72.0000: "));
  auto js = nlohmann::json::parse(cli::slurp(dir / "fan5_tiling.json"));
  CHECK(js["nodes"].size() == 153);
  CHECK(js["edges"].size() == std::stoul(line_of(t.out, "edges")));

  cli::Result q = cli::run({"check-qp", (dir / "moire.yaml").string()});
  CHECK(q.code == 0);
  CHECK(line_of(q.out, "verdict") == "Periodic");
  CHECK(line_of(cli::run({"check-qp", fan, "--bound", "20"}).out, "verdict") == "Quasiperiodic");

  cli::Result r = cli::run({"transform", fan, "--reflect", "3"});
  CHECK(line_of(r.out, "permutation") == "[3, 2, 1, 10, 9, 8, 7, 6, 5, 4]");
  cli::Result tr = cli::run({"transform", fan, "--translate", "1,2", "--lambda"});
  CHECK(tr.code == 0);

  cli::Result g = cli::run({"transition", fan, "--kind", "geodesic", "--frames", "6"});
  CHECK(g.code == 0);
  CHECK(std::abs(std::stod(line_of(g.out, "arc_length")) - 1.4233074270125605) < 1e-12);
  CHECK(fs::exists(dir / "fan5_geodesic_005.pgm"));
  CHECK(std::stod(line_of(g.out, "cost")) <= std::stod(line_of(g.out, "cost_bound")));

  cli::Result mi = cli::run({"minima", fan, "--at", "0.5,1"});
  CHECK(mi.code == 0);
  CHECK(std::stod(line_of(mi.out, "gradient_norm")) < 1e-10);

  CHECK(cli::run({"eval", (dir / "line.yaml").string()}).code == 0);
  CHECK(fs::exists(dir / "line.csv"));
  CHECK_FALSE(fs::exists(dir / "line.pgm"));
  CHECK(cli::run({"eval", (dir / "ico.yaml").string()}).code == 0);
  CHECK(fs::exists(dir / "ico_levelset.csv"));

  // Validation errors exit 2, I/O errors 3, resource caps 4.
  CHECK(cli::run({"eval", (dir / "missing.yaml").string()}).code == 3);
  CHECK(cli::run({"frobnicate", fan}).code == 2);
  CHECK(cli::run({"transform", fan}).code == 2);
  CHECK(cli::run({"transform", fan, "--rotate", "11"}).code == 2);
  CHECK(cli::run({"minima", fan, "--at", "1,2,3"}).code == 2);
  {
    std::ofstream bad(dir / "bad.yaml");
    bad << "K: fan\nN: 5\nu: [1, 2]\n";
  }
  cli::Result b = cli::run({"eval", (dir / "bad.yaml").string()}, 0, true);
  CHECK(b.code == 2);
  CHECK(has(b.out, "bad.yaml:3: field 'u'"));
  {
    std::ofstream big(dir / "big.yaml");
    big << "K: fan\nN: 5\nu: {alpha: [1,1,1,1,1], beta: [1,1,1,1,1]}\nresolution: 100000\n";
  }
  CHECK(cli::run({"eval", (dir / "big.yaml").string()}).code == 4);
  {
    std::ofstream ro(dir / "ro.yaml");
    ro << "K: fan\nN: 5\nu: {alpha: [1,1,1,1,1], beta: [1,1,1,1,1]}\nresolution: 3\noutput: blocked\n";
  }
  fs::create_directories(dir / "blocked.pgm");  // a directory where the raster should go
  cli::Result io = cli::run({"eval", (dir / "ro.yaml").string()}, 0, true);
  CHECK(io.code == 3);
  CHECK(has(io.out, "blocked.pgm"));
  fs::remove_all(dir);
}
