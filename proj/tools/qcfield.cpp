// qcfield: batch front end for scene files.
//
// Exit codes: 0 success, 2 validation error, 3 I/O error, 4 resource cap.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "qcfield/calculus.hpp"
#include "qcfield/control.hpp"
#include "qcfield/quasiperiodicity.hpp"
#include "qcfield/render.hpp"
#include "qcfield/scene.hpp"
#include "qcfield/tiling.hpp"

using namespace qcfield;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitResource = 4;

std::string num(double v) { return render::format_double(v); }

std::string fixed(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string list(const RVec& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + "]";
}

std::string interleaved(const Controls& u) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < u.u.size(); ++i)
    s += (i ? ", " : "") + num(u.u[i].real()) + ", " + num(u.u[i].imag());
  return s + "]";
}

RVec parse_point(const std::string& text, int d, const std::string& flag) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(item, &used));
      require(used == item.size(), "");
    } catch (const std::exception&) {
      throw std::invalid_argument(flag + ": '" + item + "' is not a number");
    }
  }
  require(static_cast<int>(vals.size()) == d,
          flag + ": expected " + std::to_string(d) + " comma-separated values");
  return Eigen::Map<RVec>(vals.data(), d);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << text;
  os.flush();
  if (!os) throw IoError("write to '" + path + "' failed");
}

void header(const Scene& s) {
  std::cout << "scene: " << s.path << "\n"
            << "d: " << s.cfg.d() << "\nN: " << s.cfg.N() << "\n";
}

// ---------------------------------------------------------------------------

int cmd_eval(const Scene& s) {
  header(s);
  const auto grid = render::sample_grid(s.region, s.resolution, s.u, s.cfg, s.spec);
  const auto bounds = arp_bounds(s.cfg, s.spec);
  std::cout << "resolution:";
  for (int n : s.resolution) std::cout << ' ' << n;
  std::cout << "\nmin: " << num(grid.min) << "\nmax: " << num(grid.max)
            << "\nspectral_bounds: [" << num(bounds.lo * s.u.u.squaredNorm()) << ", "
            << num(bounds.hi * s.u.u.squaredNorm()) << "]\n";
  if (s.cfg.d() <= 2) {
    if (s.format != OutputFormat::Csv) {
      render::render_raster(grid, s.output + ".pgm");
      std::cout << "wrote: " << s.output << ".pgm\n";
    }
    if (s.format != OutputFormat::Pgm) {
      render::render_csv(grid, s.output + ".csv");
      std::cout << "wrote: " << s.output << ".csv\n";
    }
  } else {
    if (s.format != OutputFormat::Pgm) {
      render::render_csv(grid, s.output + ".csv");
      std::cout << "wrote: " << s.output << ".csv\n";
    }
    const double fraction = s.level_set ? s.level_set->fraction : 0.075;
    const auto cloud = render::level_set_points_3d(grid, fraction);
    render::render_points_csv(cloud, s.output + "_levelset.csv");
    std::cout << "level_set_fraction: " << num(fraction) << "\nlevel_set_threshold: "
              << num(cloud.threshold) << "\nlevel_set_points: " << cloud.points.size()
              << "\nwrote: " << s.output << "_levelset.csv\n";
  }
  return 0;
}

int cmd_tile(const Scene& s) {
  header(s);
  const Scene::Tiling opts = s.tiling.value_or(Scene::Tiling{});
  const auto g = tiling::build_tiling(s.region, opts.seed_density, s.cfg);
  const auto st = tiling::tile_statistics(g);

  nlohmann::json doc;
  doc["d"] = s.cfg.d();
  doc["N"] = s.cfg.N();
  doc["region"] = {{"lo", std::vector<double>(s.region.lo.data(), s.region.lo.data() + s.region.dim())},
                   {"hi", std::vector<double>(s.region.hi.data(), s.region.hi.data() + s.region.dim())}};
  doc["nodes"] = nlohmann::json::array();
  for (const auto& n : g.nodes)
    doc["nodes"].push_back({{"center", n.center}, {"x", std::vector<double>(n.x.data(), n.x.data() + n.x.size())}});
  doc["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges) doc["edges"].push_back({e.a, e.b, e.dir});
  write_text(s.output + "_tiling.json", doc.dump(1) + "\n");

  std::cout << "nodes: " << g.nodes.size() << "\nedges: " << g.edges.size() << "\n";
  std::cout << "edge_lengths:\n";
  for (const auto& [bin, n] : st.edge_lengths.counts)
    std::cout << "  " << fixed(st.edge_lengths.bin_center(bin), 6) << ": " << n << "\n";
  std::cout << "edge_angles_deg:\n";
  for (const auto& [bin, n] : st.edge_angles.counts)
    std::cout << "  " << fixed(st.edge_angles.bin_center(bin) * 180.0 / kPi, 4) << ": " << n << "\n";
  std::cout << "rhombus_angles_deg:\n";
  for (const auto& [bin, n] : st.rhombus_angles.counts)
    std::cout << "  " << fixed(st.rhombus_angles.bin_center(bin) * 180.0 / kPi, 4) << ": " << n << "\n";
  std::cout << "wrote: " << s.output << "_tiling.json\n";

  if (s.cfg.d() == 2) {
    std::optional<render::FieldGrid> under;
    if (opts.underlay)
      under = render::sample_grid(s.region, {opts.underlay_resolution, opts.underlay_resolution}, s.u,
                                  s.cfg, s.spec);
    render::render_tiling_svg(g, under ? &*under : nullptr, s.output + "_tiling.svg", s.cfg.wavelength());
    std::cout << "wrote: " << s.output << "_tiling.svg\n";
  }
  return 0;
}

int cmd_check_qp(const Scene& s, long long bound, double tol) {
  header(s);
  const auto rep = qp::classify(s.cfg, bound, tol);
  std::cout << "verdict: " << qp::to_string(rep.verdict) << "\nlattice_dim: " << rep.lattice_dim
            << "\nsearch_bound: " << rep.search_bound << "\ntolerance: " << num(rep.tolerance)
            << "\nstrategy: " << qp::to_string(rep.strategy) << "\nexhaustive: "
            << (rep.exhaustive ? "true" : "false") << "\ncandidates: " << rep.candidates
            << "\nwitnesses:\n";
  for (const auto& w : rep.witnesses) {
    std::cout << "  - n: [";
    for (std::size_t i = 0; i < w.size(); ++i) std::cout << (i ? ", " : "") << w[i];
    const auto [x, res] = qp::lattice_translation(s.cfg.subspace(), w);
    std::cout << "]\n    translation: " << list(x) << "\n    residual: " << num(res) << "\n";
  }
  return 0;
}

int cmd_transform(const Scene& s, const std::string& translate, bool in_lambda, int rotate,
                  int reflect) {
  const int chosen = !translate.empty() + (rotate != 0) + (reflect != 0);
  require(chosen == 1, "transform: give exactly one of --translate, --rotate, --reflect");
  header(s);
  Controls out;
  if (!translate.empty()) {
    RVec eps = parse_point(translate, s.cfg.d(), "--translate");
    if (in_lambda) eps *= s.cfg.wavelength();
    out = control::translate_controls(s.u, eps, s.cfg);
    std::cout << "action: translate\neps: " << list(eps) << "\n";
  } else {
    const auto act = rotate ? control::rotation_action(s.cfg, rotate) : control::reflection_action(s.cfg, reflect);
    out = act.apply(s.u);
    std::cout << "action: " << (rotate ? "rotate" : "reflect") << "\nj: " << (rotate ? rotate : reflect)
              << "\npermutation: [";
    const auto p = act.one_based();
    for (std::size_t i = 0; i < p.size(); ++i) std::cout << (i ? ", " : "") << p[i];
    std::cout << "]\n";
  }
  std::cout << "u: " << interleaved(out) << "\n";
  return 0;
}

int cmd_transition(const Scene& s, std::string kind, int frames) {
  require(s.transition.has_value(), "transition: scene has no transition block");
  const auto& tr = *s.transition;
  if (kind.empty()) kind = tr.kind;
  if (frames <= 0) frames = tr.frames;
  require(kind == "direct" || kind == "geodesic", "transition: --kind must be direct or geodesic");
  header(s);
  require(s.u.norm() > 0.0, "transition: controls must be non-zero");
  const Controls u0 = Controls::normalized(s.u.u);

  std::optional<control::TransitionPath> path;
  if (kind == "direct") {
    require(tr.eps.has_value(), "transition: the direct path needs transition.eps");
    path = control::direct_path(u0, *tr.eps, s.cfg);
  } else {
    const Controls u1 = tr.u1 ? *tr.u1 : control::translate_controls(u0, *tr.eps, s.cfg);
    path = control::geodesic_path(u0, tr.waypoints, u1);
  }
  const auto fs = render::render_transition_frames(*path, frames, s.region, s.resolution, s.cfg,
                                                   s.spec, s.output + "_" + kind);
  const double cost = control::transition_cost(*path, s.region, s.cfg, s.spec, tr.cost_samples,
                                               tr.cost_resolution);
  const auto bounds = arp_bounds(s.cfg, s.spec);
  std::cout << "kind: " << kind << "\narc_length: " << num(path->arc_length())
            << "\nframes: " << frames << "\nframe_spacing: " << num(fs.spacing)
            << "\ncost: " << num(cost) << "\ncost_bound: " << num(path->arc_length() * bounds.hi)
            << "\n";
  const auto us = path->frames(frames);
  for (int i = 0; i < frames; ++i)
    std::cout << "frame_" << i << ": " << interleaved(us[i]) << "\n";
  for (const auto& f : fs.files) std::cout << "wrote: " << f << "\n";
  return 0;
}

int cmd_minima(const Scene& s, const std::string& at, bool in_lambda) {
  RVec x0 = parse_point(at, s.cfg.d(), "--at");
  if (in_lambda) x0 *= s.cfg.wavelength();
  header(s);
  const auto mc = calculus::synthesize_min_controls(x0, s.cfg, s.spec);
  const RVec g = calculus::arp_gradient(x0, mc.u, s.cfg, s.spec);
  const RMat H = calculus::arp_hessian(x0, mc.u, s.cfg, s.spec);
  Eigen::SelfAdjointEigenSolver<RMat> es(H, Eigen::EigenvaluesOnly);
  std::cout << "at: " << list(x0) << "\neigenvalue: " << num(mc.eigenvalue)
            << "\nmultiplicity: " << mc.multiplicity << "\npsi: " << num(arp_value(x0, mc.u, s.cfg, s.spec))
            << "\ngradient_norm: " << num(g.norm()) << "\nhessian_eigenvalues: " << list(es.eigenvalues())
            << "\nu: " << interleaved(mc.u) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasiperiodic acoustic radiation potential patterns"};
  app.require_subcommand(1);
  std::string scene_file;

  auto* eval = app.add_subcommand("eval", "Sample the ARP on the scene grid and write rasters/CSV");
  eval->add_option("scene", scene_file, "Scene file")->required();

  auto* tile = app.add_subcommand("tile", "Build the cut-and-project tiling of the scene region");
  tile->add_option("scene", scene_file, "Scene file")->required();

  long long bound = qp::kDefaultBound;
  double tol = qp::kDefaultTol;
  auto* cqp = app.add_subcommand("check-qp", "Classify the configuration as periodic or quasiperiodic");
  cqp->add_option("scene", scene_file, "Scene file")->required();
  cqp->add_option("--bound", bound, "Search bound on |n|_inf")->check(CLI::PositiveNumber);
  cqp->add_option("--tol", tol, "Witness tolerance")->check(CLI::PositiveNumber);

  std::string translate;
  int rotate = 0, reflect = 0;
  bool lambda_units = false;
  auto* xf = app.add_subcommand("transform", "Translate, rotate or reflect the pattern via its controls");
  xf->add_option("scene", scene_file, "Scene file")->required();
  xf->add_option("--translate", translate, "dx,dy[,dz]");
  xf->add_option("--rotate", rotate, "Rotation index j (angle (j-1) pi / N)");
  xf->add_option("--reflect", reflect, "Reflection index j (line at (j-1) pi / 2N)");
  xf->add_flag("--lambda", lambda_units, "Read --translate in wavelengths");

  std::string kind;
  int frames = 0;
  auto* trn = app.add_subcommand("transition", "Constant-power transition frames, arc length and cost");
  trn->add_option("scene", scene_file, "Scene file")->required();
  trn->add_option("--kind", kind, "direct or geodesic")->check(CLI::IsMember({"direct", "geodesic"}));
  trn->add_option("--frames", frames, "Number of frames")->check(CLI::Range(2, 100000));

  std::string at;
  auto* mins = app.add_subcommand("minima", "Controls placing a global minimum at a point");
  mins->add_option("scene", scene_file, "Scene file")->required();
  mins->add_option("--at", at, "x,y[,z]")->required();
  mins->add_flag("--lambda", lambda_units, "Read --at in wavelengths");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    const Scene s = parse_scene(scene_file);
    if (eval->parsed()) return cmd_eval(s);
    if (tile->parsed()) return cmd_tile(s);
    if (cqp->parsed()) return cmd_check_qp(s, bound, tol);
    if (xf->parsed()) return cmd_transform(s, translate, lambda_units, rotate, reflect);
    if (trn->parsed()) return cmd_transition(s, kind, frames);
    if (mins->parsed()) return cmd_minima(s, at, lambda_units);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
