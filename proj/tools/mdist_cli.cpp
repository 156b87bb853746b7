// mdist: command-line front end for the matching-distance library.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>

#include "mdist/bifiltration.hpp"
#include "mdist/io.hpp"
#include "mdist/matching_distance.hpp"
#include "mdist/pareto_grid.hpp"
#include "mdist/special_sets.hpp"
#include "mdist/svg.hpp"

namespace fs = std::filesystem;
using namespace mdist;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kInput = 3, kOther = 4 };

class UsageError : public Error {
 public:
  using Error::Error;
};

// Relative output paths land in $MDIST_OUTPUT_DIR when it is set.
std::string output_path(const std::string& requested, const std::string& fallback) {
  fs::path p = requested.empty() ? fs::path(fallback) : fs::path(requested);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("MDIST_OUTPUT_DIR"); dir && *dir) {
      fs::create_directories(dir);
      p = fs::path(dir) / p;
    }
  }
  return p.string();
}

void emit(const std::string& requested, const std::string& fallback, const std::string& content) {
  const auto path = output_path(requested, fallback);
  write_text_file(path, content);
  std::cout << "wrote " << path << "\n";
}

struct Shape {
  std::string kind;
  int resolution = 32;
  double radius = 1.0;
  double major = 2.0;
  double minor = 0.75;
  double tilt_x = 0.0;
  double tilt_z = 0.0;
  std::vector<double> center{0.0, 0.0, 0.0};
  int samples = 2048;

  Vec3 c() const { return {center[0], center[1], center[2]}; }
};

void add_shape_options(CLI::App* cmd, Shape& s, bool mesh) {
  cmd->add_option("shape", s.kind, "sphere or torus")
      ->required()
      ->check(CLI::IsMember({"sphere", "torus"}));
  if (mesh) cmd->add_option("--resolution", s.resolution, "mesh resolution (>= 8)");
  else cmd->add_option("--samples", s.samples, "polyline samples per loop");
  cmd->add_option("--radius", s.radius, "sphere radius");
  cmd->add_option("--major", s.major, "torus major radius");
  cmd->add_option("--minor", s.minor, "torus tube radius");
  cmd->add_option("--tilt-x", s.tilt_x, "torus rotation about x (radians)");
  cmd->add_option("--tilt-z", s.tilt_z, "torus rotation about z (radians)");
  cmd->add_option("--center", s.center, "center x y z")->expected(3);
}

EstimatorConfig make_config(double cbar, int res_a, int res_b, double tol, int degree,
                            int special_res) {
  EstimatorConfig c;
  c.cbar = cbar;
  c.resolution_a = res_a;
  c.resolution_b = res_b;
  c.tol = tol;
  c.degree = degree;
  c.special_resolution = special_res;
  try {
    c.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return c;
}

void print_estimate(const EstimateReport& r) {
  std::cout << to_string(r.method) << " " << format_number(r.value) << " realizer "
            << format_number(r.realizer.a) << " " << format_number(r.realizer.b) << " lines "
            << r.per_line.size() << "\n";
  if (r.value.is_infinite()) std::cout << "witness " << r.witness << "\n";
}

std::vector<LineParam> parse_lines(const std::vector<std::string>& specs) {
  std::vector<LineParam> out;
  for (const auto& s : specs) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw UsageError("--line expects a,b (got '" + s + "')");
    try {
      out.emplace_back(parse_finite(s.substr(0, comma)), parse_finite(s.substr(comma + 1)));
    } catch (const Error& e) {
      throw UsageError(std::string("--line: ") + e.what());
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matching distance of 2-parameter filtrations by the foliation method"};
  app.require_subcommand(1);

  // Flags shared by several commands.
  int degree = -1;
  int res_a = 200, res_b = 200, special_res = 32;
  double tol = 1e-3, cbar = 0.0;
  unsigned seed = 1;
  std::string out;

  // generate
  Shape gen;
  auto* c_gen = app.add_subcommand("generate", "write an OFF mesh and its value sidecar");
  add_shape_options(c_gen, gen, true);
  c_gen->add_option("-o,--out", out, "mesh path (sidecar gets .values)");

  // diagram
  std::string mesh1, mesh2, values1, values2;
  double line_a = 0.5, line_b = 0.0;
  auto* c_diag = app.add_subcommand("diagram", "persistence diagrams along one line");
  c_diag->add_option("mesh", mesh1)->required();
  c_diag->add_option("--values", values1, "value sidecar (default <mesh>.values)");
  c_diag->add_option("-a,--a", line_a, "slope parameter in [0,1]");
  c_diag->add_option("-b,--b", line_b, "offset parameter");
  c_diag->add_option("--degree", degree, "highest degree (default: complex dimension)");
  c_diag->add_option("-o,--out", out);

  // bottleneck
  std::string diag1, diag2;
  auto* c_bn = app.add_subcommand("bottleneck", "bottleneck distance of two diagram files");
  c_bn->add_option("first", diag1)->required();
  c_bn->add_option("second", diag2)->required();
  c_bn->add_option("--degree", degree, "compare a single degree");

  // matchdist / verify
  std::string grid1, grid2, method = "naive";
  auto add_estimator_options = [&](CLI::App* cmd) {
    cmd->add_option("mesh1", mesh1)->required();
    cmd->add_option("mesh2", mesh2)->required();
    cmd->add_option("--values1", values1);
    cmd->add_option("--values2", values2);
    cmd->add_option("--grid1", grid1, "grid of the first function");
    cmd->add_option("--grid2", grid2, "grid of the second function");
    cmd->add_option("--degree", degree, "restrict to one homology degree");
    cmd->add_option("--res-a", res_a, "samples along a");
    cmd->add_option("--res-b", res_b, "samples along b");
    cmd->add_option("--tol", tol, "verification tolerance");
    cmd->add_option("--cbar", cbar, "override the b range [-cbar, cbar]");
    cmd->add_option("--special-res", special_res, "nodes per axis of the candidate sampling grid");
    cmd->add_option("-o,--out", out);
  };
  auto* c_md = app.add_subcommand("matchdist", "estimate the matching distance");
  add_estimator_options(c_md);
  c_md->add_option("--method", method)->check(CLI::IsMember({"naive", "reduced", "verify"}));
  auto* c_ver = app.add_subcommand("verify", "check reduced >= naive - tol");
  add_estimator_options(c_ver);

  // pareto
  Shape par;
  auto* c_par = app.add_subcommand("pareto", "write the analytic grid of a generator");
  add_shape_options(c_par, par, false);
  c_par->add_option("-o,--out", out);

  // special
  double special_tol = 1e-6;
  bool u_only = false;
  auto* c_sp = app.add_subcommand("special", "sample Sp, USp, C and U of one or two grids");
  c_sp->add_option("grid1", grid1)->required();
  c_sp->add_option("grid2", grid2);
  c_sp->add_option("--res", special_res, "nodes per axis");
  c_sp->add_option("--tol", special_tol, "residual tolerance");
  c_sp->add_option("--cbar", cbar, "b range [-cbar, cbar] (default 1)");
  c_sp->add_flag("--u-only", u_only, "write only the U samples");
  c_sp->add_option("-o,--out", out);

  // render
  std::vector<std::string> inputs, line_specs;
  auto* c_ren = app.add_subcommand("render", "render grids, diagrams, candidates or reports");
  c_ren->add_option("inputs", inputs)->required();
  c_ren->add_option("--line", line_specs, "filtering line a,b drawn over grids");
  c_ren->add_option("--degree", degree, "diagram degree to draw (default 0)");
  c_ren->add_option("--cbar", cbar, "b range for candidate plots");
  c_ren->add_option("-o,--out", out);

  // position
  int n_lines = 10;
  double pos_tol = 0.0;
  auto* c_pos = app.add_subcommand("position", "check diagram coordinates against grid candidates");
  c_pos->add_option("mesh", mesh1)->required();
  c_pos->add_option("grid", grid1)->required();
  c_pos->add_option("--values", values1);
  c_pos->add_option("--lines", n_lines, "random lines besides the boundary lines");
  c_pos->add_option("--seed", seed, "random seed");
  c_pos->add_option("--tol", pos_tol, "tolerance (default 2x the largest edge gap)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (c_gen->parsed()) {
      const SurfaceMesh mesh =
          gen.kind == "sphere"
              ? sphere_mesh(gen.resolution, gen.radius, gen.c())
              : torus_mesh(gen.resolution, gen.major, gen.minor, {gen.tilt_x, gen.tilt_z}, gen.c());
      const auto path = output_path(out, gen.kind + ".off");
      write_text_file(path, write_off(mesh));
      write_text_file(values_path_for(path), write_values(mesh.values));
      std::cout << "wrote " << path << " (" << mesh.positions.size() << " vertices, "
                << mesh.triangles.size() << " triangles)\n";
      return kOk;
    }

    if (c_diag->parsed()) {
      const auto cx = load_mesh_complex(mesh1, values1);
      LineParam line;
      try {
        line = LineParam(line_a, line_b);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      const auto diagrams = compute_diagram(cx, line, degree >= 0 ? degree : cx.dimension());
      for (const auto& d : diagrams)
        std::cout << "degree " << d.degree() << ": " << d.proper_count() << " proper, "
                  << d.essential_count() << " essential\n";
      emit(out, "diagram.txt", write_diagrams(diagrams));
      return kOk;
    }

    if (c_bn->parsed()) {
      const auto d1 = read_diagrams(read_text_file(diag1));
      const auto d2 = read_diagrams(read_text_file(diag2));
      const int top = static_cast<int>(std::max(d1.size(), d2.size())) - 1;
      ExtendedReal total = 0.0;
      for (int k = std::max(0, degree); k <= std::max(top, degree); ++k) {
        if (degree >= 0 && k != degree) continue;
        const PersistenceDiagram empty(k);
        const auto& a = k < static_cast<int>(d1.size()) ? d1[k] : empty;
        const auto& b = k < static_cast<int>(d2.size()) ? d2[k] : empty;
        const auto m = bottleneck(a, b);
        std::cout << "degree " << k << " cost " << format_number(m.cost) << "\n";
        if (!m.witness.empty()) std::cout << "  witness " << m.witness << "\n";
        for (const auto& p : m.pairs)
          std::cout << "  " << p.source.to_string() << " -> " << p.target.to_string() << "  "
                    << format_number(p.cost) << "\n";
        total = max(total, m.cost);
      }
      std::cout << "cost " << format_number(total) << "\n";
      return kOk;
    }

    if (c_md->parsed() || c_ver->parsed()) {
      if (c_ver->parsed()) method = "verify";
      if (method != "naive" && (grid1.empty() || grid2.empty()))
        throw UsageError("--method " + method + " requires --grid1 and --grid2");
      const auto config = make_config(cbar, res_a, res_b, tol, degree, special_res);
      const auto cx1 = load_mesh_complex(mesh1, values1);
      const auto cx2 = load_mesh_complex(mesh2, values2);
      if (method == "naive") {
        const auto r = naive_estimate(cx1, cx2, config);
        print_estimate(r);
        emit(out, "naive.report", write_report(r));
        return kOk;
      }
      const auto g1 = read_grid(read_text_file(grid1));
      const auto g2 = read_grid(read_text_file(grid2));
      if (method == "reduced") {
        const auto r = reduced_estimate(cx1, cx2, g1, g2, config);
        print_estimate(r);
        std::cout << "slope-one lines " << r.slope_one_lines << ", U lines " << r.u_lines << "\n";
        emit(out, "reduced.report", write_report(r));
        return kOk;
      }
      const auto v = verify_main_theorem(cx1, cx2, g1, g2, config);
      print_estimate(v.naive);
      print_estimate(v.reduced);
      std::cout << (v.pass ? "PASS" : "FAIL") << " reduced >= naive - " << format_number(v.tol)
                << "\n";
      emit(out, "verify.report", write_verify(v));
      return v.pass ? kOk : kVerifyFailed;
    }

    if (c_par->parsed()) {
      const auto grid = par.kind == "sphere"
                            ? analytic_sphere_grid(par.radius, par.c())
                            : analytic_torus_grid(par.major, par.minor, {par.tilt_x, par.tilt_z},
                                                  par.c(), par.samples);
      std::cout << grid.proper_count() << " proper, " << grid.vertical_count() << " vertical, "
                << grid.horizontal_count() << " horizontal contours\n";
      emit(out, par.kind + ".grid", write_grid(grid));
      return kOk;
    }

    if (c_sp->parsed()) {
      if (special_res < 2) throw UsageError("--res must be >= 2");
      if (!(special_tol > 0)) throw UsageError("--tol must be positive");
      const auto g1 = read_grid(read_text_file(grid1));
      std::optional<ExtendedParetoGrid> g2;
      if (!grid2.empty()) g2 = read_grid(read_text_file(grid2));
      const ContourSet set = g2 ? ContourSet(g1, *g2) : ContourSet(g1);
      const double c = cbar > 0 ? cbar : 1.0;
      SamplingGrid sg;
      sg.region = {1e-3, 1.0 - 1e-3, -c, c};
      sg.res_a = sg.res_b = special_res;
      const USet u = assemble_U(set, sg, special_tol);
      std::cout << "Sp " << u.special.size() << ", USp " << u.ultraspecial.size() << ", C "
                << u.curve_c.size() << ", U " << u.u.size() << "\n";
      std::vector<CandidateSample> all = u.u;
      if (!u_only) {
        all = u.special;
        all.insert(all.end(), u.ultraspecial.begin(), u.ultraspecial.end());
        all.insert(all.end(), u.curve_c.begin(), u.curve_c.end());
      }
      emit(out, "candidates.txt", write_candidates(all));
      return kOk;
    }

    if (c_ren->parsed()) {
      std::vector<std::string> texts;
      for (const auto& p : inputs) texts.push_back(read_text_file(p));
      const std::string format = detect_format(texts.front());
      for (const auto& t : texts)
        if (detect_format(t) != format) throw UsageError("render: inputs must share one format");
      std::string svg;
      if (format == "mdist-grid") {
        if (texts.size() > 2) throw UsageError("render: at most two grids");
        std::vector<ExtendedParetoGrid> grids;
        for (const auto& t : texts) grids.push_back(read_grid(t));
        std::vector<const ExtendedParetoGrid*> ptrs;
        for (const auto& g : grids) ptrs.push_back(&g);
        svg = render_grids(ptrs, parse_lines(line_specs));
      } else if (format == "mdist-diagram") {
        if (texts.size() > 2) throw UsageError("render: at most two diagram files");
        const int k = std::max(degree, 0);
        auto pick = [k](const std::vector<PersistenceDiagram>& ds) {
          return k < static_cast<int>(ds.size()) ? ds[k] : PersistenceDiagram(k);
        };
        const auto first = pick(read_diagrams(texts[0]));
        if (texts.size() == 2) {
          const auto second = pick(read_diagrams(texts[1]));
          svg = render_diagrams(first, &second);
        } else {
          svg = render_diagrams(first);
        }
      } else if (format == "mdist-candidates") {
        std::vector<CandidateSample> all;
        for (const auto& t : texts) {
          auto s = read_candidates(t);
          all.insert(all.end(), s.begin(), s.end());
        }
        double c = cbar;
        if (!(c > 0))
          for (const auto& s : all) c = std::max(c, std::abs(s.param.b));
        svg = render_candidates(all, -(c > 0 ? c : 1.0), c > 0 ? c : 1.0);
      } else if (format == "mdist-report") {
        if (texts.size() != 1) throw UsageError("render: one report at a time");
        svg = render_report(read_report(texts[0]));
      } else if (format == "mdist-verify") {
        if (texts.size() != 1) throw UsageError("render: one verify report at a time");
        svg = render_verify(read_verify(texts[0]));
      } else {
        throw InputError("render: unrecognized input format '" + format + "'");
      }
      emit(out, "figure.svg", svg);
      return kOk;
    }

    if (c_pos->parsed()) {
      const auto cx = load_mesh_complex(mesh1, values1);
      const auto grid = read_grid(read_text_file(grid1));
      std::mt19937_64 rng(seed);
      const double c = std::max(compute_cbar(cx, cx), 1e-9);
      std::uniform_real_distribution<double> ua(0.02, 0.98), ub(-c, c);
      std::vector<LineParam> lines;
      for (int i = 0; i < n_lines; ++i) lines.emplace_back(ua(rng), ub(rng));
      for (double a : {0.0, 1.0})
        for (int j = 0; j < 5; ++j) lines.emplace_back(a, -c + 2 * c * j / 4.0);
      int failures = 0;
      for (const auto& line : lines) {
        const double t = pos_tol > 0 ? pos_tol : 2.0 * max_edge_gap(cx, line);
        const auto cands = position_candidates(grid, line);
        for (const auto& d : compute_diagram(cx, line, cx.dimension())) {
          const auto rep = position_check(d, cands, t);
          if (!rep.pass) {
            ++failures;
            std::cout << "FAIL line (" << format_number(line.a) << ", " << format_number(line.b)
                      << ") degree " << d.degree() << ": " << rep.violations.size()
                      << " violations, worst gap " << format_number(rep.worst_gap) << "\n";
          }
        }
      }
      std::cout << (failures ? "FAIL" : "PASS") << " " << lines.size() << " lines, " << failures
                << " failing diagrams\n";
      return failures ? kVerifyFailed : kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
  return kUsage;
}
