// Acceptance runner: one PASS/FAIL line per criterion. Exit status 0 only when
// every selected criterion passes. Optional arguments select criteria by
// number, e.g. `mdist_acceptance 1 6 7`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "mdist/matching_distance.hpp"
#include "mdist/special_sets.hpp"

using namespace mdist;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// The two desk instances of the reduction theorem.
struct Instance {
  std::string name;
  BifilteredComplex first, second;
  ExtendedParetoGrid grid1, grid2;
};

Instance sphere_instance(int res) {
  const Vec3 shift{0.3, 0, 0};
  return {"sphere vs shifted sphere", make_sphere(res, 1.0), make_sphere(res, 1.0, shift),
          analytic_sphere_grid(1.0), analytic_sphere_grid(1.0, shift)};
}

Instance torus_instance(int res) {
  const Orientation tilted{0.3, 0.2};
  return {"torus vs rotated torus", make_torus(res, 2.0, 0.7), make_torus(res, 2.0, 0.7, tilted),
          analytic_torus_grid(2.0, 0.7), analytic_torus_grid(2.0, 0.7, tilted)};
}

BifilteredComplex shifted(const BifilteredComplex& cx, double d1, double d2) {
  auto v = cx.values();
  for (auto& p : v) p = {p[0] + d1, p[1] + d2};
  return cx.with_values(v);
}

Outcome bottleneck_exactness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  int mismatches = 0;
  double worst = 0;
  for (int t = 0; t < 200; ++t) {
    const auto d1 = oracle::random_diagram(rng, 6), d2 = oracle::random_diagram(rng, 6);
    const double want = oracle::brute_bottleneck(d1, d2);
    const auto got = bottleneck(d1, d2).cost;
    if (std::isinf(want) != got.is_infinite()) {
      ++mismatches;
      continue;
    }
    if (!std::isinf(want)) {
      const double err = std::abs(got.value() - want);
      worst = std::max(worst, err);
      mismatches += err > 1e-12;
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 10.0,
          fmt("200 pairs, %d mismatches, max error %.1e, %.2fs", mismatches, worst, secs)};
}

Outcome metric_table() {
  using P = DiagramPoint;
  const double inf = oracle::kInf;
  struct Row {
    DiagramPoint p, q;
    double expected;
  };
  // u, v hand-derived from the definition of d
  const std::vector<Row> rows = {
      {P::proper(1, 3), P::proper(1, 3), 0.0},           // equal proper points
      {P::proper(0, 10), P::proper(1, 12), 2.0},         // proper, sup-norm branch
      {P::proper(0, 1), P::proper(5, 6), 0.5},           // proper, both near Delta
      {P::proper(0, 4), P::proper(3, 4.5), 2.0},         // proper, persistence branch
      {P::proper(1, 2), P::delta(), 0.5},                // proper to Delta
      {P::delta(), P::proper(-1, 5), 3.0},               // Delta to proper
      {P::essential(0), P::essential(2), 2.0},           // essential pair
      {P::essential(-1.5), P::essential(-1.5), 0.0},     // equal essential points
      {P::essential(0), P::proper(0, 100), inf},         // essential to proper
      {P::proper(-3, 7), P::essential(1), inf},          // proper to essential
      {P::essential(4), P::delta(), inf},                // essential to Delta
      {P::delta(), P::delta(), 0.0},                     // Delta to Delta
  };
  int bad = 0;
  for (const auto& r : rows) {
    const auto d = point_distance(r.p, r.q);
    const auto back = point_distance(r.q, r.p);
    const bool ok = std::isinf(r.expected)
                        ? d.is_infinite() && back.is_infinite()
                        : d.is_finite() && d.value() == r.expected && back == d;
    bad += !ok;
  }
  return {bad == 0, fmt("%zu rows, %d wrong", rows.size(), bad)};
}

Outcome diagram_stability() {
  std::mt19937_64 rng(31);
  const auto mesh = sphere_mesh(32, 1.0);
  const auto cx = mesh.complex();
  std::uniform_real_distribution<double> noise(-0.05, 0.05), ua(0, 1), ub(-1.2, 1.2);
  std::vector<LineParam> lines;
  for (int i = 0; i < 20; ++i) lines.emplace_back(ua(rng), ub(rng));
  std::vector<std::vector<PersistenceDiagram>> base;
  for (const auto& l : lines) base.push_back(compute_diagram(cx, l));
  int violations = 0;
  double worst_margin = -oracle::kInf;
  for (int t = 0; t < 50; ++t) {
    auto vals = mesh.values;
    for (auto& v : vals) v = {v[0] + noise(rng), v[1] + noise(rng)};
    const auto other = cx.with_values(vals);
    const double delta = sup_norm_difference(cx, other);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto d2 = compute_diagram(other, lines[i]);
      for (std::size_t k = 0; k < d2.size(); ++k) {
        const auto c = bottleneck(base[i][k], d2[k]).cost;
        const double margin = c.to_double() - delta;
        worst_margin = std::max(worst_margin, margin);
        violations += !(margin <= 1e-9) || delta > 0.05;
      }
    }
  }
  return {violations == 0,
          fmt("50 perturbations x 20 lines, max(cost - delta) = %.3g", worst_margin)};
}

Outcome matching_stability() {
  EstimatorConfig cfg;
  cfg.resolution_a = cfg.resolution_b = 60;
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> noise(-0.1, 0.1);
  const auto s = sphere_mesh(24, 1.0);
  auto noisy = s.values;
  for (auto& v : noisy) v = {v[0] + noise(rng), v[1] + noise(rng)};
  const auto sphere = sphere_instance(24), torus = torus_instance(24);
  const std::vector<std::pair<BifilteredComplex, BifilteredComplex>> cases = {
      {sphere.first, sphere.second},
      {torus.first, torus.second},
      {s.complex(), s.complex().with_values(noisy)},
      {s.complex(), shifted(s.complex(), 1.0, 3.0)},
      {s.complex(), s.complex()},
  };
  int bad = 0;
  double worst = -oracle::kInf;
  for (const auto& [a, b] : cases) {
    const double naive = naive_estimate(a, b, cfg).value.to_double();
    const double margin = naive - sup_norm_difference(a, b);
    worst = std::max(worst, margin);
    bad += !(margin <= 1e-9);
  }
  return {bad == 0, fmt("%zu instances, max(naive - sup) = %.3g", cases.size(), worst)};
}

Outcome position_theorem() {
  const auto t0 = Clock::now();
  struct Shape {
    BifilteredComplex cx;
    ExtendedParetoGrid grid;
  };
  const Orientation tilted{0.3, 0.2};
  const std::vector<Shape> shapes = {
      {make_sphere(64, 1.0), analytic_sphere_grid(1.0)},
      {make_torus(48, 2.0, 0.7, tilted), analytic_torus_grid(2.0, 0.7, tilted)},
  };
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> ua(0.02, 0.98), ub(-1.5, 1.5);
  std::size_t checked = 0, failed = 0;
  for (const auto& sh : shapes) {
    std::vector<LineParam> lines;
    for (int i = 0; i < 10; ++i) lines.emplace_back(ua(rng), ub(rng));
    for (double a : {0.0, 1.0})
      for (double b : {-1.0, -0.5, 0.0, 0.5, 1.0}) lines.emplace_back(a, b);
    for (const auto& line : lines) {
      const auto cands = position_candidates(sh.grid, line);
      const double tol = 2 * max_edge_gap(sh.cx, line);
      for (const auto& d : compute_diagram(sh.cx, line)) {
        const auto r = position_check(d, cands, tol);
        checked += r.checked;
        failed += r.violations.size();
      }
    }
  }
  const double secs = seconds_since(t0);
  return {failed == 0 && secs < 120.0,
          fmt("%zu coordinates on 50 lines, %zu off-grid, %.1fs", checked, failed, secs)};
}

Outcome threshold_example() {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-3, 3), d(0.01, 3);
  int bad = 0;
  for (int t = 0; t < 100; ++t) {
    const double b = u(rng), x0 = b + d(rng), y0 = -b + d(rng);
    const auto h = Contour::horizontal(x0, y0);
    const double A = threshold_slope(h, b);
    bad += !(std::abs(A - (x0 - b) / (x0 + y0)) <= 1e-9);
    const auto hat = hat_intersect({1.0, b}, h);
    bad += !(hat && hat->point.x.is_infinite() && hat->point.y.is_finite() &&
             hat->point.y.value() == y0);
    bad += intersect({A * (1 - 1e-6), b}, h).has_value();
    bad += !intersect({std::min(A + 1e-6, 1 - 1e-9), b}, h).has_value();
  }
  return {bad == 0, fmt("100 cases, %d failed checks", bad)};
}

Outcome factorization() {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  int limit_quads = 0;
  for (int q = 0; q < 20; ++q) {
    CurveCQuadruple quad;
    const bool vertical = q % 3 == 0;
    limit_quads += vertical;
    for (int k = 0; k < 4; ++k) {
      quad.contours[k] = {0, k};
      const double m = (vertical && k == q % 4) ? -INFINITY : -5 * u(rng);
      quad.tangents[k] = TangentData::from_slope({4 * u(rng) - 2, 4 * u(rng) - 2}, m);
    }
    for (int t = 0; t < 50; ++t) {
      const LineParam l(0.01 + 0.98 * u(rng), 4 * u(rng) - 2);
      const double e = curveC_residual(l, quad);
      const double f = curveC_factors(l, quad).value();
      const double rel = std::abs(e - f) / std::max(std::abs(e), 1e-300);
      worst = std::max(worst, e == f ? 0.0 : rel);
    }
  }
  return {worst <= 1e-9,
          fmt("1000 points, 20 quadruples (%d with a vertical tangent), max relative error %.2g",
              limit_quads, worst)};
}

Outcome ultraspecial_example() {
  ExtendedParetoGrid g;
  for (double x : {0.0, 1.0, 2.0}) g.contours.push_back(Contour::vertical(x, 0.0));
  const ContourSet set(g);
  const SamplingGrid sg{{0.01, 0.99, -3.0, 3.0}, 25, 25};
  int met = 0, bad = 0;
  double worst = 0;
  for (int i = 0; i < sg.res_a; ++i)
    for (int j = 0; j < sg.res_b; ++j) {
      const LineParam l(sg.a_at(i), sg.b_at(j));
      bool all = true;
      for (std::size_t c = 0; c < set.size(); ++c) all &= intersect(l, set.contour(c)).has_value();
      if (!all) continue;
      ++met;
      const auto ws = is_special(set, l, 1e-9);
      const auto us = is_ultraspecial(set, l, 1e-9);
      double best = oracle::kInf;
      for (const auto& w : ws) best = std::min(best, w.residual);
      if (ws.empty() || !us) {
        ++bad;
        continue;
      }
      worst = std::max({worst, best, us->residual});
    }
  return {met > 0 && bad == 0 && worst <= 1e-12,
          fmt("%d sampled lines meet all three, %d missed, max residual %.1e", met, bad, worst)};
}

Outcome main_theorem() {
  EstimatorConfig cfg;  // naive at 200 x 200, tol 1e-3
  std::string detail;
  bool pass = true;
  for (const auto& inst : {sphere_instance(32), torus_instance(48)}) {
    const auto t0 = Clock::now();
    const auto v = verify_main_theorem(inst.first, inst.second, inst.grid1, inst.grid2, cfg);
    const double secs = seconds_since(t0);
    pass &= v.pass && secs < 600.0;
    detail += fmt("%s%s: naive %.4f reduced %.4f (%zu lines) %.0fs", detail.empty() ? "" : "; ",
                  inst.name.c_str(), v.naive.value.to_double(), v.reduced.value.to_double(),
                  v.reduced.per_line.size(), secs);
  }
  return {pass, detail};
}

Outcome realizer_bound() {
  const auto s = make_sphere(16, 1.0);
  const auto t = shifted(s, 1.0, 3.0);
  EstimatorConfig cfg;
  cfg.resolution_a = cfg.resolution_b = 41;
  const auto n = naive_estimate(s, t, cfg);
  const auto r = realizer_bound_check(s, t, n, 1e-9);
  const bool ok = std::abs(r.norm1 - 1.0) < 1e-12 && std::abs(r.norm2 - 3.0) < 1e-12 &&
                  (r.hypothesis || r.corollary) && r.realizer_a > 0.25 && r.pass;
  return {ok, fmt("norms %.3g and %.3g, hypothesis %s, realizer a = %.4f, bound %.4f", r.norm1,
                  r.norm2, r.hypothesis ? "holds" : "fails", r.realizer_a, r.bound)};
}

Outcome boundary_domination() {
  EstimatorConfig cfg;
  cfg.resolution_b = 200;
  std::string detail;
  bool pass = true;
  for (const auto& inst : {sphere_instance(32), torus_instance(32)}) {
    const auto r = boundary_domination_check(inst.first, inst.second, cfg);
    pass &= r.pass;
    detail += fmt("%s%s: boundary - segment max = %.3g", detail.empty() ? "" : "; ",
                  inst.name.c_str(), r.worst_excess);
  }
  return {pass, detail};
}

Outcome multiplicity_consistency() {
  std::mt19937_64 rng(81);
  int bad = 0, boxes = 0, off = 0;
  for (int t = 0; t < 40; ++t) {
    auto d = oracle::random_diagram(rng, 6, 0.0);
    while (d.empty()) d = oracle::random_diagram(rng, 6, 0.0);
    double gap = oracle::kInf;
    for (const auto& p : d.points()) {
      gap = std::min(gap, p.death - p.birth);
      for (const auto& q : d.points()) {
        if (p == q) continue;
        if (p.birth != q.birth) gap = std::min(gap, std::abs(p.birth - q.birth));
        if (p.death != q.death) gap = std::min(gap, std::abs(p.death - q.death));
      }
    }
    const double eps = 0.45 * gap;
    for (const auto& p : d.points()) {
      ++boxes;
      bad += multiplicity_box(d, p.birth, p.death, eps) != p.multiplicity;
    }
    std::uniform_real_distribution<double> cu(-1, 8), len(0.2, 5);
    while (off < 100 * (t + 1) / 40) {
      const double u = cu(rng), v = u + len(rng);
      bool far = true;
      for (const auto& p : d.points())
        far &= std::max(std::abs(p.birth - u), std::abs(p.death - v)) > 2 * eps;
      if (!far || eps >= (v - u) / 2) continue;
      ++off;
      bad += multiplicity_box(d, u, v, eps) != 0;
    }
  }
  return {bad == 0 && off == 100,
          fmt("%d stored points, %d off-diagram boxes, %d wrong", boxes, off, bad)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"bottleneck exactness", bottleneck_exactness},
      {"metric cases", metric_table},
      {"diagram stability", diagram_stability},
      {"matching-distance stability", matching_stability},
      {"position theorem", position_theorem},
      {"threshold slope example", threshold_example},
      {"curve C factorization", factorization},
      {"ultraspecial example", ultraspecial_example},
      {"reduced estimator reaches the naive estimate", main_theorem},
      {"realizer bound", realizer_bound},
      {"boundary domination", boundary_domination},
      {"multiplicity consistency", multiplicity_consistency},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
