#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "mdist/special_sets.hpp"

using namespace mdist;

namespace {

ExtendedParetoGrid three_verticals() {
  ExtendedParetoGrid g;
  for (double x : {0.0, 1.0, 2.0}) g.contours.push_back(Contour::vertical(x, 0.0));
  return g;
}

bool meets_all(const ContourSet& set, const LineParam& l) {
  for (std::size_t i = 0; i < set.size(); ++i)
    if (!intersect(l, set.contour(i))) return false;
  return true;
}

// Abscissa (or ordinate) of the tangent line of t met by r_(a,b), solved
// directly as a 2x2 linear system.
double tangent_hit(const TangentData& t, double a, double b, bool ordinate) {
  // line: (1-a)(x - b) - a(y + b) = 0; tangent: lambda (y - y0) - mu (x - x0) = 0
  const double a11 = 1 - a, a12 = -a, r1 = (1 - a) * b + a * b;
  const double a21 = -t.mu, a22 = t.lambda, r2 = t.lambda * t.anchor.y - t.mu * t.anchor.x;
  const double det = a11 * a22 - a12 * a21;
  const double x = (r1 * a22 - a12 * r2) / det;
  const double y = (a11 * r2 - a21 * r1) / det;
  return ordinate ? y : x;
}

// Jacobian determinant of (f, g) = (gap_PQ^2, gap_RS^2) by central differences.
double fd_determinant(const CurveCQuadruple& q, double a, double b, bool ordinate) {
  auto gap2 = [&](int i, int j, double aa, double bb) {
    const double d = tangent_hit(q.tangents[i], aa, bb, ordinate) -
                     tangent_hit(q.tangents[j], aa, bb, ordinate);
    return d * d;
  };
  const double h = 1e-6;
  auto f = [&](double aa, double bb) { return gap2(0, 1, aa, bb); };
  auto g = [&](double aa, double bb) { return gap2(2, 3, aa, bb); };
  const double fa = (f(a + h, b) - f(a - h, b)) / (2 * h), fb = (f(a, b + h) - f(a, b - h)) / (2 * h);
  const double ga = (g(a + h, b) - g(a - h, b)) / (2 * h), gb = (g(a, b + h) - g(a, b - h)) / (2 * h);
  return fa * gb - fb * ga;
}

CurveCQuadruple random_quadruple(std::mt19937_64& rng, bool with_vertical) {
  std::uniform_real_distribution<double> u(0, 1);
  CurveCQuadruple q;
  for (int k = 0; k < 4; ++k) {
    q.contours[k] = {0, k};
    const double m = (with_vertical && k == 1) ? -INFINITY : -5 * u(rng);
    q.tangents[k] = TangentData::from_slope({4 * u(rng) - 2, 4 * u(rng) - 2}, m);
  }
  return q;
}

}  // namespace

TEST_SUITE("special_sets") {

TEST_CASE("contour pairs") {
  CHECK_THROWS_AS(ContourPair({0, 1}, {0, 1}), Error);
  const ContourPair p({1, 0}, {0, 3});
  CHECK(p.first == ContourRef{0, 3});
  CHECK(ContourPair({0, 1}, {1, 0}) == ContourPair({1, 0}, {0, 1}));
  const ContourSet set(three_verticals(), three_verticals());
  CHECK(set.size() == 6);
  CHECK(set.all_pairs().size() == 15);
  CHECK(set.flat_index({1, 2}) == 5);
}

TEST_CASE("pair gaps") {
  ExtendedParetoGrid g;
  g.contours = {Contour::vertical(1, 0), Contour::vertical(3, 0), Contour::vertical(10, 50)};
  const ContourSet set(g);
  const LineParam l(0.4, 0.1);
  CHECK(*pair_gap(l, set, ContourPair({0, 0}, {0, 1}), Axis::X) == doctest::Approx(2.0));
  CHECK_FALSE(pair_gap(l, set, ContourPair({0, 0}, {0, 2}), Axis::X));
  const auto sphere = analytic_sphere_grid(1.0);
  const ContourSet ss(sphere);
  const LineParam mid(0.5, 0.0);
  for (const auto& pr : ss.all_pairs()) {
    for (Axis ax : {Axis::X, Axis::Y}) {
      const auto g1 = pair_gap(mid, ss, pr, ax);
      const auto g2 = pair_gap(mid, ss, ContourPair(pr.second, pr.first), ax);
      REQUIRE(g1.has_value() == g2.has_value());
      if (!g1) continue;
      CHECK(*g1 == *g2);
      const auto p = intersect(mid, ss.contour(pr.first));
      const auto q = intersect(mid, ss.contour(pr.second));
      const auto& pc = ax == Axis::X ? p->point.x : p->point.y;
      const auto& qc = ax == Axis::X ? q->point.x : q->point.y;
      CHECK(*g1 == doctest::Approx(std::abs(pc.value() - qc.value())));
    }
  }
  CHECK_THROWS_AS(pair_gap({0.0, 0}, set, ContourPair({0, 0}, {0, 1}), Axis::X), Error);
}

TEST_CASE("mandated axes") {
  CHECK(mandated_axes(0.3) == std::vector<Axis>{Axis::X});
  CHECK(mandated_axes(0.7) == std::vector<Axis>{Axis::Y});
  CHECK(mandated_axes(0.5).size() == 2);
}

TEST_CASE("three equidistant parallel contours are ultraspecial wherever met") {
  const ContourSet set(three_verticals());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ua(0.01, 0.99), ub(-3, 3);
  int met = 0;
  for (int t = 0; t < 300; ++t) {
    const LineParam l(ua(rng), ub(rng));
    if (!meets_all(set, l)) continue;
    ++met;
    const auto ws = is_special(set, l, 1e-9);
    // |x1 - x3| = 2 |x1 - x2| with residual 0
    bool found = false;
    for (const auto& w : ws) found |= w.residual <= 1e-12 && !w.double_point;
    CHECK(found);
    const auto u = is_ultraspecial(set, l, 1e-9);
    REQUIRE(u);
    CHECK(u->residual <= 1e-12);
    CHECK(ws.size() >= 3);
  }
  CHECK(met > 50);
}

TEST_CASE("a double point is special") {
  ExtendedParetoGrid g;
  g.contours = {Contour::vertical(1, -5), Contour::proper({{3, -1}, {1, 1}, {-1, 3}})};
  const ContourSet set(g);
  // both contours pass through (1, 1): the line through it with a = 1/3
  const auto l = line_through(1.0 / 3.0, {1.0, 1.0});
  const auto ws = is_special(set, l, 1e-9);
  REQUIRE(ws.size() == 1);
  CHECK(ws[0].double_point);
  CHECK(ws[0].residual <= 1e-12);
  CHECK(is_special(set, {1.0 / 3.0, l.b + 0.1}, 1e-9).empty());
}

TEST_CASE("lines missing the degenerate half-lines carry no witness") {
  const ContourSet set(analytic_sphere_grid(1.0), analytic_sphere_grid(1.0, {0.3, 0, 0}));
  CHECK(is_special(set, {0.5, -0.45}, 1e-9).empty());
  CHECK_FALSE(is_ultraspecial(set, {0.5, -0.45}, 1e-9));
}

TEST_CASE("ultraspecial implies at least three special witnesses") {
  std::mt19937_64 rng(100);
  std::uniform_real_distribution<double> c(-2, 2), ua(0.05, 0.95);
  std::uniform_int_distribution<int> lattice(-4, 4);
  int fired = 0;
  for (int t = 0; t < 100; ++t) {
    ExtendedParetoGrid g;
    for (int k = 0; k < 4; ++k) {
      const double x = lattice(rng) * 0.5, y = lattice(rng) * 0.5;
      g.contours.push_back(k % 2 ? Contour::vertical(x, y - 4) : Contour::horizontal(x - 4, y));
    }
    const ContourSet set(g);
    const LineParam l(ua(rng), c(rng));
    if (is_ultraspecial(set, l, 1e-9)) {
      ++fired;
      CHECK(is_special(set, l, 1e-9).size() >= 3);
    }
  }
  CHECK(fired > 0);
}

TEST_CASE("sampling grid geometry") {
  SamplingGrid g{{0.1, 0.9, -1, 1}, 5, 3};
  CHECK(g.a_at(0) == 0.1);
  CHECK(g.a_at(4) == doctest::Approx(0.9));
  CHECK(g.cell_count() == 8);
  CHECK(g.cell_of(0.9, 1.0) == std::make_pair(3, 1));
  CHECK(g.cell_of(0.05, 0).first == -1);
  for (auto k : {CandidateKind::Special, CandidateKind::Ultraspecial, CandidateKind::CurveC,
                 CandidateKind::EndpointFamily})
    CHECK(candidate_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(candidate_kind_from_string("bogus"), Error);
}

TEST_CASE("sampled special sets on the parallel-contour examples") {
  ExtendedParetoGrid two;
  two.contours = {Contour::vertical(0, 0), Contour::vertical(1, 0)};
  SamplingGrid grid{{0.05, 0.95, -2, 2}, 12, 12};
  CHECK(sample_special_set(ContourSet(two), grid).empty());

  const ContourSet set(three_verticals());
  const auto sp = sample_special_set(set, grid);
  const auto usp = sample_ultraspecial_set(set, grid, sp);
  std::set<std::pair<double, double>> sp_params, usp_params;
  for (const auto& s : sp) sp_params.insert({s.param.a, s.param.b});
  for (const auto& s : usp) usp_params.insert({s.param.a, s.param.b});
  int nodes = 0;
  for (int i = 0; i < grid.res_a; ++i)
    for (int j = 0; j < grid.res_b; ++j) {
      const LineParam l(grid.a_at(i), grid.b_at(j));
      if (!meets_all(set, l)) continue;
      ++nodes;
      CHECK(sp_params.count({l.a, l.b}) == 1);
      CHECK(usp_params.count({l.a, l.b}) == 1);
    }
  CHECK(nodes > 10);
  const auto u = assemble_U(set, grid);
  CHECK(u.u.size() >= u.ultraspecial.size());
}

TEST_CASE("USp and U are contained in Sp") {
  const ContourSet set(analytic_sphere_grid(1.0, {}, 24), analytic_sphere_grid(1.0, {0.3, 0, 0}, 24));
  SamplingGrid grid{{0.02, 0.98, -1.3, 1.3}, 14, 14};
  const auto u = assemble_U(set, grid, 1e-6, 0.6);
  REQUIRE_FALSE(u.special.empty());
  for (const auto* part : {&u.ultraspecial, &u.u})
    for (const auto& s : *part) CHECK_FALSE(is_special(set, s.param, 1e-5).empty());
  for (const auto& s : u.ultraspecial) CHECK(is_ultraspecial(set, s.param, 1e-5));
}

TEST_CASE("special hits survive grid refinement") {
  const ContourSet set(analytic_sphere_grid(1.0, {}, 24), analytic_sphere_grid(1.0, {0.3, 0, 0}, 24));
  const Region region{0.02, 0.98, -1.3, 1.3};
  const SamplingGrid coarse{region, 9, 9}, fine{region, 17, 17};
  const auto a = sample_special_set(set, coarse), b = sample_special_set(set, fine);
  std::set<int> fine_cells;
  for (const auto& s : b) {
    const auto [i, j] = fine.cell_of(s.param.a, s.param.b);
    if (i >= 0) fine_cells.insert(fine.cell_id(i, j));
  }
  int checked = 0, kept = 0;
  for (const auto& s : a) {
    const auto [i, j] = coarse.cell_of(s.param.a, s.param.b);
    if (i < 0) continue;
    ++checked;
    bool near = false;
    // the coarse cell (i, j) covers fine cells 2i-1 .. 2i+2 with a one-cell margin
    for (int fi = 2 * i - 1; fi <= 2 * i + 2 && !near; ++fi)
      for (int fj = 2 * j - 1; fj <= 2 * j + 2 && !near; ++fj)
        if (fi >= 0 && fj >= 0 && fi < fine.res_a - 1 && fj < fine.res_b - 1)
          near = fine_cells.count(fine.cell_id(fi, fj)) > 0;
    kept += near;
  }
  CHECK(checked > 0);
  CHECK(kept == checked);
}

TEST_CASE("curve C residual matches a finite-difference oracle") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  int compared = 0;
  for (int q = 0; q < 20; ++q) {
    const auto quad = random_quadruple(rng, q % 4 == 0);
    for (int t = 0; t < 20; ++t) {
      const LineParam l(0.05 + 0.9 * u(rng), 4 * u(rng) - 2);
      const bool ord = l.a > 0.5;
      const double e = curveC_residual(l, quad);
      const double det = fd_determinant(quad, l.a, l.b, ord);
      const double scale = std::max(1.0, std::abs(det));
      CHECK(std::abs(e + det / 4) <= 1e-5 * scale);
      ++compared;
    }
  }
  CHECK(compared == 400);
}

TEST_CASE("curve C factorization identity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  for (int q = 0; q < 20; ++q) {
    const auto quad = random_quadruple(rng, q % 3 == 0);
    for (int t = 0; t < 50; ++t) {
      const LineParam l(0.01 + 0.98 * u(rng), 4 * u(rng) - 2);
      const double e = curveC_residual(l, quad);
      const auto f = curveC_factors(l, quad);
      worst = std::max(worst, std::abs(e - f.value()) / std::max(std::abs(e), 1e-300));
      // C and D are c2 a^2 + c1 a b + c0 a in the form's coordinates
      const auto poly = curveC_coefficients(quad, l.a > 0.5);
      const double a = l.a > 0.5 ? 1 - l.a : l.a, b = l.a > 0.5 ? -l.b : l.b;
      auto eval = [&](const std::array<double, 3>& c) { return c[0] * a * a + c[1] * a * b + c[2] * a; };
      CHECK(eval(poly.C) == doctest::Approx(f.C).epsilon(1e-9).scale(1.0));
      CHECK(eval(poly.D) == doctest::Approx(f.D).epsilon(1e-9).scale(1.0));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("curve C special configurations") {
  // four vertical contours: abscissas do not move, the residual vanishes
  CurveCQuadruple v;
  for (int k = 0; k < 4; ++k) {
    v.contours[k] = {0, k};
    v.tangents[k] = TangentData::from_slope({double(k), 0.0}, -INFINITY);
  }
  CHECK(curveC_residual({0.3, 0.4}, v) == 0.0);
  CHECK(curveC_residual({0.7, -0.4}, v) == 0.0);
  // equal slopes with a point-symmetric arrangement: the two gaps are the
  // same function, so their gradients are parallel
  CurveCQuadruple s;
  const Point2 anchors[4] = {{-1, 1}, {1, -1}, {-1, 1}, {1, -1}};
  for (int k = 0; k < 4; ++k) {
    s.contours[k] = {0, k};
    s.tangents[k] = TangentData::from_slope(anchors[k], -2.0);
  }
  CHECK(std::abs(curveC_residual({0.3, 0.2}, s)) < 1e-12);
  CHECK(TangentData::from_slope({0, 0}, -3.0).slope() == -3.0);
  CHECK(TangentData::from_slope({0, 0}, -INFINITY).slope() == -INFINITY);
}

TEST_CASE("approximate curve C") {
  ExtendedParetoGrid single;
  single.contours = {Contour::proper({{1, -1}, {0, 0}, {-1, 1}})};
  SamplingGrid grid{{0.05, 0.95, -2, 2}, 10, 10};
  const auto c = approximate_curveC(ContourSet(single), grid);
  REQUIRE_FALSE(c.empty());
  for (const auto& s : c) {
    CHECK(s.kind == CandidateKind::EndpointFamily);
    bool on_family = false;
    for (const auto& p : single.contours[0].endpoints())
      on_family |= std::abs(s.param.b - ((1 - s.param.a) * p.x - s.param.a * p.y)) <= 1e-12;
    CHECK(on_family);
  }
  const auto sphere = approximate_curveC(
      ContourSet(analytic_sphere_grid(1.0, {}, 24), analytic_sphere_grid(1.0, {0.3, 0, 0}, 24)), grid);
  std::size_t zero_set = 0;
  for (const auto& s : sphere) zero_set += s.kind == CandidateKind::CurveC;
  CHECK(zero_set > 0);
}

TEST_CASE("no special values gives an empty U") {
  ExtendedParetoGrid single;
  single.contours = {Contour::vertical(0, 0)};
  const auto u = assemble_U(ContourSet(single), {{0.05, 0.95, -1, 1}, 8, 8});
  CHECK(u.special.empty());
  CHECK(u.u.empty());
}

}
