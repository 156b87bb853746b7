#include <doctest.h>

#include <random>

#include "mdist/bifiltration.hpp"
#include "mdist/pareto_grid.hpp"

using namespace mdist;

namespace {

Contour random_proper(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.05, 1.0), s(-2, 2);
  std::vector<Point2> pts{{s(rng), s(rng)}};
  for (int i = 1; i < n; ++i) pts.push_back({pts.back().x - u(rng), pts.back().y + u(rng)});
  return Contour::proper(pts);
}

// Numerical limit of intersect along a -> target.
std::optional<ExtendedPoint> numeric_limit(const Contour& c, double target, double b) {
  std::optional<ExtendedPoint> last;
  for (int k = 2; k <= 6; ++k) {
    const double h = std::pow(10.0, -k);
    const auto hit = intersect({target == 0.0 ? h : 1.0 - h, b}, c);
    if (!hit) return std::nullopt;
    last = hit->point;
  }
  return last;
}

}  // namespace

TEST_SUITE("pareto_grid") {

TEST_CASE("contour invariants") {
  CHECK_THROWS_AS(Contour::proper({{0, 0}, {1, 1}}), Error);
  CHECK_THROWS_AS(Contour::proper({{0, 0}}), Error);
  CHECK(is_monotone_polyline({{0, 2}, {1, 1}, {1, 0}, {2, 0}}));
  CHECK_FALSE(is_monotone_polyline({{0, 0}, {1, 0.5}}));
  const auto c = Contour::proper({{2, 0}, {0, 2}});
  CHECK(c.polyline().front().y <= c.polyline().back().y);
  CHECK(c.segment_slopes().front() == doctest::Approx(-1.0));
  CHECK(Contour::proper({{1, 0}, {1, 2}}).segment_slopes().front() == -INFINITY);
}

TEST_CASE("intersect examples") {
  auto v = intersect({0.5, 0}, Contour::vertical(1, 0));
  REQUIRE(v);
  CHECK(v->point == ExtendedPoint{1.0, 1.0});
  CHECK_FALSE(intersect({0.5, 0}, Contour::horizontal(2, 1)));
  auto p = intersect({0.5, 0}, Contour::proper({{0, 2}, {2, 0}}));
  REQUIRE(p);
  CHECK(p->point.x.value() == doctest::Approx(1.0));
  CHECK(p->point.y.value() == doctest::Approx(1.0));
}

TEST_CASE("proper contours meet each line at most once") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ua(0.01, 0.99), ub(-3, 3);
  for (int t = 0; t < 200; ++t) {
    const auto c = random_proper(rng, 8);
    const LineParam l(ua(rng), ub(rng));
    int changes = 0;
    const auto& pts = c.polyline();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double s0 = line_side(l, pts[i].x, pts[i].y), s1 = line_side(l, pts[i + 1].x, pts[i + 1].y);
      changes += (s0 < 0) != (s1 < 0);
    }
    CHECK(changes <= 1);
    const auto hit = intersect(l, c);
    CHECK(hit.has_value() == (changes == 1));
    if (hit) CHECK(std::abs(line_side(l, hit->point.x.value(), hit->point.y.value())) < 1e-9);
  }
}

TEST_CASE("hat_intersect boundary examples") {
  auto h = hat_intersect({1.0, 0.5}, Contour::horizontal(2, 1));
  REQUIRE(h);
  CHECK(h->point.x.is_infinite());
  CHECK(h->point.y == ExtendedReal(1.0));
  auto v = hat_intersect({0.0, 0.5}, Contour::vertical(2, 1));
  REQUIRE(v);
  CHECK(v->point.x == ExtendedReal(2.0));
  CHECK(v->point.y.is_infinite());
  CHECK_FALSE(hat_intersect({0.0, 3.0}, Contour::vertical(2, 1)));
  auto hb = hat_intersect({0.0, 3.0}, Contour::horizontal(2, 1));
  REQUIRE(hb);
  CHECK(hb->point == ExtendedPoint{3.0, 1.0});
  CHECK_FALSE(hat_intersect({0.0, 1.0}, Contour::horizontal(2, 1)));
}

TEST_CASE("hat_intersect equals the numerical limit of intersect") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> s(-2, 2);
  int compared = 0;
  for (int t = 0; t < 400; ++t) {
    Contour c = t % 3 == 0   ? Contour::vertical(s(rng), s(rng))
                : t % 3 == 1 ? Contour::horizontal(s(rng), s(rng))
                             : random_proper(rng, 6);
    for (double target : {0.0, 1.0}) {
      const double b = s(rng);
      const auto lim = numeric_limit(c, target, b);
      const auto hat = hat_intersect({target, b}, c);
      if (!lim) continue;
      // stabilized limit: the last samples agree
      REQUIRE(hat);
      ++compared;
      for (int k = 0; k < 2; ++k) {
        const auto& lv = k == 0 ? lim->x : lim->y;
        const auto& hv = k == 0 ? hat->point.x : hat->point.y;
        if (hv.is_infinite()) {
          CHECK(std::abs(lv.value()) > 1e3);
        } else {
          CHECK(std::abs(lv.value() - hv.value()) < 1e-4 * (1 + std::abs(hv.value())));
        }
      }
    }
  }
  CHECK(compared > 100);
}

TEST_CASE("threshold slope") {
  CHECK(threshold_slope(Contour::horizontal(2, 2), 0) == doctest::Approx(0.5));
  CHECK(threshold_slope(Contour::horizontal(3, 1), 1) == doctest::Approx(0.5));
  const auto h = Contour::horizontal(1, 1);
  CHECK_FALSE(intersect({0.49, 0}, h));
  CHECK(intersect({0.51, 0}, h));
  CHECK_THROWS_AS(threshold_slope(Contour::horizontal(1, 1), 2), Error);
  CHECK_THROWS_AS(threshold_slope(Contour::vertical(1, 1), 0), Error);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-3, 3), d(0.01, 3);
  for (int t = 0; t < 100; ++t) {
    const double b = u(rng), x0 = b + d(rng), y0 = -b + d(rng);
    const double A = threshold_slope(Contour::horizontal(x0, y0), b);
    CHECK(std::abs(A - (x0 - b) / (x0 + y0)) < 1e-9);
    CHECK_FALSE(intersect({A * (1 - 1e-6), b}, Contour::horizontal(x0, y0)));
    CHECK(intersect({std::min(A + 1e-6, 1 - 1e-9), b}, Contour::horizontal(x0, y0)));
  }
}

TEST_CASE("candidate coordinates") {
  const LineParam l(0.5, 0);
  CHECK(*candidate_x_form(l, {3.0, 3.0}) == 3.0);
  CHECK(*candidate_y_form(l, {3.0, 3.0}) == 3.0);
  CHECK(*candidate_x_form({0.5, 1}, {3.0, 1.0}) == 2.0);
  CHECK(*candidate_y_form({0.5, 1}, {3.0, 1.0}) == 2.0);
  CHECK(*candidate_coordinate({0.0, 1}, {3.0, ExtendedReal::infinity()}) == 2.0);
  CHECK_FALSE(candidate_x_form({1.0, 0}, {3.0, 1.0}));
  CHECK_FALSE(candidate_y_form({0.0, 0}, {3.0, 1.0}));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(0.01, 0.99), s(-3, 3);
  for (int t = 0; t < 1000; ++t) {
    const LineParam line(ua(rng), s(rng));
    const auto p = point_on_line(line, s(rng));
    CHECK(std::abs(*candidate_x_form(line, p) - *candidate_y_form(line, p)) < 1e-9);
  }
}

TEST_CASE("position check") {
  PersistenceDiagram empty(0);
  CHECK(position_check(empty, {}, 0.1).pass);
  PersistenceDiagram d(0);
  d.add_proper(1.0, 2.0);
  d.add_essential(0.5);
  std::vector<PositionCandidate> cands(3);
  cands[0].w = 1.0, cands[1].w = 2.0, cands[2].w = 0.5;
  CHECK(position_check(d, cands, 1e-9).pass);
  for (auto& c : cands) c.w += 10 * 0.01;
  const auto r = position_check(d, cands, 0.01);
  CHECK_FALSE(r.pass);
  CHECK(r.violations.size() == 3);
}

TEST_CASE("analytic sphere grid") {
  const auto g = analytic_sphere_grid(1.0);
  CHECK(g.vertical_count() == 2);
  CHECK(g.horizontal_count() == 2);
  CHECK(g.proper_count() == 2);
  for (const auto& c : g.contours)
    if (c.is_proper()) CHECK(is_monotone_polyline(c.polyline()));
  // vertical at the min of phi1, horizontal at the min of phi2
  double min_v = 1e9, min_h = 1e9;
  for (const auto& c : g.contours) {
    if (c.kind() == ContourKind::ImproperVertical) min_v = std::min(min_v, c.base().x);
    if (c.kind() == ContourKind::ImproperHorizontal) min_h = std::min(min_h, c.base().y);
  }
  CHECK(min_v == doctest::Approx(-1.0));
  CHECK(min_h == doctest::Approx(-1.0));

  const auto s = analytic_sphere_grid(1.0, {0.25, 0, 0});
  REQUIRE(s.contours.size() == g.contours.size());
  for (std::size_t i = 0; i < g.contours.size(); ++i) {
    const auto& a = g.contours[i];
    const auto& b = s.contours[i];
    if (a.is_proper()) {
      REQUIRE(a.polyline().size() == b.polyline().size());
      for (std::size_t k = 0; k < a.polyline().size(); ++k) {
        CHECK(b.polyline()[k].x == doctest::Approx(a.polyline()[k].x + 0.25));
        CHECK(b.polyline()[k].y == doctest::Approx(a.polyline()[k].y));
      }
    } else {
      CHECK(b.base().x == doctest::Approx(a.base().x + 0.25));
    }
  }
}

TEST_CASE("analytic grids agree with the meshes") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ua(0.02, 0.98), ub(-1.2, 1.2);
  const auto cx = make_sphere(32, 1.0);
  const auto grid = analytic_sphere_grid(1.0);
  for (int i = 0; i < 10; ++i) {
    const LineParam line(ua(rng), ub(rng));
    const auto cands = position_candidates(grid, line);
    const double tol = 2 * max_edge_gap(cx, line);
    for (const auto& d : compute_diagram(cx, line)) CHECK(position_check(d, cands, tol).pass);
  }
  const auto torus = make_torus(24, 2.0, 0.7, {0.3, 0.2});
  const auto tgrid = analytic_torus_grid(2.0, 0.7, {0.3, 0.2});
  CHECK(tgrid.proper_count() == 4);
  CHECK(tgrid.vertical_count() == 4);
  CHECK(tgrid.horizontal_count() == 4);
  for (const auto& line : {LineParam(0.5, 0.0), LineParam(0.0, 0.3), LineParam(1.0, -0.4)}) {
    const auto cands = position_candidates(tgrid, line);
    const double tol = 2 * max_edge_gap(torus, line);
    for (const auto& d : compute_diagram(torus, line)) CHECK(position_check(d, cands, tol).pass);
  }
  CHECK_THROWS_AS(analytic_sphere_grid(-1.0), Error);
}

}
