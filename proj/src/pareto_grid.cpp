#include "mdist/pareto_grid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace mdist {

namespace {

constexpr double kSnap = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

double segment_slope(const Point2& p, const Point2& q) {
  const double dx = q.x - p.x, dy = q.y - p.y;
  if (dx == 0.0) return -kInf;
  if (dy == 0.0) return 0.0;
  return dy / dx;
}

}  // namespace

bool is_monotone_polyline(const std::vector<Point2>& poly) {
  if (poly.size() < 2) return false;
  bool up = true, down = true;  // y non-decreasing & x non-increasing, or the reverse
  for (std::size_t i = 1; i < poly.size(); ++i) {
    const double dx = poly[i].x - poly[i - 1].x;
    const double dy = poly[i].y - poly[i - 1].y;
    if (dx * dy > 0.0) return false;
    if (dy < 0.0 || dx > 0.0) up = false;
    if (dy > 0.0 || dx < 0.0) down = false;
  }
  return up || down;
}

Contour Contour::proper(std::vector<Point2> poly, FunctionTag tag) {
  for (const auto& p : poly)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw Error("contour: proper polyline points must be finite");
  poly.erase(std::unique(poly.begin(), poly.end()), poly.end());
  if (poly.size() < 2) throw Error("contour: proper polyline needs two distinct points");
  if (!is_monotone_polyline(poly))
    throw Error("contour: polyline is not monotone (a segment has positive slope)");
  const Point2 f = poly.front(), l = poly.back();
  if (l.y < f.y || (l.y == f.y && l.x > f.x)) std::reverse(poly.begin(), poly.end());
  Contour c;
  c.kind_ = ContourKind::Proper;
  c.tag_ = tag;
  c.polyline_ = std::move(poly);
  for (std::size_t i = 1; i < c.polyline_.size(); ++i)
    c.slopes_.push_back(segment_slope(c.polyline_[i - 1], c.polyline_[i]));
  return c;
}

Contour Contour::vertical(double x0, double y0, FunctionTag tag) {
  if (!std::isfinite(x0) || !std::isfinite(y0)) throw Error("contour: base must be finite");
  Contour c;
  c.kind_ = ContourKind::ImproperVertical;
  c.tag_ = tag;
  c.base_ = {x0, y0};
  return c;
}

Contour Contour::horizontal(double x0, double y0, FunctionTag tag) {
  if (!std::isfinite(x0) || !std::isfinite(y0)) throw Error("contour: base must be finite");
  Contour c;
  c.kind_ = ContourKind::ImproperHorizontal;
  c.tag_ = tag;
  c.base_ = {x0, y0};
  return c;
}

std::vector<Point2> Contour::endpoints() const {
  if (is_proper()) return {polyline_.front(), polyline_.back()};
  return {base_};
}

std::size_t ExtendedParetoGrid::proper_count() const {
  return std::count_if(contours.begin(), contours.end(),
                       [](const Contour& c) { return c.kind() == ContourKind::Proper; });
}
std::size_t ExtendedParetoGrid::vertical_count() const {
  return std::count_if(contours.begin(), contours.end(), [](const Contour& c) {
    return c.kind() == ContourKind::ImproperVertical;
  });
}
std::size_t ExtendedParetoGrid::horizontal_count() const {
  return std::count_if(contours.begin(), contours.end(), [](const Contour& c) {
    return c.kind() == ContourKind::ImproperHorizontal;
  });
}

namespace {

Intersection make_hit(double x, double y, double slope, int segment) {
  Intersection hit;
  hit.point = {x, y};
  hit.slope = slope;
  hit.segment = segment;
  return hit;
}

void snap_to_endpoints(Intersection& hit, const Contour& c) {
  const double x = hit.point.x.value(), y = hit.point.y.value();
  for (const auto& e : c.endpoints()) {
    if (std::abs(x - e.x) <= kSnap && std::abs(y - e.y) <= kSnap) {
      hit.point = {e.x, e.y};
      hit.at_endpoint = true;
      return;
    }
  }
}

// Crossing of a monotone polyline with a level set of a monotone quantity.
// `side(p)` must be non-increasing along the polyline.
std::optional<Intersection> polyline_crossing(const Contour& c,
                                              const std::function<double(const Point2&)>& side) {
  const auto& poly = c.polyline();
  const auto& slopes = c.segment_slopes();
  const int n = static_cast<int>(poly.size());
  const double s0 = side(poly.front()), s1 = side(poly.back());
  if (s0 < 0.0 || s1 > 0.0) return std::nullopt;
  if (s0 == 0.0 && s1 == 0.0) throw Error("intersect: contour lies on the filtering line");
  // first vertex with side <= 0
  int lo = 0, hi = n - 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (side(poly[mid]) <= 0.0)
      hi = mid;
    else
      lo = mid + 1;
  }
  const int k = lo;
  const double sk = side(poly[k]);
  if (sk == 0.0) {
    if ((k + 1 < n && side(poly[k + 1]) == 0.0) || (k > 0 && side(poly[k - 1]) == 0.0))
      throw Error("intersect: a contour segment lies on the filtering line");
    const int seg = k > 0 ? k - 1 : 0;
    return make_hit(poly[k].x, poly[k].y, slopes[seg], seg);
  }
  const double sp = side(poly[k - 1]);
  const double t = sp / (sp - sk);
  const Point2& p = poly[k - 1];
  const Point2& q = poly[k];
  return make_hit(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y), slopes[k - 1], k - 1);
}

// Intersection with a vertical segment at x = b (a -> 0) or a horizontal one
// at y = -b (a -> 1): the limit point is (b, -b) clamped to the segment.
std::optional<Intersection> boundary_crossing(const Contour& c, const LineParam& line) {
  const auto& poly = c.polyline();
  const auto& slopes = c.segment_slopes();
  const int n = static_cast<int>(poly.size());
  if (line.a == 0.0) {
    // x is non-increasing along the polyline
    const double b = line.b;
    if (poly.front().x < b || poly.back().x > b) return std::nullopt;
    for (int k = 1; k < n; ++k) {
      const Point2 &p = poly[k - 1], &q = poly[k];
      if (q.x > b) continue;
      if (p.x == b && q.x == b) {
        const double y = std::clamp(-b, p.y, q.y);
        return make_hit(b, y, slopes[k - 1], k - 1);
      }
      if (p.x == b) return make_hit(b, p.y, slopes[k - 1], k - 1);
      const double t = (p.x - b) / (p.x - q.x);
      return make_hit(b, p.y + t * (q.y - p.y), slopes[k - 1], k - 1);
    }
    return make_hit(b, poly.front().y, slopes.front(), 0);
  }
  // a == 1: y is non-decreasing along the polyline
  const double yl = -line.b;
  if (poly.front().y > yl || poly.back().y < yl) return std::nullopt;
  for (int k = 1; k < n; ++k) {
    const Point2 &p = poly[k - 1], &q = poly[k];
    if (q.y < yl) continue;
    if (p.y == yl && q.y == yl) {
      const double x = std::clamp(line.b, q.x, p.x);
      return make_hit(x, yl, slopes[k - 1], k - 1);
    }
    if (p.y == yl) return make_hit(p.x, yl, slopes[k - 1], k - 1);
    const double t = (yl - p.y) / (q.y - p.y);
    return make_hit(p.x + t * (q.x - p.x), yl, slopes[k - 1], k - 1);
  }
  return make_hit(poly.back().x, yl, slopes.back(), n - 2);
}

}  // namespace

std::optional<Intersection> intersect(const LineParam& line, const Contour& c) {
  const double a = line.a, b = line.b;
  if (a <= 0.0 || a >= 1.0) throw Error("intersect: requires 0 < a < 1 (use hat_intersect)");
  std::optional<Intersection> hit;
  switch (c.kind()) {
    case ContourKind::ImproperVertical: {
      const auto [x0, y0] = c.base();
      const double y = (1.0 - a) * (x0 - b) / a - b;
      if (y < y0 - kSnap) return std::nullopt;
      hit = make_hit(x0, std::max(y, y0), -kInf, -1);
      break;
    }
    case ContourKind::ImproperHorizontal: {
      const auto [x0, y0] = c.base();
      const double x = a * (y0 + b) / (1.0 - a) + b;
      if (x < x0 - kSnap) return std::nullopt;
      hit = make_hit(std::max(x, x0), y0, 0.0, -1);
      break;
    }
    case ContourKind::Proper:
      hit = polyline_crossing(c, [&](const Point2& p) { return line_side(line, p.x, p.y); });
      break;
  }
  if (hit) snap_to_endpoints(*hit, c);
  return hit;
}

std::optional<Intersection> hat_intersect(const LineParam& line, const Contour& c) {
  if (!line.is_boundary()) return intersect(line, c);
  const double b = line.b;
  const auto base = c.base();
  std::optional<Intersection> hit;
  if (line.a == 0.0) {
    switch (c.kind()) {
      case ContourKind::ImproperVertical:
        if (base.x < b) return std::nullopt;
        hit = Intersection{{base.x, ExtendedReal::infinity()}, -kInf, -1, false};
        return hit;
      case ContourKind::ImproperHorizontal:
        if (b < base.x) return std::nullopt;
        hit = make_hit(b, base.y, 0.0, -1);
        break;
      case ContourKind::Proper: hit = boundary_crossing(c, line); break;
    }
  } else {
    switch (c.kind()) {
      case ContourKind::ImproperHorizontal:
        if (base.y < -b) return std::nullopt;
        hit = Intersection{{ExtendedReal::infinity(), base.y}, 0.0, -1, false};
        return hit;
      case ContourKind::ImproperVertical:
        if (-b < base.y) return std::nullopt;
        hit = make_hit(base.x, -b, -kInf, -1);
        break;
      case ContourKind::Proper: hit = boundary_crossing(c, line); break;
    }
  }
  if (hit) snap_to_endpoints(*hit, c);
  return hit;
}

double threshold_slope(const Contour& h, double b) {
  if (h.kind() != ContourKind::ImproperHorizontal)
    throw Error("threshold_slope: requires an improper horizontal contour");
  const auto [x0, y0] = h.base();
  if (!(x0 > b) || !(y0 > -b)) throw Error("threshold_slope: requires x0 > b and y0 > -b");
  return (x0 - b) / (x0 + y0);
}

std::optional<double> candidate_x_form(const LineParam& line, const ExtendedPoint& p) {
  if (line.a >= 1.0 || !p.x.is_finite()) return std::nullopt;
  const double a = line.a;
  const double factor = a == 0.0 ? 1.0 : std::min(1.0, (1.0 - a) / a);
  return factor * (p.x.value() - line.b);
}

std::optional<double> candidate_y_form(const LineParam& line, const ExtendedPoint& p) {
  if (line.a <= 0.0 || !p.y.is_finite()) return std::nullopt;
  const double a = line.a;
  const double factor = a == 1.0 ? 1.0 : std::min(1.0, a / (1.0 - a));
  return factor * (p.y.value() + line.b);
}

std::optional<double> candidate_coordinate(const LineParam& line, const ExtendedPoint& p) {
  if (line.a <= 0.5) {
    if (auto w = candidate_x_form(line, p)) return w;
    return candidate_y_form(line, p);
  }
  if (auto w = candidate_y_form(line, p)) return w;
  return candidate_x_form(line, p);
}

std::vector<PositionCandidate> position_candidates(
    const std::vector<const ExtendedParetoGrid*>& grids, const LineParam& line) {
  std::vector<PositionCandidate> out;
  for (std::size_t g = 0; g < grids.size(); ++g) {
    const auto& contours = grids[g]->contours;
    for (std::size_t i = 0; i < contours.size(); ++i) {
      const auto hit = hat_intersect(line, contours[i]);
      if (!hit) continue;
      if (const auto w = candidate_coordinate(line, hit->point))
        out.push_back({*w, g, i, hit->point});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PositionCandidate& l, const PositionCandidate& r) { return l.w < r.w; });
  return out;
}

std::vector<PositionCandidate> position_candidates(const ExtendedParetoGrid& grid1,
                                                   const ExtendedParetoGrid& grid2,
                                                   const LineParam& line) {
  return position_candidates(std::vector<const ExtendedParetoGrid*>{&grid1, &grid2}, line);
}

std::vector<PositionCandidate> position_candidates(const ExtendedParetoGrid& grid,
                                                   const LineParam& line) {
  return position_candidates(std::vector<const ExtendedParetoGrid*>{&grid}, line);
}

PositionReport position_check(const PersistenceDiagram& diagram,
                              const std::vector<PositionCandidate>& candidates, double tol) {
  PositionReport report;
  auto nearest = [&](double w) {
    double best = kInf;
    for (const auto& c : candidates) best = std::min(best, std::abs(c.w - w));
    return best;
  };
  auto check = [&](const DiagramPoint& p, double w) {
    ++report.checked;
    const double gap = nearest(w);
    report.worst_gap = std::max(report.worst_gap, gap);
    if (gap > tol) report.violations.push_back({p, w, gap});
  };
  for (const auto& p : diagram.points()) {
    if (p.is_delta()) continue;
    check(p, p.birth);
    if (p.is_proper()) check(p, p.death);
  }
  report.pass = report.violations.empty();
  return report;
}

// --- analytic grids of surface projections onto the (x, z) plane ---------
//
// On a surface in R^3 projected to (x, z), the gradients of the two
// coordinate functions are parallel exactly where the normal has no y
// component. There both gradients are multiples of w = n x e_y, and they are
// opposite (Pareto) iff n_x n_z >= 0. Critical points of x (resp. z) are the
// points of that curve where n_z = 0 (resp. n_x = 0); cusps of the image
// occur where the curve is tangent to e_y.

namespace {

struct LoopSample {
  Vec3 p;
  Vec3 n;
};

using Loop = std::function<LoopSample(double)>;

double bisect_root(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void grid_from_loops(const std::vector<Loop>& loops, int samples, int samples_per_piece,
                     ExtendedParetoGrid& grid) {
  const double two_pi = 2.0 * M_PI;
  for (const auto& loop : loops) {
    auto nx = [&](double s) { return loop(s).n.x; };
    auto nz = [&](double s) { return loop(s).n.z; };
    auto tangency = [&](double s) {
      const double h = 1e-6;
      const auto q = loop(s);
      const auto p1 = loop(s + h), p0 = loop(s - h);
      // w . gamma'(s) with w = (-n_z, 0, n_x)
      return (-q.n.z * (p1.p.x - p0.p.x) + q.n.x * (p1.p.z - p0.p.z)) / (2 * h);
    };

    struct Break {
      double s;
      int type;  // 0: critical of x, 1: critical of z, 2: cusp
    };
    std::vector<Break> breaks;
    const std::function<double(double)> fns[3] = {nz, nx, tangency};
    for (int type = 0; type < 3; ++type) {
      double prev = fns[type](0.0);
      for (int i = 1; i <= samples; ++i) {
        const double s = two_pi * i / samples;
        const double cur = fns[type](s);
        if (prev == 0.0) {
          breaks.push_back({two_pi * (i - 1) / samples, type});
        } else if ((prev < 0.0) != (cur < 0.0) && cur != 0.0) {
          breaks.push_back({bisect_root(fns[type], two_pi * (i - 1) / samples, s), type});
        }
        prev = cur;
      }
    }
    for (const auto& br : breaks) {
      const auto q = loop(br.s);
      if (br.type == 0) grid.contours.push_back(Contour::vertical(q.p.x, q.p.z));
      if (br.type == 1) grid.contours.push_back(Contour::horizontal(q.p.x, q.p.z));
    }
    if (breaks.empty()) continue;
    std::sort(breaks.begin(), breaks.end(),
              [](const Break& l, const Break& r) { return l.s < r.s; });
    for (std::size_t k = 0; k < breaks.size(); ++k) {
      const double s0 = breaks[k].s;
      double s1 = k + 1 < breaks.size() ? breaks[k + 1].s : breaks[0].s + two_pi;
      if (s1 - s0 < 1e-12) continue;
      const auto mid = loop(0.5 * (s0 + s1));
      if (mid.n.x * mid.n.z <= 0.0) continue;
      std::vector<Point2> poly;
      for (int i = 0; i <= samples_per_piece; ++i) {
        const auto q = loop(s0 + (s1 - s0) * i / samples_per_piece);
        poly.push_back({q.p.x, q.p.z});
      }
      // the sampled arc is monotone up to rounding at the ends
      for (std::size_t i = 1; i < poly.size(); ++i) {
        const double dx = poly[i].x - poly[i - 1].x, dy = poly[i].y - poly[i - 1].y;
        if (dx * dy > 0.0) {
          if (std::abs(dx) < std::abs(dy))
            poly[i].x = poly[i - 1].x;
          else
            poly[i].y = poly[i - 1].y;
        }
      }
      grid.contours.push_back(Contour::proper(std::move(poly)));
    }
  }
}

}  // namespace

ExtendedParetoGrid analytic_sphere_grid(double radius, const Vec3& center, int samples_per_arc) {
  if (!(radius > 0.0)) throw Error("sphere grid: radius must be positive");
  if (samples_per_arc < 2) throw Error("sphere grid: need at least 2 samples per arc");
  const Loop equator = [=](double s) {
    const Vec3 n{std::cos(s), 0.0, std::sin(s)};
    return LoopSample{{center.x + radius * n.x, center.y, center.z + radius * n.z}, n};
  };
  ExtendedParetoGrid grid;
  grid_from_loops({equator}, 64, samples_per_arc, grid);
  return grid;
}

ExtendedParetoGrid analytic_torus_grid(double major, double minor, const Orientation& o,
                                       const Vec3& center, int samples) {
  if (!(minor > 0.0) || !(major > minor)) throw Error("torus grid: need 0 < minor < major");
  const Vec3 axis = rotate(o, {0, 1, 0});
  const Vec3 e1 = rotate(o, {1, 0, 0});
  const Vec3 e2 = rotate(o, {0, 0, 1});
  if (std::abs(axis.y) < 1e-9) throw Error("torus grid: axis orthogonal to the view direction");
  std::vector<Loop> loops;
  for (int branch = 0; branch < 2; ++branch) {
    loops.push_back([=](double u) {
      const Vec3 rho{std::cos(u) * e1.x + std::sin(u) * e2.x,
                     std::cos(u) * e1.y + std::sin(u) * e2.y,
                     std::cos(u) * e1.z + std::sin(u) * e2.z};
      const double v = std::atan2(-rho.y, axis.y) + (branch ? M_PI : 0.0);
      const double cv = std::cos(v), sv = std::sin(v);
      const Vec3 n{cv * rho.x + sv * axis.x, cv * rho.y + sv * axis.y, cv * rho.z + sv * axis.z};
      const double rr = major + minor * cv;
      const Vec3 p{center.x + rr * rho.x + minor * sv * axis.x,
                   center.y + rr * rho.y + minor * sv * axis.y,
                   center.z + rr * rho.z + minor * sv * axis.z};
      return LoopSample{p, n};
    });
  }
  ExtendedParetoGrid grid;
  grid_from_loops(loops, samples, std::max(16, samples / 16), grid);
  return grid;
}

}  // namespace mdist
