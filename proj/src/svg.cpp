#include "mdist/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mdist {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr double kPanelW = 420, kPanelH = 360, kMargin = 60, kGap = 40;

const char* kGridColors[] = {"#1f4e9c", "#c0392b"};

struct Bounds {
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -std::numeric_limits<double>::infinity();
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();

  void add(double x, double y) {
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  }
  bool empty() const { return !(x_min <= x_max); }
  void pad(double frac, double fallback_lo, double fallback_hi) {
    if (empty()) {
      x_min = y_min = fallback_lo;
      x_max = y_max = fallback_hi;
    }
    double dx = x_max - x_min, dy = y_max - y_min;
    if (dx <= 0) dx = 1;
    if (dy <= 0) dy = 1;
    x_min -= frac * dx;
    x_max += frac * dx;
    y_min -= frac * dy;
    y_max += frac * dy;
  }
};

std::string heat(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255 + (128 - 255) * t));
  const int g = static_cast<int>(std::lround(255 + (0 - 255) * t));
  const int b = static_cast<int>(std::lround(204 + (38 - 204) * t));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

// Portion of r_(a,b) inside the panel window, if any.
bool clip_line(const LineParam& l, const SvgPanel& p, Point2& from, Point2& to) {
  if (l.a == 0.0) {
    if (l.b < p.x_min() || l.b > p.x_max()) return false;
    from = {l.b, p.y_min()};
    to = {l.b, p.y_max()};
    return true;
  }
  if (l.a == 1.0) {
    if (-l.b < p.y_min() || -l.b > p.y_max()) return false;
    from = {p.x_min(), -l.b};
    to = {p.x_max(), -l.b};
    return true;
  }
  // x = t a + b, y = t (1 - a) - b with both directions increasing in t.
  const double t0 = std::max((p.x_min() - l.b) / l.a, (p.y_min() + l.b) / (1 - l.a));
  const double t1 = std::min((p.x_max() - l.b) / l.a, (p.y_max() + l.b) / (1 - l.a));
  if (t0 > t1) return false;
  from = {t0 * l.a + l.b, t0 * (1 - l.a) - l.b};
  to = {t1 * l.a + l.b, t1 * (1 - l.a) - l.b};
  return true;
}

}  // namespace

SvgPanel::SvgPanel(double left, double top, double width, double height, double x_min,
                   double x_max, double y_min, double y_max)
    : left_(left), top_(top), width_(width), height_(height), x_min_(x_min), x_max_(x_max),
      y_min_(y_min), y_max_(y_max) {
  if (!(x_max > x_min) || !(y_max > y_min)) throw Error("svg: empty panel range");
}

double SvgPanel::px(double x) const { return left_ + (x - x_min_) / (x_max_ - x_min_) * width_; }
double SvgPanel::py(double y) const {
  return top_ + height_ - (y - y_min_) / (y_max_ - y_min_) * height_;
}

void SvgPanel::axes(const std::string& x_label, const std::string& y_label) {
  body_ += "<rect x=\"" + fmt(left_) + "\" y=\"" + fmt(top_) + "\" width=\"" + fmt(width_) +
           "\" height=\"" + fmt(height_) + "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = x_min_ + (x_max_ - x_min_) * k / 4.0;
    const double y = y_min_ + (y_max_ - y_min_) * k / 4.0;
    body_ += "<text x=\"" + fmt(px(x)) + "\" y=\"" + fmt(top_ + height_ + 14) +
             "\" font-size=\"10\" text-anchor=\"middle\">" + label_number(x) + "</text>\n";
    body_ += "<text x=\"" + fmt(left_ - 4) + "\" y=\"" + fmt(py(y) + 3) +
             "\" font-size=\"10\" text-anchor=\"end\">" + label_number(y) + "</text>\n";
  }
  body_ += "<text x=\"" + fmt(left_ + width_ / 2) + "\" y=\"" + fmt(top_ + height_ + 30) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + escape(x_label) + "</text>\n";
  body_ += "<text x=\"" + fmt(left_ - 42) + "\" y=\"" + fmt(top_ + height_ / 2) +
           "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 " +
           fmt(left_ - 42) + " " + fmt(top_ + height_ / 2) + ")\">" + escape(y_label) +
           "</text>\n";
}

void SvgPanel::title(const std::string& text) {
  body_ += "<text x=\"" + fmt(left_ + width_ / 2) + "\" y=\"" + fmt(top_ - 10) +
           "\" font-size=\"13\" text-anchor=\"middle\">" + escape(text) + "</text>\n";
}

void SvgPanel::segment(double x0, double y0, double x1, double y1, const std::string& stroke,
                       double width, bool dashed) {
  body_ += "<line x1=\"" + fmt(px(x0)) + "\" y1=\"" + fmt(py(y0)) + "\" x2=\"" + fmt(px(x1)) +
           "\" y2=\"" + fmt(py(y1)) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
           fmt(width) + "\"" + (dashed ? " stroke-dasharray=\"4 3\"" : "") + "/>\n";
}

void SvgPanel::polyline(const std::vector<Point2>& pts, const std::string& stroke, double width) {
  body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(width) +
           "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i)
    body_ += (i ? " " : "") + fmt(px(pts[i].x)) + "," + fmt(py(pts[i].y));
  body_ += "\"/>\n";
}

void SvgPanel::dot(double x, double y, double r, const std::string& fill) {
  body_ += "<circle cx=\"" + fmt(px(x)) + "\" cy=\"" + fmt(py(y)) + "\" r=\"" + fmt(r) +
           "\" fill=\"" + fill + "\"/>\n";
}

void SvgPanel::square(double x, double y, double half, const std::string& fill) {
  body_ += "<rect x=\"" + fmt(px(x) - half) + "\" y=\"" + fmt(py(y) - half) + "\" width=\"" +
           fmt(2 * half) + "\" height=\"" + fmt(2 * half) + "\" fill=\"" + fill + "\"/>\n";
}

void SvgPanel::cell(double x0, double y0, double x1, double y1, const std::string& fill) {
  const double l = std::min(px(x0), px(x1)), r = std::max(px(x0), px(x1));
  const double t = std::min(py(y0), py(y1)), b = std::max(py(y0), py(y1));
  body_ += "<rect x=\"" + fmt(l) + "\" y=\"" + fmt(t) + "\" width=\"" + fmt(r - l) +
           "\" height=\"" + fmt(b - t) + "\" fill=\"" + fill + "\"/>\n";
}

void SvgPanel::legend(int row, const std::string& color, const std::string& label) {
  const double x = left_ + width_ - 110, y = top_ + 14 + 14 * row;
  body_ += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y - 8) +
           "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
  body_ += "<text x=\"" + fmt(x + 14) + "\" y=\"" + fmt(y) + "\" font-size=\"10\">" +
           escape(label) + "</text>\n";
}

std::string svg_document(double width, double height, const std::vector<const SvgPanel*>& panels) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" +
         fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) +
         "\" font-family=\"sans-serif\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto* p : panels) out += p->body();
  out += "</svg>\n";
  return out;
}

// --- grids ------------------------------------------------------------------

std::string render_grids(const std::vector<const ExtendedParetoGrid*>& grids,
                         const std::vector<LineParam>& lines) {
  Bounds bb;
  for (const auto* g : grids)
    for (const auto& c : g->contours) {
      if (c.is_proper())
        for (const auto& p : c.polyline()) bb.add(p.x, p.y);
      else
        bb.add(c.base().x, c.base().y);
    }
  bb.pad(0.15, -1, 1);
  SvgPanel panel(kMargin, kMargin, kPanelW, kPanelH, bb.x_min, bb.x_max, bb.y_min, bb.y_max);
  panel.title("extended Pareto grid");
  panel.axes("phi1", "phi2");
  for (std::size_t gi = 0; gi < grids.size(); ++gi) {
    const std::string color = kGridColors[gi % 2];
    for (const auto& c : grids[gi]->contours) {
      switch (c.kind()) {
        case ContourKind::Proper:
          panel.polyline(c.polyline(), color, 2.0);
          break;
        case ContourKind::ImproperVertical:
          panel.segment(c.base().x, c.base().y, c.base().x, bb.y_max, color, 1.5, true);
          panel.dot(c.base().x, c.base().y, 2.5, color);
          break;
        case ContourKind::ImproperHorizontal:
          panel.segment(c.base().x, c.base().y, bb.x_max, c.base().y, color, 1.5, true);
          panel.dot(c.base().x, c.base().y, 2.5, color);
          break;
      }
    }
    panel.legend(static_cast<int>(gi), color, "grid " + std::to_string(gi + 1));
  }
  for (const auto& l : lines) {
    Point2 from, to;
    if (clip_line(l, panel, from, to)) panel.segment(from.x, from.y, to.x, to.y, "#2e8b57", 1.0);
  }
  return svg_document(kPanelW + 2 * kMargin, kPanelH + 2 * kMargin, {&panel});
}

// --- diagrams ---------------------------------------------------------------

std::string render_diagrams(const PersistenceDiagram& first, const PersistenceDiagram* second) {
  Bounds bb;
  const PersistenceDiagram* ds[2] = {&first, second};
  for (const auto* d : ds) {
    if (!d) continue;
    for (const auto& p : d->points()) {
      if (p.is_delta()) continue;
      bb.add(p.birth, p.birth);
      if (p.is_proper()) bb.add(p.death, p.death);
    }
  }
  if (bb.empty()) bb.add(0, 0), bb.add(1, 1);
  double lo = std::min(bb.x_min, bb.y_min), hi = std::max(bb.x_max, bb.y_max);
  if (hi <= lo) hi = lo + 1;
  const double span = hi - lo;
  const double inf_y = hi + 0.1 * span;
  SvgPanel panel(kMargin, kMargin, kPanelW, kPanelH, lo - 0.05 * span, hi + 0.05 * span,
                 lo - 0.05 * span, hi + 0.18 * span);
  panel.title("persistence diagram" + std::string(second ? "s" : "") + ", degree " +
              std::to_string(first.degree()));
  panel.axes("birth", "death");
  panel.segment(panel.x_min(), panel.x_min(), panel.x_max(), panel.x_max(), "#888", 1.0);
  panel.segment(panel.x_min(), inf_y, panel.x_max(), inf_y, "#888", 0.8, true);

  auto coords = [&](const DiagramPoint& p, const DiagramPoint& other) -> Point2 {
    if (p.is_delta()) {
      const double u = other.birth;
      const double v = other.is_proper() ? other.death : u;
      return {(u + v) / 2, (u + v) / 2};
    }
    return {p.birth, p.is_proper() ? p.death : inf_y};
  };
  if (second) {
    const auto m = bottleneck(first, *second);
    for (const auto& pr : m.pairs) {
      if (pr.source.is_delta() && pr.target.is_delta()) continue;
      const Point2 s = coords(pr.source, pr.target), t = coords(pr.target, pr.source);
      panel.segment(s.x, s.y, t.x, t.y, "#2e8b57", 1.2);
    }
  }
  for (int k = 0; k < 2; ++k) {
    if (!ds[k]) continue;
    for (const auto& p : ds[k]->points()) {
      if (p.is_delta()) continue;
      const Point2 c = coords(p, p);
      if (k == 0)
        panel.dot(c.x, c.y, 3.5 + std::min(p.multiplicity - 1, 4), kGridColors[0]);
      else
        panel.square(c.x, c.y, 3.0 + std::min(p.multiplicity - 1, 4), kGridColors[1]);
    }
    panel.legend(k, kGridColors[k], k == 0 ? "first" : "second");
  }
  return svg_document(kPanelW + 2 * kMargin, kPanelH + 2 * kMargin, {&panel});
}

// --- candidates -------------------------------------------------------------

std::string render_candidates(const std::vector<CandidateSample>& samples, double b_min,
                              double b_max) {
  if (!(b_max > b_min)) b_min = -1, b_max = 1;
  SvgPanel panel(kMargin, kMargin, kPanelW, kPanelH, 0.0, 1.0, b_min, b_max);
  panel.title("candidate parameters");
  panel.axes("a", "b");
  panel.segment(0.5, b_min, 0.5, b_max, "#888", 1.0, true);
  const std::pair<CandidateKind, const char*> kinds[] = {
      {CandidateKind::Special, "#9e9e9e"},
      {CandidateKind::CurveC, "#2e8b57"},
      {CandidateKind::EndpointFamily, "#e67e22"},
      {CandidateKind::Ultraspecial, "#c0392b"}};
  int row = 0;
  for (const auto& [kind, color] : kinds) {
    std::size_t n = 0;
    for (const auto& s : samples) {
      if (s.kind != kind || s.param.b < b_min || s.param.b > b_max) continue;
      panel.dot(s.param.a, s.param.b, kind == CandidateKind::Ultraspecial ? 2.2 : 1.2, color);
      ++n;
    }
    panel.legend(row++, color, to_string(kind) + " (" + std::to_string(n) + ")");
  }
  return svg_document(kPanelW + 2 * kMargin, kPanelH + 2 * kMargin, {&panel});
}

// --- reports ----------------------------------------------------------------

namespace {

struct ReportPanels {
  SvgPanel cloud;
  SvgPanel profile;
};

ReportPanels report_panels(const EstimateReport& r, double left) {
  double b_min = 0, b_max = 0, c_max = 0;
  for (const auto& lc : r.per_line) {
    b_min = std::min(b_min, lc.line.b);
    b_max = std::max(b_max, lc.line.b);
    if (lc.cost.is_finite()) c_max = std::max(c_max, lc.cost.value());
  }
  if (b_max <= b_min) b_min = -1, b_max = 1;
  if (c_max <= 0) c_max = 1;

  const std::string name = to_string(r.method);
  const std::string value = r.value.is_infinite() ? "inf" : label_number(r.value.value());
  SvgPanel cloud(left, kMargin, kPanelW, kPanelH, 0.0, 1.0, b_min, b_max);
  cloud.title(name + " estimate " + value);
  cloud.axes("a", "b");
  const double cell_a = 0.5 / std::max<std::size_t>(1, r.per_line.size()) + 0.004;
  for (const auto& lc : r.per_line) {
    const std::string color =
        lc.cost.is_infinite() ? std::string("#000000") : heat(lc.cost.value() / c_max);
    cloud.cell(lc.line.a - cell_a, lc.line.b - (b_max - b_min) * cell_a, lc.line.a + cell_a,
               lc.line.b + (b_max - b_min) * cell_a, color);
  }
  cloud.dot(r.realizer.a, r.realizer.b, 4.0, "#1f4e9c");

  // Profile along the parameter column closest to a = 1/2.
  double a_star = 0.5, best = std::numeric_limits<double>::infinity();
  for (const auto& lc : r.per_line)
    if (std::abs(lc.line.a - 0.5) < best) best = std::abs(lc.line.a - 0.5), a_star = lc.line.a;
  std::vector<Point2> prof;
  for (const auto& lc : r.per_line)
    if (lc.line.a == a_star && lc.cost.is_finite()) prof.push_back({lc.line.b, lc.cost.value()});
  std::sort(prof.begin(), prof.end(), [](const Point2& p, const Point2& q) { return p.x < q.x; });
  SvgPanel profile(left, 2 * kMargin + kPanelH + kGap, kPanelW, kPanelH * 0.6, b_min, b_max, 0.0,
                   c_max * 1.1);
  profile.title(name + " profile at a = " + label_number(a_star));
  profile.axes("b", "cost");
  if (!prof.empty()) profile.polyline(prof, "#c0392b", 1.5);
  return {std::move(cloud), std::move(profile)};
}

}  // namespace

std::string render_report(const EstimateReport& report) {
  const auto p = report_panels(report, kMargin);
  return svg_document(kPanelW + 2 * kMargin, 3 * kMargin + kPanelH * 1.6 + kGap + 20,
                      {&p.cloud, &p.profile});
}

std::string render_verify(const VerifyReport& report) {
  const auto n = report_panels(report.naive, kMargin);
  const auto r = report_panels(report.reduced, 2 * kMargin + kPanelW + kGap);
  SvgPanel status(kMargin, 30, 2 * kPanelW + kMargin + kGap, 1, 0, 1, 0, 1);
  status.title(std::string("verification ") + (report.pass ? "passed" : "failed") +
               " at tol " + label_number(report.tol));
  return svg_document(2 * kPanelW + 3 * kMargin + kGap, 3 * kMargin + kPanelH * 1.6 + kGap + 20,
                      {&status, &n.cloud, &n.profile, &r.cloud, &r.profile});
}

}  // namespace mdist
