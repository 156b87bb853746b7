#include "mdist/core_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mdist {

double ExtendedReal::to_double() const { return infinite_ ? HUGE_VAL : value_; }

ExtendedReal operator-(const ExtendedReal& l, const ExtendedReal& r) {
  if (r.infinite_) throw Error("ExtendedReal: subtracting infinity");
  if (l.infinite_) return ExtendedReal::infinity();
  return l.value_ - r.value_;
}

std::string ExtendedReal::to_string() const {
  if (infinite_) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value_);
  return buf;
}

ExtendedReal max(const ExtendedReal& l, const ExtendedReal& r) { return l < r ? r : l; }
ExtendedReal min(const ExtendedReal& l, const ExtendedReal& r) { return r < l ? r : l; }

LineParam::LineParam(double a_, double b_) : a(a_), b(b_) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw Error("LineParam: non-finite parameter");
  if (a < 0.0 || a > 1.0) throw Error("LineParam: a must lie in [0,1]");
}

LineParam RotationSegment::at(double s) const {
  return LineParam(from.a + s * (to.a - from.a), from.b + s * (to.b - from.b));
}

ExtendedReal restrict_value(double phi1, double phi2, const LineParam& line) {
  if (line.a <= 0.0 || line.a >= 1.0)
    throw Error("restrict_value: a must lie in ]0,1[ (use normalized_value on the boundary)");
  return std::max((phi1 - line.b) / line.a, (phi2 + line.b) / (1.0 - line.a));
}

double normalized_value(double phi1, double phi2, const LineParam& line) {
  if (line.a == 0.0) return std::max(phi1 - line.b, 0.0);
  if (line.a == 1.0) return std::max(0.0, phi2 + line.b);
  const double a = line.a;
  return std::min(a, 1.0 - a) * std::max((phi1 - line.b) / a, (phi2 + line.b) / (1.0 - a));
}

LineParam line_through(double a, const ExtendedPoint& point) {
  if (!point.is_finite()) throw Error("line_through: point must be finite");
  const double x = point.x.value();
  const double y = point.y.value();
  return LineParam(a, (1.0 - a) * x - a * y);
}

ExtendedPoint point_on_line(const LineParam& line, double t) {
  return {line.a * t + line.b, (1.0 - line.a) * t - line.b};
}

double line_side(const LineParam& line, double x, double y) {
  return (1.0 - line.a) * (x - line.b) - line.a * (y + line.b);
}

}  // namespace mdist
