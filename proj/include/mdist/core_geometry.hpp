#pragma once

// Extended reals, filtering lines r_(a,b) and the restriction formulas of the
// foliation method.

#include <compare>
#include <stdexcept>
#include <string>

namespace mdist {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A real number or the positive-infinity marker.
///
/// Infinity is a tag, not an IEEE infinity: subtracting infinity from
/// infinity throws instead of producing NaN.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT(implicit)

  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_finite() const { return !infinite_; }
  constexpr bool is_infinite() const { return infinite_; }

  /// Finite value; throws on infinity.
  double value() const {
    if (infinite_) throw Error("ExtendedReal: value() of infinity");
    return value_;
  }

  /// Finite value, or +HUGE_VAL for infinity (for display and sorting only).
  double to_double() const;

  friend bool operator==(const ExtendedReal& l, const ExtendedReal& r) {
    if (l.infinite_ || r.infinite_) return l.infinite_ == r.infinite_;
    return l.value_ == r.value_;
  }
  friend std::partial_ordering operator<=>(const ExtendedReal& l, const ExtendedReal& r) {
    if (l.infinite_ && r.infinite_) return std::partial_ordering::equivalent;
    if (l.infinite_) return std::partial_ordering::greater;
    if (r.infinite_) return std::partial_ordering::less;
    return l.value_ <=> r.value_;
  }

  friend ExtendedReal operator+(const ExtendedReal& l, const ExtendedReal& r) {
    if (l.infinite_ || r.infinite_) return infinity();
    return l.value_ + r.value_;
  }
  /// inf - finite = inf; finite - inf and inf - inf throw.
  friend ExtendedReal operator-(const ExtendedReal& l, const ExtendedReal& r);

  std::string to_string() const;

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

ExtendedReal max(const ExtendedReal& l, const ExtendedReal& r);
ExtendedReal min(const ExtendedReal& l, const ExtendedReal& r);

struct ExtendedPoint {
  ExtendedReal x;
  ExtendedReal y;

  bool is_finite() const { return x.is_finite() && y.is_finite(); }
  friend bool operator==(const ExtendedPoint&, const ExtendedPoint&) = default;
};

/// Parameter (a, b) of the filtering line r_(a,b) = { t(a,1-a) + (b,-b) }.
/// r_(0,b) is the vertical line {x = b}, r_(1,b) the horizontal line {y = -b}.
struct LineParam {
  double a = 0.5;
  double b = 0.0;

  LineParam() = default;
  LineParam(double a_, double b_);  // throws unless 0 <= a <= 1 and both finite

  bool is_boundary() const { return a == 0.0 || a == 1.0; }
  friend bool operator==(const LineParam&, const LineParam&) = default;
};

/// Closed segment [from, to] in parameter space.
struct RotationSegment {
  enum class Kind { Clockwise, CounterClockwise, Translation };

  LineParam from;
  LineParam to;

  Kind kind() const {
    if (from.a < to.a) return Kind::Clockwise;
    if (to.a < from.a) return Kind::CounterClockwise;
    return Kind::Translation;
  }
  LineParam at(double s) const;  // s in [0,1]
};

/// phi_(a,b) = max{(phi1 - b)/a, (phi2 + b)/(1 - a)}; requires 0 < a < 1.
ExtendedReal restrict_value(double phi1, double phi2, const LineParam& line);

/// min{a,1-a} * phi_(a,b) on the open strip, closed-form limits at a in {0,1}.
double normalized_value(double phi1, double phi2, const LineParam& line);

/// The line with slope parameter a through a finite point.
LineParam line_through(double a, const ExtendedPoint& point);

/// Point t(a,1-a) + (b,-b) of an interior line.
ExtendedPoint point_on_line(const LineParam& line, double t);

/// Signed offset (1-a)(x-b) - a(y+b): zero on the line, positive to its right.
double line_side(const LineParam& line, double x, double y);

}  // namespace mdist
