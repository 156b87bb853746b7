#pragma once

// Extended Pareto grids: contours, the extended intersection operator and
// the candidate coordinates of the generalized Position Theorem.

#include <optional>
#include <string>
#include <vector>

#include "mdist/bifiltration.hpp"
#include "mdist/core_geometry.hpp"
#include "mdist/diagram.hpp"

namespace mdist {

enum class ContourKind { Proper, ImproperVertical, ImproperHorizontal };
enum class FunctionTag { First, Second };

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// One contour of an extended Pareto grid.
///
/// Proper contours are polylines along which x is non-increasing and y
/// non-decreasing (or the reverse). Improper vertical contours are
/// {x = x0, y >= y0}; improper horizontal ones are {x >= x0, y = y0}.
class Contour {
 public:
  static Contour proper(std::vector<Point2> polyline, FunctionTag tag = FunctionTag::First);
  static Contour vertical(double x0, double y0, FunctionTag tag = FunctionTag::First);
  static Contour horizontal(double x0, double y0, FunctionTag tag = FunctionTag::First);

  ContourKind kind() const { return kind_; }
  FunctionTag tag() const { return tag_; }
  void set_tag(FunctionTag t) { tag_ = t; }
  bool is_proper() const { return kind_ == ContourKind::Proper; }

  /// Polyline vertices, ordered by non-decreasing y (proper only).
  const std::vector<Point2>& polyline() const { return polyline_; }
  /// Base point (x0, y0) of an improper contour.
  Point2 base() const { return base_; }
  /// Tangent slope of each polyline segment; -inf for vertical segments.
  const std::vector<double>& segment_slopes() const { return slopes_; }
  /// Finite endpoints: both polyline ends, or the base of a half-line.
  std::vector<Point2> endpoints() const;

  friend bool operator==(const Contour& l, const Contour& r) {
    return l.kind_ == r.kind_ && l.tag_ == r.tag_ && l.polyline_ == r.polyline_ &&
           l.base_ == r.base_;
  }

 private:
  ContourKind kind_ = ContourKind::Proper;
  FunctionTag tag_ = FunctionTag::First;
  std::vector<Point2> polyline_;
  std::vector<double> slopes_;
  Point2 base_;
};

/// Checks that no polyline segment has strictly positive slope.
bool is_monotone_polyline(const std::vector<Point2>& polyline);

struct ExtendedParetoGrid {
  std::vector<Contour> contours;

  std::size_t proper_count() const;
  std::size_t vertical_count() const;
  std::size_t horizontal_count() const;
};

/// Intersection of a line with a contour, with first-order tangent data.
struct Intersection {
  ExtendedPoint point;
  /// Tangent slope of the contour at the point: segment slope for proper
  /// contours, -inf for vertical, 0 for horizontal contours.
  double slope = 0.0;
  int segment = -1;          // polyline segment index (proper only)
  bool at_endpoint = false;  // snapped to a contour endpoint within 1e-9
};

/// Canonical intersection for a in ]0,1[; at most one point. Throws if a
/// polyline segment lies on the line.
std::optional<Intersection> intersect(const LineParam& line, const Contour& c);

/// Extended intersection: equals `intersect` on the open strip and the
/// sequential limit of intersections at a in {0, 1}.
std::optional<Intersection> hat_intersect(const LineParam& line, const Contour& c);

/// The slope parameter A with (x0, y0) on r_(A,b) for a horizontal half-line:
/// the line r_(a,b) meets it iff a in [A, 1[.
double threshold_slope(const Contour& horizontal, double b);

struct PositionCandidate {
  double w = 0.0;
  std::size_t grid = 0;     // index of the grid the contour belongs to
  std::size_t contour = 0;  // index within that grid
  ExtendedPoint intersection;
};

/// min{1,(1-a)/a}(x-b) for a < 1 and finite x, else min{1,a/(1-a)}(y+b).
std::optional<double> candidate_coordinate(const LineParam& line, const ExtendedPoint& p);
/// The x-form, when defined (a < 1, finite x).
std::optional<double> candidate_x_form(const LineParam& line, const ExtendedPoint& p);
/// The y-form, when defined (a > 0, finite y).
std::optional<double> candidate_y_form(const LineParam& line, const ExtendedPoint& p);

std::vector<PositionCandidate> position_candidates(const std::vector<const ExtendedParetoGrid*>& grids,
                                                   const LineParam& line);
std::vector<PositionCandidate> position_candidates(const ExtendedParetoGrid& grid1,
                                                   const ExtendedParetoGrid& grid2,
                                                   const LineParam& line);
std::vector<PositionCandidate> position_candidates(const ExtendedParetoGrid& grid,
                                                   const LineParam& line);

struct PositionViolation {
  DiagramPoint point;
  double coordinate = 0.0;
  double nearest_gap = 0.0;  // distance to the closest candidate
};

struct PositionReport {
  bool pass = true;
  std::size_t checked = 0;  // finite coordinates examined
  double worst_gap = 0.0;
  std::vector<PositionViolation> violations;
};

/// Every finite coordinate of every non-Delta point must be within tol of a
/// candidate.
PositionReport position_check(const PersistenceDiagram& diagram,
                              const std::vector<PositionCandidate>& candidates, double tol);

/// Grid of the (x, z) projection of a sphere, matching `sphere_mesh`.
ExtendedParetoGrid analytic_sphere_grid(double radius, const Vec3& center = {},
                                        int samples_per_arc = 64);

/// Grid of the (x, z) projection of an oriented torus, matching `torus_mesh`.
ExtendedParetoGrid analytic_torus_grid(double major, double minor,
                                       const Orientation& orientation = {},
                                       const Vec3& center = {}, int samples = 2048);

}  // namespace mdist
