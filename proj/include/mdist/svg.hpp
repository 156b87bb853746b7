#pragma once

// Deterministic SVG figures: grids with filtering lines, superposed
// diagrams with their matching, candidate clouds over the (a, b) strip and
// estimator profiles.

#include <string>
#include <vector>

#include "mdist/diagram.hpp"
#include "mdist/matching_distance.hpp"
#include "mdist/pareto_grid.hpp"
#include "mdist/special_sets.hpp"

namespace mdist {

/// Axis-aligned plotting window in data coordinates, mapped to a pixel box.
class SvgPanel {
 public:
  SvgPanel(double left, double top, double width, double height, double x_min, double x_max,
           double y_min, double y_max);

  double px(double x) const;
  double py(double y) const;
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }

  void axes(const std::string& x_label, const std::string& y_label);
  void title(const std::string& text);
  void segment(double x0, double y0, double x1, double y1, const std::string& stroke,
               double width = 1.0, bool dashed = false);
  void polyline(const std::vector<Point2>& pts, const std::string& stroke, double width = 1.5);
  void dot(double x, double y, double r, const std::string& fill);
  void square(double x, double y, double half, const std::string& fill);
  void cell(double x0, double y0, double x1, double y1, const std::string& fill);
  void legend(int row, const std::string& color, const std::string& label);

  const std::string& body() const { return body_; }

 private:
  double left_, top_, width_, height_;
  double x_min_, x_max_, y_min_, y_max_;
  std::string body_;
};

/// Wraps panel bodies in one SVG document of the given pixel size.
std::string svg_document(double width, double height, const std::vector<const SvgPanel*>& panels);

/// Contours of one or two grids with the given filtering lines clipped to
/// the view. The view covers every finite contour point and base point.
std::string render_grids(const std::vector<const ExtendedParetoGrid*>& grids,
                         const std::vector<LineParam>& lines);

/// One diagram, or two superposed diagrams with the optimal matching drawn
/// as segments. An empty input yields axes only.
std::string render_diagrams(const PersistenceDiagram& first,
                            const PersistenceDiagram* second = nullptr);

/// Candidate samples over the strip [0,1] x [b_min, b_max], colored by kind.
std::string render_candidates(const std::vector<CandidateSample>& samples, double b_min,
                              double b_max);

/// Cost over the sampled (a, b) parameters and the profile along a = 1/2.
std::string render_report(const EstimateReport& report);

/// Naive and reduced reports side by side.
std::string render_verify(const VerifyReport& report);

}  // namespace mdist
