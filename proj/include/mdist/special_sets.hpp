#pragma once

// Sampled special, ultraspecial and curve-C sets of a pair of extended
// Pareto grids, and their assembly into the candidate set U.

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mdist/core_geometry.hpp"
#include "mdist/pareto_grid.hpp"

namespace mdist {

/// Contour of the merged set Ctr(phi) u Ctr(psi): grid 0 or 1, then index.
struct ContourRef {
  int grid = 0;
  int index = 0;
  friend auto operator<=>(const ContourRef&, const ContourRef&) = default;
};

/// Unordered pair of distinct contour references, stored with first < second.
struct ContourPair {
  ContourRef first;
  ContourRef second;

  ContourPair() = default;
  ContourPair(ContourRef a, ContourRef b);  // throws if a == b
  friend auto operator<=>(const ContourPair&, const ContourPair&) = default;
};

enum class Axis { X, Y };

/// The merged contour list of two grids (the second may be absent).
class ContourSet {
 public:
  ContourSet(const ExtendedParetoGrid& first, const ExtendedParetoGrid& second);
  explicit ContourSet(const ExtendedParetoGrid& only);

  std::size_t size() const { return contours_.size(); }
  const Contour& contour(std::size_t i) const { return contours_[i]; }
  const Contour& contour(const ContourRef& r) const;
  ContourRef ref(std::size_t i) const { return refs_[i]; }
  std::size_t flat_index(const ContourRef& r) const;
  /// All unordered pairs of distinct contours.
  std::vector<ContourPair> all_pairs() const;

 private:
  std::vector<Contour> contours_;
  std::vector<ContourRef> refs_;
  std::size_t first_size_ = 0;
};

/// |coordinate difference| of the two intersection points on the axis.
std::optional<double> pair_gap(const LineParam& line, const ContourSet& set,
                               const ContourPair& pair, Axis axis);

struct SpecialWitness {
  LineParam param;
  ContourPair pair_a;
  ContourPair pair_b;
  std::array<int, 2> coeffs{1, 1};
  Axis axis = Axis::X;
  double residual = 0.0;
  double value = 0.0;  // the common scaled gap c1 * gapA
  /// Two contours meet the line at the same point; pair_b repeats pair_a.
  bool double_point = false;
};

/// Axes on which the gap criterion is imposed at slope parameter a.
std::vector<Axis> mandated_axes(double a);

std::vector<SpecialWitness> is_special(const ContourSet& set, const LineParam& line, double tol);

struct UltraspecialWitness {
  LineParam param;
  std::array<ContourPair, 3> pairs;
  std::array<int, 3> coeffs{1, 1, 1};
  Axis axis = Axis::X;
  double value = 0.0;     // the common matched gap
  double residual = 0.0;  // spread of the three scaled gaps
};

std::optional<UltraspecialWitness> is_ultraspecial(const ContourSet& set, const LineParam& line,
                                                   double tol);

/// Closed rectangle of the (a, b) parameter strip sampled by a regular grid.
struct Region {
  double a_min = 0.01;
  double a_max = 0.99;
  double b_min = -1.0;
  double b_max = 1.0;
};

struct SamplingGrid {
  Region region;
  int res_a = 2;  // nodes along a
  int res_b = 2;  // nodes along b

  double a_at(int i) const;
  double b_at(int j) const;
  /// Cell (i, j) spans nodes i..i+1 and j..j+1; -1 when outside the region.
  std::pair<int, int> cell_of(double a, double b) const;
  int cell_id(int i, int j) const { return i * (res_b - 1) + j; }
  int cell_count() const { return (res_a - 1) * (res_b - 1); }
};

enum class CandidateKind { Special, Ultraspecial, CurveC, EndpointFamily };

std::string to_string(CandidateKind k);
CandidateKind candidate_kind_from_string(const std::string& s);

struct CandidateSample {
  LineParam param;
  CandidateKind kind = CandidateKind::Special;
  double residual = 0.0;
  std::vector<ContourRef> contours;  // consecutive pairs for special samples
  std::vector<int> coeffs;           // one per contour pair, when meaningful
};

/// Sampled approximation of Sp: parameters with a witness at grid nodes,
/// plus zeros of c1*gapA - c2*gapB refined on grid edges where the order of
/// two scaled gaps flips. Witnesses whose common scaled gap exceeds
/// `max_value` are skipped.
std::vector<CandidateSample> sample_special_set(
    const ContourSet& set, const SamplingGrid& grid, double tol = 1e-6,
    double max_value = std::numeric_limits<double>::infinity());

/// Ultraspecial points: node-level detections plus Newton solutions of two
/// simultaneous gap equalities sharing a pair, inside cells with special hits.
std::vector<CandidateSample> sample_ultraspecial_set(const ContourSet& set,
                                                     const SamplingGrid& grid,
                                                     const std::vector<CandidateSample>& special,
                                                     double tol = 1e-6);

/// First-order data of one contour: the tangent line at an anchor point in
/// homogeneous form lambda*(y - y0) = mu*(x - x0); vertical has lambda = 0.
struct TangentData {
  Point2 anchor;
  double mu = -1.0;
  double lambda = 0.0;

  static TangentData from_slope(Point2 anchor, double slope);  // slope may be -inf
  double slope() const;
};

struct CurveCQuadruple {
  std::array<ContourRef, 4> contours;  // alpha_P, alpha_Q, alpha_R, alpha_S
  std::array<TangentData, 4> tangents;
};

/// Tangent data at the intersections with a reference line; empty if one of
/// the four contours misses it.
std::optional<CurveCQuadruple> make_quadruple(const ContourSet& set,
                                              const std::array<ContourRef, 4>& contours,
                                              const LineParam& reference);

/// Left minus right side of the parallel-gradient equation with first-order
/// contour models: the abscissa form for a <= 1/2, the ordinate form above.
double curveC_residual(const LineParam& line, const CurveCQuadruple& quad);

/// The same equation as C * D * (P1 P2 - Q1 Q2) over the cleared denominator.
struct CurveCFactors {
  double C = 0, D = 0, P1 = 0, P2 = 0, Q1 = 0, Q2 = 0;
  double denominator = 1;  // (D_P D_Q D_R D_S)^3

  double polynomial() const { return C * D * (P1 * P2 - Q1 * Q2); }
  double value() const { return polynomial() / denominator; }
};

CurveCFactors curveC_factors(const LineParam& line, const CurveCQuadruple& quad);

/// Coefficients (c2, c1, c0) of C(a,b) and D(a,b) = c2 a^2 + c1 a b + c0 a, in
/// the coordinates of the form used at `line` (ordinate form mirrors a, b).
struct CurveCPolynomials {
  std::array<double, 3> C{};
  std::array<double, 3> D{};
};
CurveCPolynomials curveC_coefficients(const CurveCQuadruple& quad, bool ordinate_form);

/// Sign-change zero set of the residual over all admissible quadruples, plus
/// parameters whose line passes through a contour endpoint. `cells`, when
/// non-null, restricts the quadruple scan to the listed cell ids; the
/// resulting C cell ids are written to `c_cells` when given.
std::vector<CandidateSample> approximate_curveC(const ContourSet& set, const SamplingGrid& grid,
                                                const std::vector<int>* cells = nullptr,
                                                std::vector<int>* c_cells = nullptr);

struct USet {
  std::vector<CandidateSample> special;
  std::vector<CandidateSample> ultraspecial;
  std::vector<CandidateSample> curve_c;
  /// USp u (C n Sp) with the intersection taken per sampling cell.
  std::vector<CandidateSample> u;
};

USet assemble_U(const ContourSet& set, const SamplingGrid& grid, double tol = 1e-6,
               double max_value = std::numeric_limits<double>::infinity());

}  // namespace mdist
