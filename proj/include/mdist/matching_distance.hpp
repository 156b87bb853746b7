#pragma once

// Matching distance by the foliation method: the dense estimator, the
// reduced estimator over slope-1 lines and the candidate set U, and checks
// of the theorems that relate them.

#include <string>
#include <vector>

#include "mdist/bifiltration.hpp"
#include "mdist/pareto_grid.hpp"
#include "mdist/special_sets.hpp"

namespace mdist {

struct EstimatorConfig {
  double cbar = 0.0;  // C-bar; <= 0 means compute it from the inputs
  int resolution_a = 200;
  int resolution_b = 200;
  double tol = 1e-3;
  double epsilon_boundary = 1e-3;  // naive scan covers a in [eps, 1 - eps]
  int degree = -1;                 // -1 compares every degree
  int special_resolution = 32;     // nodes per axis of the U sampling grid
  double special_tol = 1e-6;
  /// Drop special witnesses whose common gap exceeds twice the sup-norm
  /// distance of the inputs (they cannot realize a bottleneck distance).
  bool cap_special_values = true;
  /// U samples are merged on a lattice this many times finer than the
  /// sampling grid before evaluation; 0 keeps every sample.
  int u_lattice_refinement = 4;

  void validate() const;
};

struct LineCost {
  LineParam line;
  ExtendedReal cost;
  std::vector<ExtendedReal> per_degree;
  std::string witness;  // non-empty when the cost is infinite
};

enum class Method { Naive, Reduced };
std::string to_string(Method m);

struct EstimateReport {
  Method method = Method::Naive;
  ExtendedReal value;
  LineParam realizer;
  std::vector<LineCost> per_line;
  std::string witness;
  std::size_t slope_one_lines = 0;  // reduced: lines on a = 1/2
  std::size_t u_lines = 0;          // reduced: lines from U
};

/// max over both complexes of max_v max(|phi1(v)|, |phi2(v)|).
double compute_cbar(const BifilteredComplex& cx1, const BifilteredComplex& cx2);

/// Bottleneck distance of the two diagrams along one line, max over degrees.
LineCost line_cost(const BifilteredComplex& cx1, const BifilteredComplex& cx2,
                   const LineParam& line, int degree = -1);

/// Costs of many lines, evaluated in parallel, reported in input order.
std::vector<LineCost> line_costs(const BifilteredComplex& cx1, const BifilteredComplex& cx2,
                                 const std::vector<LineParam>& lines, int degree = -1);

EstimateReport naive_estimate(const BifilteredComplex& cx1, const BifilteredComplex& cx2,
                              const EstimatorConfig& config);

/// Lines of the reduced estimator: the slope-1 segment and thinned U samples.
std::vector<LineParam> reduced_lines(const BifilteredComplex& cx1, const BifilteredComplex& cx2,
                                     const ExtendedParetoGrid& grid1,
                                     const ExtendedParetoGrid& grid2,
                                     const EstimatorConfig& config, USet* u_out = nullptr);

EstimateReport reduced_estimate(const BifilteredComplex& cx1, const BifilteredComplex& cx2,
                                const ExtendedParetoGrid& grid1, const ExtendedParetoGrid& grid2,
                                const EstimatorConfig& config);

struct VerifyReport {
  EstimateReport naive;
  EstimateReport reduced;
  double tol = 0.0;
  bool pass = false;
};

/// Passes iff reduced >= naive - tol.
VerifyReport verify_main_theorem(const BifilteredComplex& cx1, const BifilteredComplex& cx2,
                                 const ExtendedParetoGrid& grid1,
                                 const ExtendedParetoGrid& grid2, const EstimatorConfig& config);

struct RealizerBoundReport {
  double norm1 = 0.0;  // ||phi1 - psi1||
  double norm2 = 0.0;  // ||phi2 - psi2||
  double distance = 0.0;
  bool hypothesis = false;
  bool corollary = false;  // distance equals the sup-norm distance within tol
  double bound = 0.0;      // norm1 / (norm1 + norm2)
  double realizer_a = 0.0;
  bool pass = true;
  std::string explanation;
};

RealizerBoundReport realizer_bound_check(const BifilteredComplex& cx1,
                                         const BifilteredComplex& cx2,
                                         const EstimateReport& report, double tol = 1e-9);

struct BoundaryReport {
  std::vector<LineCost> boundary;  // a = 0 then a = 1
  std::vector<LineCost> segment;   // a = 1/2
  double segment_max = 0.0;
  double worst_excess = 0.0;  // max(boundary cost - segment max)
  bool pass = true;
};

BoundaryReport boundary_domination_check(const BifilteredComplex& cx1,
                                         const BifilteredComplex& cx2,
                                         const EstimatorConfig& config);

}  // namespace mdist
