#pragma once

// Persistence diagrams, the extended metric d on cornerpoints, exact
// bottleneck distance and persistent Betti number reconstruction.

#include <string>
#include <vector>

#include "mdist/core_geometry.hpp"

namespace mdist {

struct DiagramPoint {
  enum class Kind { Proper, Essential, Delta };

  Kind kind = Kind::Delta;
  double birth = 0.0;
  double death = 0.0;  // meaningful for Proper only
  int multiplicity = 1;

  static DiagramPoint proper(double u, double v, int mult = 1);
  static DiagramPoint essential(double u, int mult = 1);
  static DiagramPoint delta();

  bool is_proper() const { return kind == Kind::Proper; }
  bool is_essential() const { return kind == Kind::Essential; }
  bool is_delta() const { return kind == Kind::Delta; }
  ExtendedReal death_value() const;
  /// Half persistence, the distance to Delta (infinite for essential points).
  ExtendedReal distance_to_delta() const;

  std::string to_string() const;
  friend bool operator==(const DiagramPoint&, const DiagramPoint&) = default;
};

/// Lexicographic (kind, birth, death) ordering; multiplicity ignored.
bool point_less(const DiagramPoint& l, const DiagramPoint& r);

class PersistenceDiagram {
 public:
  PersistenceDiagram() = default;
  explicit PersistenceDiagram(int degree) : degree_(degree) {}

  int degree() const { return degree_; }
  const std::vector<DiagramPoint>& points() const { return points_; }

  /// Adds a proper point; zero-persistence pairs (u == v) are dropped.
  void add_proper(double u, double v, int mult = 1);
  void add_essential(double u, int mult = 1);
  void add(const DiagramPoint& p);

  /// Sorted, with equal points merged into one record.
  PersistenceDiagram normalized() const;

  int proper_count() const;     // with multiplicity
  int essential_count() const;  // with multiplicity
  bool empty() const { return points_.empty(); }

  friend bool operator==(const PersistenceDiagram& l, const PersistenceDiagram& r);

 private:
  int degree_ = 0;
  std::vector<DiagramPoint> points_;
};

ExtendedReal point_distance(const DiagramPoint& p, const DiagramPoint& q);

struct MatchedPair {
  DiagramPoint source;  // multiplicity 1, or Delta
  DiagramPoint target;
  ExtendedReal cost;
};

struct Matching {
  std::vector<MatchedPair> pairs;
  ExtendedReal cost;
  std::string witness;  // why the cost is infinite, empty otherwise
};

/// Exact bottleneck distance with an optimal matching.
///
/// Essential points are paired in sorted birth order. The proper part is
/// solved by binary search over the finite set of candidate costs
/// { d(p,q) } u { d(p,Delta) } with a perfect-matching feasibility test on
/// the thresholded bipartite graph (Hopcroft-Karp).
Matching bottleneck(const PersistenceDiagram& d1, const PersistenceDiagram& d2);

/// All values the bottleneck cost can take for this pair of diagrams.
std::vector<double> bottleneck_candidates(const PersistenceDiagram& d1,
                                          const PersistenceDiagram& d2);

/// Points born at or before u that are still alive after v.
int pbnf_from_diagram(const PersistenceDiagram& d, double u, double v);

int multiplicity_box(const PersistenceDiagram& d, double u, double v, double eps);

}  // namespace mdist
