#pragma once

// Bifiltered simplicial complexes and lower-star persistence along a
// filtering line.

#include <array>
#include <cstdint>
#include <vector>

#include "mdist/core_geometry.hpp"
#include "mdist/diagram.hpp"

namespace mdist {

using Value2 = std::array<double, 2>;
using Simplex = std::vector<int>;  // sorted vertex indices

/// Finite simplicial complex (dimension <= 3) with an R^2 value per vertex.
///
/// Simplices are stored sorted by dimension, so every face precedes its
/// cofaces in storage order. Boundaries are precomputed as storage indices.
class BifilteredComplex {
 public:
  BifilteredComplex() = default;

  /// Takes an explicit simplex list; throws if it is not closed under faces,
  /// has duplicates or invalid vertex indices.
  BifilteredComplex(std::vector<Value2> values, std::vector<Simplex> simplices);

  /// Builds the face closure of the given top simplices.
  static BifilteredComplex from_top_simplices(std::vector<Value2> values,
                                              const std::vector<Simplex>& tops);

  std::size_t vertex_count() const { return values_.size(); }
  std::size_t simplex_count() const { return simplices_.size(); }
  int dimension() const { return dimension_; }
  const std::vector<Value2>& values() const { return values_; }
  const std::vector<Simplex>& simplices() const { return simplices_; }
  const std::vector<int>& boundary(std::size_t s) const { return boundary_[s]; }
  int simplex_dimension(std::size_t s) const {
    return static_cast<int>(simplices_[s].size()) - 1;
  }

  /// Same simplices, new vertex values.
  BifilteredComplex with_values(std::vector<Value2> values) const;
  bool same_structure(const BifilteredComplex& other) const;

  int euler_characteristic() const;
  /// Betti numbers over Z/2 of the whole complex, degrees 0..dimension.
  std::vector<int> betti_numbers() const;

 private:
  void build_index();

  std::vector<Value2> values_;
  std::vector<Simplex> simplices_;
  std::vector<std::vector<int>> boundary_;
  int dimension_ = -1;
};

/// Simplex order along a line: non-decreasing value, faces before cofaces.
struct LineFiltration {
  LineParam line;
  std::vector<double> simplex_values;  // indexed by storage index
  std::vector<int> order;              // storage indices in filtration order
};

LineFiltration make_line_filtration(const BifilteredComplex& cx, const LineParam& line);

/// Diagrams in degrees 0..max_degree (default: complex dimension) of the
/// normalized restriction along the line, over Z/2.
std::vector<PersistenceDiagram> compute_diagram(const BifilteredComplex& cx,
                                                const LineParam& line, int max_degree = -1);

/// Same, for an explicit filtration order (throws if a coface precedes a face
/// or values decrease).
std::vector<PersistenceDiagram> compute_diagram(const BifilteredComplex& cx,
                                                const LineFiltration& filtration,
                                                int max_degree = -1);

/// max over vertices of max(|phi1 - psi1|, |phi2 - psi2|).
double sup_norm_difference(const BifilteredComplex& cx1, const BifilteredComplex& cx2);

/// Per-component sup-norm differences (||phi1-psi1||, ||phi2-psi2||).
Value2 componentwise_sup_difference(const BifilteredComplex& cx1,
                                    const BifilteredComplex& cx2);

/// Largest |value(u) - value(v)| over edges for the normalized restriction.
double max_edge_gap(const BifilteredComplex& cx, const LineParam& line);

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

/// Rotation of a surface before projection: angles (radians) about the x axis
/// then the z axis.
struct Orientation {
  double tilt_x = 0.0;
  double tilt_z = 0.0;
};

Vec3 rotate(const Orientation& o, const Vec3& v);

/// Triangulated closed surface with 3D positions and per-vertex values.
struct SurfaceMesh {
  std::vector<Vec3> positions;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Value2> values;

  BifilteredComplex complex() const;
  double max_edge_length() const;
};

/// UV sphere with its pole axis along y; vertex values are the (x, z)
/// projection. `resolution` is the number of longitudes (>= 8, even).
SurfaceMesh sphere_mesh(int resolution, double radius, const Vec3& center = {});
BifilteredComplex make_sphere(int resolution, double radius, const Vec3& center = {});

/// Torus with tube radius minor < major and axis along y before orientation.
/// Vertex values are the (x, z) projection of the oriented surface.
SurfaceMesh torus_mesh(int resolution, double major, double minor,
                       const Orientation& orientation = {}, const Vec3& center = {});
BifilteredComplex make_torus(int resolution, double major, double minor,
                             const Orientation& orientation = {}, const Vec3& center = {});

}  // namespace mdist
