#include "mdist/bifiltration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace mdist {

namespace {

bool simplex_less(const Simplex& l, const Simplex& r) {
  if (l.size() != r.size()) return l.size() < r.size();
  return l < r;
}

// Z/2 column: sorted row indices. dst ^= src.
void add_column(std::vector<int>& dst, const std::vector<int>& src, std::vector<int>& scratch) {
  scratch.clear();
  std::set_symmetric_difference(dst.begin(), dst.end(), src.begin(), src.end(),
                                std::back_inserter(scratch));
  dst.swap(scratch);
}

}  // namespace

BifilteredComplex::BifilteredComplex(std::vector<Value2> values, std::vector<Simplex> simplices)
    : values_(std::move(values)), simplices_(std::move(simplices)) {
  build_index();
}

BifilteredComplex BifilteredComplex::from_top_simplices(std::vector<Value2> values,
                                                        const std::vector<Simplex>& tops) {
  std::set<Simplex> all;
  for (auto s : tops) {
    std::sort(s.begin(), s.end());
    const int k = static_cast<int>(s.size());
    if (k == 0 || k > 4) throw Error("complex: simplices must have 1 to 4 vertices");
    for (int mask = 1; mask < (1 << k); ++mask) {
      Simplex face;
      for (int i = 0; i < k; ++i)
        if (mask & (1 << i)) face.push_back(s[i]);
      all.insert(face);
    }
  }
  for (int v = 0; v < static_cast<int>(values.size()); ++v) all.insert(Simplex{v});
  return BifilteredComplex(std::move(values), std::vector<Simplex>(all.begin(), all.end()));
}

void BifilteredComplex::build_index() {
  const int nv = static_cast<int>(values_.size());
  for (auto& s : simplices_) {
    if (s.empty() || s.size() > 4) throw Error("complex: simplices must have 1 to 4 vertices");
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw Error("complex: repeated vertex in simplex");
    for (int v : s)
      if (v < 0 || v >= nv) throw Error("complex: vertex index out of range");
  }
  for (const auto& val : values_)
    if (!std::isfinite(val[0]) || !std::isfinite(val[1]))
      throw Error("complex: vertex values must be finite");
  std::sort(simplices_.begin(), simplices_.end(), simplex_less);
  if (std::adjacent_find(simplices_.begin(), simplices_.end()) != simplices_.end())
    throw Error("complex: duplicate simplex");

  std::map<Simplex, int> index;
  for (int i = 0; i < static_cast<int>(simplices_.size()); ++i) index.emplace(simplices_[i], i);
  boundary_.assign(simplices_.size(), {});
  dimension_ = -1;
  for (std::size_t i = 0; i < simplices_.size(); ++i) {
    const auto& s = simplices_[i];
    dimension_ = std::max(dimension_, static_cast<int>(s.size()) - 1);
    if (s.size() == 1) continue;
    for (std::size_t drop = 0; drop < s.size(); ++drop) {
      Simplex face;
      for (std::size_t j = 0; j < s.size(); ++j)
        if (j != drop) face.push_back(s[j]);
      const auto it = index.find(face);
      if (it == index.end()) throw Error("complex: simplex list is not closed under faces");
      boundary_[i].push_back(it->second);
    }
    std::sort(boundary_[i].begin(), boundary_[i].end());
  }
}

BifilteredComplex BifilteredComplex::with_values(std::vector<Value2> values) const {
  if (values.size() != values_.size()) throw Error("complex: vertex count mismatch");
  BifilteredComplex out = *this;
  out.values_ = std::move(values);
  return out;
}

bool BifilteredComplex::same_structure(const BifilteredComplex& other) const {
  return values_.size() == other.values_.size() && simplices_ == other.simplices_;
}

int BifilteredComplex::euler_characteristic() const {
  int chi = 0;
  for (const auto& s : simplices_) chi += (s.size() % 2 == 1) ? 1 : -1;
  return chi;
}

std::vector<int> BifilteredComplex::betti_numbers() const {
  // rank of each boundary operator by column elimination in storage order
  std::vector<int> count(dimension_ + 2, 0), rank(dimension_ + 2, 0);
  std::vector<int> pivot_owner(simplices_.size(), -1);
  std::vector<std::vector<int>> reduced(simplices_.size());
  std::vector<int> scratch;
  for (std::size_t j = 0; j < simplices_.size(); ++j) {
    const int d = simplex_dimension(j);
    ++count[d];
    auto col = boundary_[j];
    while (!col.empty() && pivot_owner[col.back()] >= 0)
      add_column(col, reduced[pivot_owner[col.back()]], scratch);
    if (!col.empty()) {
      pivot_owner[col.back()] = static_cast<int>(j);
      reduced[j] = std::move(col);
      ++rank[d];
    }
  }
  std::vector<int> betti(dimension_ + 1);
  for (int d = 0; d <= dimension_; ++d) betti[d] = count[d] - rank[d] - rank[d + 1];
  return betti;
}

LineFiltration make_line_filtration(const BifilteredComplex& cx, const LineParam& line) {
  LineFiltration f;
  f.line = line;
  const auto& vals = cx.values();
  std::vector<double> vertex_value(vals.size());
  for (std::size_t v = 0; v < vals.size(); ++v)
    vertex_value[v] = normalized_value(vals[v][0], vals[v][1], line);
  const auto& simplices = cx.simplices();
  f.simplex_values.resize(simplices.size());
  for (std::size_t s = 0; s < simplices.size(); ++s) {
    double m = -HUGE_VAL;
    for (int v : simplices[s]) m = std::max(m, vertex_value[v]);
    f.simplex_values[s] = m;
  }
  f.order.resize(simplices.size());
  std::iota(f.order.begin(), f.order.end(), 0);
  // storage order is by dimension, so ties in value keep faces first
  std::stable_sort(f.order.begin(), f.order.end(), [&](int l, int r) {
    if (f.simplex_values[l] != f.simplex_values[r])
      return f.simplex_values[l] < f.simplex_values[r];
    return cx.simplex_dimension(l) < cx.simplex_dimension(r);
  });
  return f;
}

std::vector<PersistenceDiagram> compute_diagram(const BifilteredComplex& cx,
                                                const LineParam& line, int max_degree) {
  return compute_diagram(cx, make_line_filtration(cx, line), max_degree);
}

std::vector<PersistenceDiagram> compute_diagram(const BifilteredComplex& cx,
                                                const LineFiltration& f, int max_degree) {
  const int top = cx.dimension();
  if (max_degree < 0 || max_degree > top) max_degree = top;
  const std::size_t n = cx.simplex_count();
  if (f.order.size() != n || f.simplex_values.size() != n)
    throw Error("compute_diagram: filtration does not match the complex");

  std::vector<int> pos(n, -1);
  for (std::size_t j = 0; j < n; ++j) {
    const int s = f.order[j];
    if (s < 0 || static_cast<std::size_t>(s) >= n || pos[s] >= 0)
      throw Error("compute_diagram: filtration order is not a permutation");
    pos[s] = static_cast<int>(j);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const int s = f.order[j];
    if (j > 0 && f.simplex_values[s] < f.simplex_values[f.order[j - 1]])
      throw Error("compute_diagram: filtration values decrease");
    for (int face : cx.boundary(s))
      if (pos[face] > static_cast<int>(j))
        throw Error("compute_diagram: a coface precedes its face");
  }

  // columns by dimension, in filtration order
  std::vector<std::vector<int>> by_dim(top + 1);
  for (std::size_t j = 0; j < n; ++j) by_dim[cx.simplex_dimension(f.order[j])].push_back(j);

  std::vector<int> pivot_owner(n, -1);  // row position -> column position
  std::vector<char> is_birth(n, 0), is_death(n, 0);
  std::vector<std::vector<int>> reduced(n);
  std::vector<int> scratch, col;
  std::vector<PersistenceDiagram> out;
  for (int d = 0; d <= max_degree; ++d) out.emplace_back(d);

  // Twist: high dimensions first, skipping columns already known positive.
  for (int d = std::min(top, max_degree + 1); d >= 1; --d) {
    for (int j : by_dim[d]) {
      if (is_birth[j]) continue;
      col.clear();
      for (int face : cx.boundary(f.order[j])) col.push_back(pos[face]);
      std::sort(col.begin(), col.end());
      while (!col.empty() && pivot_owner[col.back()] >= 0)
        add_column(col, reduced[pivot_owner[col.back()]], scratch);
      if (col.empty()) continue;
      const int low = col.back();
      pivot_owner[low] = j;
      is_birth[low] = 1;
      is_death[j] = 1;
      if (d - 1 <= max_degree) {
        const double birth = f.simplex_values[f.order[low]];
        const double death = f.simplex_values[f.order[j]];
        if (birth < death) out[d - 1].add_proper(birth, death);
      }
      reduced[j] = col;
    }
  }
  for (int d = 0; d <= max_degree; ++d)
    for (int j : by_dim[d])
      if (!is_birth[j] && !is_death[j]) out[d].add_essential(f.simplex_values[f.order[j]]);
  for (auto& dgm : out) dgm = dgm.normalized();
  return out;
}

double sup_norm_difference(const BifilteredComplex& cx1, const BifilteredComplex& cx2) {
  const auto c = componentwise_sup_difference(cx1, cx2);
  return std::max(c[0], c[1]);
}

Value2 componentwise_sup_difference(const BifilteredComplex& cx1,
                                    const BifilteredComplex& cx2) {
  if (!cx1.same_structure(cx2))
    throw Error("sup_norm_difference: complexes differ in simplicial structure");
  Value2 m{0.0, 0.0};
  for (std::size_t v = 0; v < cx1.vertex_count(); ++v)
    for (int k = 0; k < 2; ++k)
      m[k] = std::max(m[k], std::abs(cx1.values()[v][k] - cx2.values()[v][k]));
  return m;
}

double max_edge_gap(const BifilteredComplex& cx, const LineParam& line) {
  double gap = 0.0;
  const auto& vals = cx.values();
  for (const auto& s : cx.simplices()) {
    if (s.size() != 2) continue;
    const double u = normalized_value(vals[s[0]][0], vals[s[0]][1], line);
    const double v = normalized_value(vals[s[1]][0], vals[s[1]][1], line);
    gap = std::max(gap, std::abs(u - v));
  }
  return gap;
}

Vec3 rotate(const Orientation& o, const Vec3& v) {
  const double cx = std::cos(o.tilt_x), sx = std::sin(o.tilt_x);
  const Vec3 r1{v.x, cx * v.y - sx * v.z, sx * v.y + cx * v.z};
  const double cz = std::cos(o.tilt_z), sz = std::sin(o.tilt_z);
  return {cz * r1.x - sz * r1.y, sz * r1.x + cz * r1.y, r1.z};
}

BifilteredComplex SurfaceMesh::complex() const {
  std::vector<Simplex> tops;
  tops.reserve(triangles.size());
  for (const auto& t : triangles) tops.push_back({t[0], t[1], t[2]});
  return BifilteredComplex::from_top_simplices(values, tops);
}

double SurfaceMesh::max_edge_length() const {
  double m = 0.0;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) {
      const Vec3& p = positions[t[k]];
      const Vec3& q = positions[t[(k + 1) % 3]];
      m = std::max(m, std::hypot(p.x - q.x, p.y - q.y, p.z - q.z));
    }
  return m;
}

SurfaceMesh sphere_mesh(int resolution, double radius, const Vec3& center) {
  if (resolution < 8) throw Error("sphere: resolution must be at least 8");
  if (!(radius > 0.0)) throw Error("sphere: radius must be positive");
  const int n = resolution + (resolution % 2);
  const int rings = n / 2 - 1;
  SurfaceMesh mesh;
  auto add = [&](double lat, double lon) {
    const Vec3 p{center.x + radius * std::cos(lat) * std::cos(lon),
                 center.y + radius * std::sin(lat),
                 center.z + radius * std::cos(lat) * std::sin(lon)};
    mesh.positions.push_back(p);
    mesh.values.push_back({p.x, p.z});
  };
  add(-M_PI / 2, 0.0);
  for (int k = 1; k <= rings; ++k) {
    const double lat = -M_PI / 2 + M_PI * k / (n / 2);
    for (int i = 0; i < n; ++i) add(lat, 2.0 * M_PI * i / n);
  }
  add(M_PI / 2, 0.0);
  const int south = 0, north = 1 + rings * n;
  auto ring = [&](int k, int i) { return 1 + (k - 1) * n + (i % n); };
  for (int i = 0; i < n; ++i) mesh.triangles.push_back({south, ring(1, i), ring(1, i + 1)});
  for (int k = 1; k < rings; ++k)
    for (int i = 0; i < n; ++i) {
      mesh.triangles.push_back({ring(k, i), ring(k + 1, i), ring(k + 1, i + 1)});
      mesh.triangles.push_back({ring(k, i), ring(k + 1, i + 1), ring(k, i + 1)});
    }
  for (int i = 0; i < n; ++i) mesh.triangles.push_back({ring(rings, i), north, ring(rings, i + 1)});
  return mesh;
}

BifilteredComplex make_sphere(int resolution, double radius, const Vec3& center) {
  return sphere_mesh(resolution, radius, center).complex();
}

SurfaceMesh torus_mesh(int resolution, double major, double minor,
                       const Orientation& orientation, const Vec3& center) {
  if (resolution < 8) throw Error("torus: resolution must be at least 8");
  if (!(minor > 0.0) || !(major > minor)) throw Error("torus: need 0 < minor < major");
  const int nu = resolution;
  const int nv = std::max(resolution / 2, 4);
  SurfaceMesh mesh;
  for (int i = 0; i < nu; ++i) {
    const double u = 2.0 * M_PI * i / nu;
    for (int j = 0; j < nv; ++j) {
      const double v = 2.0 * M_PI * j / nv;
      const Vec3 local{(major + minor * std::cos(v)) * std::cos(u), minor * std::sin(v),
                       (major + minor * std::cos(v)) * std::sin(u)};
      const Vec3 r = rotate(orientation, local);
      const Vec3 p{center.x + r.x, center.y + r.y, center.z + r.z};
      mesh.positions.push_back(p);
      mesh.values.push_back({p.x, p.z});
    }
  }
  auto id = [&](int i, int j) { return (i % nu) * nv + (j % nv); };
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return mesh;
}

BifilteredComplex make_torus(int resolution, double major, double minor,
                             const Orientation& orientation, const Vec3& center) {
  return torus_mesh(resolution, major, minor, orientation, center).complex();
}

}  // namespace mdist
