#include "mdist/special_sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "mdist/parallel.hpp"

namespace mdist {

ContourPair::ContourPair(ContourRef a, ContourRef b) {
  if (a == b) throw Error("contour pair: the two contours must differ");
  first = std::min(a, b);
  second = std::max(a, b);
}

ContourSet::ContourSet(const ExtendedParetoGrid& first, const ExtendedParetoGrid& second) {
  for (std::size_t i = 0; i < first.contours.size(); ++i) {
    contours_.push_back(first.contours[i]);
    refs_.push_back({0, static_cast<int>(i)});
  }
  first_size_ = first.contours.size();
  for (std::size_t i = 0; i < second.contours.size(); ++i) {
    contours_.push_back(second.contours[i]);
    refs_.push_back({1, static_cast<int>(i)});
  }
}

ContourSet::ContourSet(const ExtendedParetoGrid& only) {
  contours_ = only.contours;
  for (std::size_t i = 0; i < contours_.size(); ++i) refs_.push_back({0, static_cast<int>(i)});
  first_size_ = contours_.size();
}

std::size_t ContourSet::flat_index(const ContourRef& r) const {
  const std::size_t i = r.grid == 0 ? r.index : first_size_ + r.index;
  if (r.index < 0 || i >= contours_.size() || refs_[i] != r)
    throw Error("contour set: unknown contour reference");
  return i;
}

const Contour& ContourSet::contour(const ContourRef& r) const {
  return contours_[flat_index(r)];
}

std::vector<ContourPair> ContourSet::all_pairs() const {
  std::vector<ContourPair> out;
  for (std::size_t i = 0; i < refs_.size(); ++i)
    for (std::size_t j = i + 1; j < refs_.size(); ++j) out.emplace_back(refs_[i], refs_[j]);
  return out;
}

namespace {

std::optional<Intersection> safe_intersect(const LineParam& line, const Contour& c) {
  try {
    return intersect(line, c);
  } catch (const Error&) {
    return std::nullopt;  // a segment on the line: no canonical point
  }
}

std::optional<double> coordinate(const std::optional<Intersection>& hit, Axis axis) {
  if (!hit) return std::nullopt;
  const ExtendedReal& v = axis == Axis::X ? hit->point.x : hit->point.y;
  if (!v.is_finite()) return std::nullopt;
  return v.value();
}

void require_interior(const LineParam& line, const char* what) {
  if (!(line.a > 0.0 && line.a < 1.0)) throw Error(std::string(what) + ": requires 0 < a < 1");
}

// Pair indices into the flat contour list.
struct FlatPair {
  std::size_t i, j;
};

std::vector<FlatPair> flat_pairs(std::size_t n) {
  std::vector<FlatPair> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.push_back({i, j});
  return out;
}

struct Item {
  double value;
  std::size_t pair;
  int coeff;
};

// Scaled gaps c*|u_i - u_j| for every pair whose coordinates are known.
std::vector<Item> scaled_gaps(const std::vector<std::optional<double>>& coords,
                              const std::vector<FlatPair>& pairs) {
  std::vector<Item> items;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& u = coords[pairs[p].i];
    const auto& v = coords[pairs[p].j];
    if (!u || !v) continue;
    const double g = std::abs(*u - *v);
    items.push_back({g, p, 1});
    items.push_back({2.0 * g, p, 2});
  }
  std::sort(items.begin(), items.end(), [](const Item& l, const Item& r) {
    if (l.value != r.value) return l.value < r.value;
    if (l.pair != r.pair) return l.pair < r.pair;
    return l.coeff < r.coeff;
  });
  return items;
}

std::vector<std::optional<double>> axis_coords(const ContourSet& set, const LineParam& line,
                                               Axis axis) {
  std::vector<std::optional<double>> out(set.size());
  for (std::size_t i = 0; i < set.size(); ++i)
    out[i] = coordinate(safe_intersect(line, set.contour(i)), axis);
  return out;
}

ContourPair to_pair(const ContourSet& set, const FlatPair& p) {
  return ContourPair(set.ref(p.i), set.ref(p.j));
}

}  // namespace

std::optional<double> pair_gap(const LineParam& line, const ContourSet& set,
                               const ContourPair& pair, Axis axis) {
  require_interior(line, "pair_gap");
  const auto u = coordinate(safe_intersect(line, set.contour(pair.first)), axis);
  const auto v = coordinate(safe_intersect(line, set.contour(pair.second)), axis);
  if (!u || !v) return std::nullopt;
  return std::abs(*u - *v);
}

std::vector<Axis> mandated_axes(double a) {
  if (a < 0.5) return {Axis::X};
  if (a > 0.5) return {Axis::Y};
  return {Axis::X, Axis::Y};
}

std::vector<SpecialWitness> is_special(const ContourSet& set, const LineParam& line, double tol) {
  require_interior(line, "is_special");
  const auto pairs = flat_pairs(set.size());
  std::vector<SpecialWitness> out;
  for (Axis axis : mandated_axes(line.a)) {
    const auto items = scaled_gaps(axis_coords(set, line, axis), pairs);
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].coeff == 1 && items[i].value <= tol) {
        SpecialWitness w;
        w.param = line;
        w.pair_a = w.pair_b = to_pair(set, pairs[items[i].pair]);
        w.axis = axis;
        w.residual = items[i].value;
        w.value = 0.0;
        w.double_point = true;
        out.push_back(w);
      }
      for (std::size_t j = i + 1; j < items.size() && items[j].value - items[i].value <= tol; ++j) {
        if (items[i].pair == items[j].pair) continue;
        SpecialWitness w;
        w.param = line;
        w.axis = axis;
        w.residual = items[j].value - items[i].value;
        w.value = items[i].value;
        ContourPair pa = to_pair(set, pairs[items[i].pair]);
        ContourPair pb = to_pair(set, pairs[items[j].pair]);
        int ca = items[i].coeff, cb = items[j].coeff;
        if (pb < pa) {
          std::swap(pa, pb);
          std::swap(ca, cb);
        }
        w.pair_a = pa;
        w.pair_b = pb;
        w.coeffs = {ca, cb};
        out.push_back(w);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const SpecialWitness& l, const SpecialWitness& r) {
    return std::tie(l.axis, l.pair_a, l.pair_b, l.coeffs, l.double_point) <
           std::tie(r.axis, r.pair_a, r.pair_b, r.coeffs, r.double_point);
  });
  return out;
}

std::optional<UltraspecialWitness> is_ultraspecial(const ContourSet& set, const LineParam& line,
                                                   double tol) {
  require_interior(line, "is_ultraspecial");
  const auto pairs = flat_pairs(set.size());
  for (Axis axis : mandated_axes(line.a)) {
    const auto items = scaled_gaps(axis_coords(set, line, axis), pairs);
    for (std::size_t i = 0; i < items.size(); ++i) {
      std::vector<std::size_t> chosen{i};
      for (std::size_t j = i + 1; j < items.size() && items[j].value - items[i].value <= tol; ++j) {
        const bool fresh = std::none_of(chosen.begin(), chosen.end(), [&](std::size_t k) {
          return items[k].pair == items[j].pair;
        });
        if (fresh) chosen.push_back(j);
        if (chosen.size() == 3) break;
      }
      if (chosen.size() < 3) continue;
      UltraspecialWitness w;
      w.param = line;
      w.axis = axis;
      for (int k = 0; k < 3; ++k) {
        w.pairs[k] = to_pair(set, pairs[items[chosen[k]].pair]);
        w.coeffs[k] = items[chosen[k]].coeff;
      }
      w.value = items[i].value;
      w.residual = items[chosen[2]].value - items[i].value;
      return w;
    }
  }
  return std::nullopt;
}

// --- sampling grid --------------------------------------------------------

double SamplingGrid::a_at(int i) const {
  return region.a_min + (region.a_max - region.a_min) * i / (res_a - 1);
}
double SamplingGrid::b_at(int j) const {
  return region.b_min + (region.b_max - region.b_min) * j / (res_b - 1);
}

std::pair<int, int> SamplingGrid::cell_of(double a, double b) const {
  if (a < region.a_min || a > region.a_max || b < region.b_min || b > region.b_max)
    return {-1, -1};
  const double fa = (a - region.a_min) / (region.a_max - region.a_min) * (res_a - 1);
  const double fb = (b - region.b_min) / (region.b_max - region.b_min) * (res_b - 1);
  return {std::min(static_cast<int>(fa), res_a - 2), std::min(static_cast<int>(fb), res_b - 2)};
}

std::string to_string(CandidateKind k) {
  switch (k) {
    case CandidateKind::Special: return "special";
    case CandidateKind::Ultraspecial: return "ultraspecial";
    case CandidateKind::CurveC: return "curveC";
    case CandidateKind::EndpointFamily: return "endpointFamily";
  }
  return "special";
}

CandidateKind candidate_kind_from_string(const std::string& s) {
  if (s == "special") return CandidateKind::Special;
  if (s == "ultraspecial") return CandidateKind::Ultraspecial;
  if (s == "curveC") return CandidateKind::CurveC;
  if (s == "endpointFamily") return CandidateKind::EndpointFamily;
  throw Error("unknown candidate kind '" + s + "'");
}

namespace {

void validate_grid(const SamplingGrid& g) {
  if (g.res_a < 2 || g.res_b < 2) throw Error("sampling grid: resolutions must be >= 2");
  const Region& r = g.region;
  if (!(r.a_min > 0.0) || !(r.a_max < 1.0) || !(r.a_min < r.a_max))
    throw Error("sampling grid: a-range must satisfy 0 < a_min < a_max < 1");
  if (!(r.b_min < r.b_max) || !std::isfinite(r.b_min) || !std::isfinite(r.b_max))
    throw Error("sampling grid: invalid b-range");
}

// Cells whose closed rectangle contains the parameter.
std::vector<int> touching_cells(const SamplingGrid& g, const LineParam& p) {
  const auto [ci, cj] = g.cell_of(p.a, p.b);
  std::vector<int> out;
  if (ci < 0) return out;
  const double eps_a = 1e-12 * (g.region.a_max - g.region.a_min);
  const double eps_b = 1e-12 * (g.region.b_max - g.region.b_min);
  for (int i = std::max(0, ci - 1); i <= std::min(g.res_a - 2, ci + 1); ++i) {
    if (p.a < g.a_at(i) - eps_a || p.a > g.a_at(i + 1) + eps_a) continue;
    for (int j = std::max(0, cj - 1); j <= std::min(g.res_b - 2, cj + 1); ++j) {
      if (p.b < g.b_at(j) - eps_b || p.b > g.b_at(j + 1) + eps_b) continue;
      out.push_back(g.cell_id(i, j));
    }
  }
  return out;
}

using Coords = std::vector<std::optional<double>>;

std::optional<double> signed_gap(const Coords& x, const FlatPair& p) {
  if (!x[p.i] || !x[p.j]) return std::nullopt;
  return *x[p.i] - *x[p.j];
}

// x_i - x_j at a line, intersecting only the two contours involved.
std::optional<double> signed_gap(const ContourSet& set, const LineParam& line, const FlatPair& p) {
  const auto u = coordinate(safe_intersect(line, set.contour(p.i)), Axis::X);
  if (!u) return std::nullopt;
  const auto v = coordinate(safe_intersect(line, set.contour(p.j)), Axis::X);
  if (!v) return std::nullopt;
  return *u - *v;
}

// Gap residual scaled to the axis mandated at a.
double axis_residual(double x_residual, double a) {
  const double scale = a <= 0.5 ? 1.0 : (1.0 - a) / a;
  return x_residual * scale;
}

// Bisection for a sign change of h on the segment p0 -> p1, h(p0) <= 0 < h(p1).
LineParam bisect_param(const std::function<double(const LineParam&)>& h, LineParam p0,
                       LineParam p1) {
  for (int it = 0; it < 60; ++it) {
    const LineParam mid(0.5 * (p0.a + p1.a), 0.5 * (p0.b + p1.b));
    const double v = h(mid);
    if (v == 0.0) return mid;
    if (v < 0.0)
      p0 = mid;
    else
      p1 = mid;
  }
  return LineParam(0.5 * (p0.a + p1.a), 0.5 * (p0.b + p1.b));
}

// Illinois regula falsi for h(p0) <= 0 < h(p1) on the segment p0 -> p1.
LineParam refine_root(const std::function<double(const LineParam&)>& h, const LineParam& p0,
                      const LineParam& p1, double h0, double h1, double h_tol) {
  auto at = [&](double t) {
    return LineParam(p0.a + t * (p1.a - p0.a), p0.b + t * (p1.b - p0.b));
  };
  if (h0 == 0.0) return p0;
  double t0 = 0.0, t1 = 1.0;
  int side = 0;
  for (int it = 0; it < 60; ++it) {
    double t = (t0 * h1 - t1 * h0) / (h1 - h0);
    if (!(t > t0 && t < t1)) t = 0.5 * (t0 + t1);
    const double v = h(at(t));
    if (std::abs(v) <= h_tol || t1 - t0 < 1e-15) return at(t);
    if (v < 0.0) {
      t0 = t;
      h0 = v;
      if (side == -1) h1 *= 0.5;
      side = -1;
    } else {
      t1 = t;
      h1 = v;
      if (side == 1) h0 *= 0.5;
      side = 1;
    }
  }
  return at(0.5 * (t0 + t1));
}

CandidateSample special_sample(const ContourSet& set, const LineParam& p,
                               const std::vector<FlatPair>& pairs, std::size_t pa, int ca,
                               std::size_t pb, int cb, double residual) {
  CandidateSample s;
  s.param = p;
  s.kind = CandidateKind::Special;
  s.residual = residual;
  s.contours = {set.ref(pairs[pa].i), set.ref(pairs[pa].j), set.ref(pairs[pb].i),
                set.ref(pairs[pb].j)};
  s.coeffs = {ca, cb};
  return s;
}

}  // namespace

std::vector<CandidateSample> sample_special_set(const ContourSet& set, const SamplingGrid& grid,
                                                double tol, double max_value) {
  validate_grid(grid);
  const auto pairs = flat_pairs(set.size());
  const int na = grid.res_a, nb = grid.res_b;
  std::vector<Coords> nodes(static_cast<std::size_t>(na) * nb);
  auto node_id = [nb](int i, int j) { return static_cast<std::size_t>(i) * nb + j; };
  auto node_param = [&](int i, int j) { return LineParam(grid.a_at(i), grid.b_at(j)); };

  parallel_for(nodes.size(), [&](std::size_t k) {
    nodes[k] = axis_coords(set, node_param(k / nb, k % nb), Axis::X);
  });

  // Node-level hits (constant-gap coincidences and exact crossings).
  std::vector<std::vector<CandidateSample>> per_node(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) {
    const LineParam p = node_param(k / nb, k % nb);
    auto w = is_special(set, p, tol);
    std::erase_if(w, [&](const SpecialWitness& x) { return x.value > max_value; });
    if (w.empty()) return;
    const auto best = std::min_element(
        w.begin(), w.end(),
        [](const SpecialWitness& l, const SpecialWitness& r) { return l.residual < r.residual; });
    CandidateSample s;
    s.param = p;
    s.residual = best->residual;
    s.contours = {best->pair_a.first, best->pair_a.second, best->pair_b.first,
                  best->pair_b.second};
    s.coeffs = {best->coeffs[0], best->coeffs[1]};
    per_node[k].push_back(s);
  });

  // Edge-level hits: order flips of scaled gaps, and sign flips of x_P - x_Q.
  struct Edge {
    int i0, j0, i1, j1;
  };
  std::vector<Edge> edges;
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      if (i + 1 < na) edges.push_back({i, j, i + 1, j});
      if (j + 1 < nb) edges.push_back({i, j, i, j + 1});
    }
  std::vector<std::vector<CandidateSample>> per_edge(edges.size());
  parallel_for(edges.size(), [&](std::size_t e) {
    const Edge& ed = edges[e];
    const Coords& x0 = nodes[node_id(ed.i0, ed.j0)];
    const Coords& x1 = nodes[node_id(ed.i1, ed.j1)];
    const LineParam p0 = node_param(ed.i0, ed.j0), p1 = node_param(ed.i1, ed.j1);
    auto& out = per_edge[e];

    struct Track {
      double v0, v1;
      std::size_t pair;
      int coeff;
    };
    std::vector<Track> tracks;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto g0 = signed_gap(x0, pairs[p]);
      const auto g1 = signed_gap(x1, pairs[p]);
      if (!g0 || !g1) continue;
      if ((*g0 < 0.0 && *g1 > 0.0) || (*g0 > 0.0 && *g1 < 0.0)) {
        const double s0 = *g0 < 0.0 ? 1.0 : -1.0;
        auto h = [&, p](const LineParam& q) {
          const auto g = signed_gap(set, q, pairs[p]);
          return g ? s0 * *g : 0.0;
        };
        const LineParam hit = refine_root(h, p0, p1, s0 * *g0, s0 * *g1, 0.01 * tol);
        const auto g = signed_gap(set, hit, pairs[p]);
        if (g) {
          const double r = axis_residual(std::abs(*g), hit.a);
          if (r <= tol) out.push_back(special_sample(set, hit, pairs, p, 1, p, 1, r));
        }
      }
      for (int c = 1; c <= 2; ++c) {
        const double v0 = c * std::abs(*g0), v1 = c * std::abs(*g1);
        if (std::min(v0, v1) <= 2.0 * max_value + tol) tracks.push_back({v0, v1, p, c});
      }
    }
    std::sort(tracks.begin(), tracks.end(),
              [](const Track& l, const Track& r) { return l.v0 < r.v0; });
    // insertion sort by v1; every swap is an order flip along the edge
    struct Flip {
      Track lo, hi;  // lo is below hi at p0 and above it at p1
    };
    std::vector<Flip> flips;
    for (std::size_t k = 1; k < tracks.size(); ++k) {
      for (std::size_t m = k; m > 0 && tracks[m - 1].v1 > tracks[m].v1; --m) {
        std::swap(tracks[m - 1], tracks[m]);
        const Track& lo = tracks[m];
        const Track& hi = tracks[m - 1];
        if (lo.pair == hi.pair) continue;
        if (std::abs(lo.v0 - hi.v0) <= tol && std::abs(lo.v1 - hi.v1) <= tol) continue;
        if (std::min(lo.v0, lo.v1) > max_value + tol && std::min(hi.v0, hi.v1) > max_value + tol)
          continue;
        flips.push_back({lo, hi});
      }
    }
    for (const auto& [lo, hi] : flips) {
      const std::size_t pl = lo.pair, ph = hi.pair;
      const int cl = lo.coeff, ch = hi.coeff;
      auto h = [&](const LineParam& q) {
        const auto gl = signed_gap(set, q, pairs[pl]);
        const auto gh = signed_gap(set, q, pairs[ph]);
        if (!gl || !gh) return 0.0;
        return cl * std::abs(*gl) - ch * std::abs(*gh);
      };
      const LineParam hit = refine_root(h, p0, p1, lo.v0 - hi.v0, lo.v1 - hi.v1, 0.01 * tol);
      const auto gl = signed_gap(set, hit, pairs[pl]);
      if (!gl || cl * std::abs(*gl) > max_value + tol) continue;
      const double r = axis_residual(std::abs(h(hit)), hit.a);
      if (r <= tol) {
        std::size_t pa = pl, pb = ph;
        int ca = cl, cb = ch;
        if (to_pair(set, pairs[pb]) < to_pair(set, pairs[pa])) {
          std::swap(pa, pb);
          std::swap(ca, cb);
        }
        out.push_back(special_sample(set, hit, pairs, pa, ca, pb, cb, r));
      }
    }
  });

  std::vector<CandidateSample> out;
  for (auto& v : per_node) out.insert(out.end(), v.begin(), v.end());
  for (auto& v : per_edge) out.insert(out.end(), v.begin(), v.end());
  return out;
}

namespace {

// Index of a contour pair inside the flat pair list.
std::size_t pair_index(const ContourSet& set, ContourRef a, ContourRef b) {
  std::size_t i = set.flat_index(a), j = set.flat_index(b);
  if (i > j) std::swap(i, j);
  const std::size_t n = set.size();
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

}  // namespace

std::vector<CandidateSample> sample_ultraspecial_set(const ContourSet& set,
                                                     const SamplingGrid& grid,
                                                     const std::vector<CandidateSample>& special,
                                                     double tol) {
  validate_grid(grid);
  const auto pairs = flat_pairs(set.size());
  std::vector<CandidateSample> out;
  std::set<std::pair<long long, long long>> placed;
  auto add = [&](const UltraspecialWitness& w) {
    const std::pair<long long, long long> key{std::llround(w.param.a * 1e9),
                                              std::llround(w.param.b * 1e9)};
    if (!placed.insert(key).second) return;
    CandidateSample s;
    s.param = w.param;
    s.kind = CandidateKind::Ultraspecial;
    s.residual = w.residual;
    for (int k = 0; k < 3; ++k) {
      s.contours.push_back(w.pairs[k].first);
      s.contours.push_back(w.pairs[k].second);
      s.coeffs.push_back(w.coeffs[k]);
    }
    out.push_back(s);
  };

  // Node and edge hits that are already ultraspecial.
  for (const auto& s : special)
    if (const auto w = is_ultraspecial(set, s.param, tol)) add(*w);

  // Crossings of two special curves sharing a pair inside one cell.
  struct Term {
    std::size_t pair;
    int coeff;
  };
  struct Link {
    int self_coeff;
    Term other;
  };
  std::map<int, std::map<std::size_t, std::vector<Link>>> by_cell;
  std::set<std::tuple<int, std::size_t, int, std::size_t, int>> seen;
  for (const auto& sp : special) {
    if (sp.contours.size() != 4 || sp.coeffs.size() != 2) continue;
    const Term t0{pair_index(set, sp.contours[0], sp.contours[1]), sp.coeffs[0]};
    const Term t1{pair_index(set, sp.contours[2], sp.contours[3]), sp.coeffs[1]};
    if (t0.pair == t1.pair) continue;
    for (int c : touching_cells(grid, sp.param)) {
      if (!seen.insert({c, t0.pair, t0.coeff, t1.pair, t1.coeff}).second) continue;
      auto& links = by_cell[c];
      constexpr std::size_t kMaxLinks = 24;
      if (links[t0.pair].size() < kMaxLinks) links[t0.pair].push_back({t0.coeff, t1});
      if (links[t1.pair].size() < kMaxLinks) links[t1.pair].push_back({t1.coeff, t0});
    }
  }
  const double da = (grid.region.a_max - grid.region.a_min) / (grid.res_a - 1);
  const double db = (grid.region.b_max - grid.region.b_min) / (grid.res_b - 1);
  std::set<std::array<std::size_t, 6>> tried;
  for (const auto& [cell, links] : by_cell) {
    const int ci = cell / (grid.res_b - 1), cj = cell % (grid.res_b - 1);
    const double ac = grid.a_at(ci) + 0.5 * da, bc = grid.b_at(cj) + 0.5 * db;
    for (const auto& [shared, list] : links) {
      for (std::size_t u = 0; u < list.size(); ++u) {
        for (std::size_t v = u + 1; v < list.size(); ++v) {
          {
            const Term A = list[u].other, Cc = list[v].other;
            const Term B1{shared, list[u].self_coeff}, B2{shared, list[v].self_coeff};
            if (A.pair == Cc.pair) continue;
            std::array<std::size_t, 6> key{A.pair, std::size_t(A.coeff), B1.pair,
                                           std::size_t(B1.coeff * 4 + B2.coeff), Cc.pair,
                                           std::size_t(Cc.coeff)};
            if (key[0] > key[4]) {
              std::swap(key[0], key[4]);
              std::swap(key[1], key[5]);
              key[3] = std::size_t(B2.coeff * 4 + B1.coeff);
            }
            if (!tried.insert(key).second) continue;
            auto eval = [&](double a, double b, double& h1, double& h2) {
              if (!(a > 0.0 && a < 1.0)) return false;
              const LineParam q(a, b);
              const auto ga = signed_gap(set, q, pairs[A.pair]);
              const auto gb = signed_gap(set, q, pairs[B1.pair]);
              const auto gc = signed_gap(set, q, pairs[Cc.pair]);
              if (!ga || !gb || !gc) return false;
              h1 = A.coeff * std::abs(*ga) - B1.coeff * std::abs(*gb);
              h2 = B2.coeff * std::abs(*gb) - Cc.coeff * std::abs(*gc);
              return true;
            };
            double a = ac, b = bc, h1 = 0, h2 = 0;
            bool ok = eval(a, b, h1, h2);
            for (int it = 0; ok && it < 40; ++it) {
              if (std::abs(h1) + std::abs(h2) < 1e-13) break;
              const double step = 1e-7;
              double h1a, h2a, h1b, h2b;
              if (!eval(a + step, b, h1a, h2a) || !eval(a, b + step, h1b, h2b)) {
                ok = false;
                break;
              }
              const double j11 = (h1a - h1) / step, j12 = (h1b - h1) / step;
              const double j21 = (h2a - h2) / step, j22 = (h2b - h2) / step;
              const double det = j11 * j22 - j12 * j21;
              if (std::abs(det) < 1e-14) {
                ok = false;
                break;
              }
              a -= (j22 * h1 - j12 * h2) / det;
              b -= (-j21 * h1 + j11 * h2) / det;
              ok = eval(a, b, h1, h2);
            }
            if (!ok) continue;
            if (std::abs(a - ac) > 1.5 * da || std::abs(b - bc) > 1.5 * db) continue;
            if (grid.cell_of(a, b).first < 0) continue;
            if (const auto w = is_ultraspecial(set, LineParam(a, b), tol)) add(*w);
          }
        }
      }
    }
  }
  return out;
}

// --- curve C ----------------------------------------------------------------

TangentData TangentData::from_slope(Point2 anchor, double slope) {
  if (slope > 0.0 || std::isnan(slope)) throw Error("tangent data: slope must be <= 0 or -inf");
  TangentData t;
  t.anchor = anchor;
  if (std::isinf(slope)) {
    t.mu = -1.0;
    t.lambda = 0.0;
  } else {
    t.mu = slope;
    t.lambda = 1.0;
  }
  return t;
}

double TangentData::slope() const {
  if (lambda == 0.0) return -std::numeric_limits<double>::infinity();
  return mu / lambda;
}

std::optional<CurveCQuadruple> make_quadruple(const ContourSet& set,
                                              const std::array<ContourRef, 4>& contours,
                                              const LineParam& reference) {
  require_interior(reference, "make_quadruple");
  if (ContourPair(contours[0], contours[1]) == ContourPair(contours[2], contours[3]))
    throw Error("curve C: the two contour pairs must differ");
  CurveCQuadruple q;
  q.contours = contours;
  for (int k = 0; k < 4; ++k) {
    const auto hit = safe_intersect(reference, set.contour(contours[k]));
    if (!hit) return std::nullopt;
    q.tangents[k] =
        TangentData::from_slope({hit->point.x.value(), hit->point.y.value()}, hit->slope);
  }
  return q;
}

namespace {

struct Homog {
  double mu, lambda, k;
};

// Abscissa-form data; the ordinate form swaps the axes and mirrors (a, b).
Homog homog(const TangentData& t, bool ordinate) {
  Homog h;
  if (!ordinate) {
    h.mu = t.mu;
    h.lambda = t.lambda;
    h.k = t.mu * t.anchor.x - t.lambda * t.anchor.y;
  } else {
    h.mu = t.lambda;
    h.lambda = t.mu;
    h.k = h.mu * t.anchor.y - h.lambda * t.anchor.x;
  }
  return h;
}

double denominator(const Homog& h, double a) {
  const double d = a * (h.mu + h.lambda) - h.lambda;
  if (std::abs(d) < 1e-14) throw Error("curve C: vanishing denominator a(m+1)-1");
  return d;
}

struct FirstOrder {
  double x, xa, i;
};

FirstOrder first_order(const Homog& h, double a, double b) {
  const double D = denominator(h, a);
  const double num = h.k * a - h.lambda * b;
  return {num / D, (h.k * D - num * (h.mu + h.lambda)) / (D * D), h.lambda / D};
}

bool use_ordinate(const LineParam& line) { return line.a > 0.5; }

}  // namespace

double curveC_residual(const LineParam& line, const CurveCQuadruple& quad) {
  require_interior(line, "curveC_residual");
  const bool ord = use_ordinate(line);
  const double a = ord ? 1.0 - line.a : line.a;
  const double b = ord ? -line.b : line.b;
  FirstOrder f[4];
  for (int k = 0; k < 4; ++k) f[k] = first_order(homog(quad.tangents[k], ord), a, b);
  const auto &P = f[0], &Q = f[1], &R = f[2], &S = f[3];
  return (P.x - Q.x) * (S.x - R.x) * ((R.xa - S.xa) * (P.i - Q.i) + (P.xa - Q.xa) * (S.i - R.i));
}

CurveCFactors curveC_factors(const LineParam& line, const CurveCQuadruple& quad) {
  require_interior(line, "curveC_factors");
  const bool ord = use_ordinate(line);
  const double a = ord ? 1.0 - line.a : line.a;
  const double b = ord ? -line.b : line.b;
  Homog h[4];
  double D[4];
  for (int k = 0; k < 4; ++k) {
    h[k] = homog(quad.tangents[k], ord);
    D[k] = denominator(h[k], a);
  }
  const Homog &P = h[0], &Q = h[1], &R = h[2], &S = h[3];
  const double DP = D[0], DQ = D[1], DR = D[2], DS = D[3];
  CurveCFactors f;
  f.C = (P.k * a - P.lambda * b) * DQ - (Q.k * a - Q.lambda * b) * DP;
  f.D = (S.k * a - S.lambda * b) * DR - (R.k * a - R.lambda * b) * DS;
  f.P1 = R.lambda * (b * (R.mu + R.lambda) - R.k) * DS * DS -
         S.lambda * (b * (S.mu + S.lambda) - S.k) * DR * DR;
  f.P2 = a * (P.lambda * Q.mu - Q.lambda * P.mu) * DP * DQ;
  f.Q1 = P.lambda * (b * (P.mu + P.lambda) - P.k) * DQ * DQ -
         Q.lambda * (b * (Q.mu + Q.lambda) - Q.k) * DP * DP;
  f.Q2 = -a * (S.lambda * R.mu - R.lambda * S.mu) * DR * DS;
  const double prod = DP * DQ * DR * DS;
  f.denominator = prod * prod * prod;
  return f;
}

CurveCPolynomials curveC_coefficients(const CurveCQuadruple& quad, bool ordinate_form) {
  Homog h[4];
  for (int k = 0; k < 4; ++k) h[k] = homog(quad.tangents[k], ordinate_form);
  // (k1 a - l1 b)(a(m2+l2) - l2) - (k2 a - l2 b)(a(m1+l1) - l1)
  auto coeffs = [](const Homog& one, const Homog& two) {
    return std::array<double, 3>{
        one.k * (two.mu + two.lambda) - two.k * (one.mu + one.lambda),
        -one.lambda * (two.mu + two.lambda) + two.lambda * (one.mu + one.lambda),
        -one.k * two.lambda + two.k * one.lambda};
  };
  CurveCPolynomials out;
  out.C = coeffs(h[0], h[1]);
  out.D = coeffs(h[3], h[2]);
  return out;
}

std::vector<CandidateSample> approximate_curveC(const ContourSet& set, const SamplingGrid& grid,
                                                const std::vector<int>* cells,
                                                std::vector<int>* c_cells) {
  validate_grid(grid);
  const int ncb = grid.res_b - 1;
  std::vector<int> todo;
  if (cells) {
    todo = *cells;
    std::sort(todo.begin(), todo.end());
    todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
  } else {
    todo.resize(grid.cell_count());
    for (int c = 0; c < grid.cell_count(); ++c) todo[c] = c;
  }
  const auto pairs = flat_pairs(set.size());

  std::vector<std::optional<CandidateSample>> found(todo.size());
  parallel_for(todo.size(), [&](std::size_t t) {
    const int ci = todo[t] / ncb, cj = todo[t] % ncb;
    const double a0 = grid.a_at(ci), a1 = grid.a_at(ci + 1);
    const double b0 = grid.b_at(cj), b1 = grid.b_at(cj + 1);
    const LineParam center(0.5 * (a0 + a1), 0.5 * (b0 + b1));
    const LineParam corners[4] = {{a0, b0}, {a1, b0}, {a1, b1}, {a0, b1}};

    // contours meeting the center and every corner line
    std::vector<std::size_t> live;
    std::vector<TangentData> tangent(set.size());
    for (std::size_t c = 0; c < set.size(); ++c) {
      const auto hit = safe_intersect(center, set.contour(c));
      if (!hit) continue;
      bool all = true;
      for (const auto& q : corners) all = all && safe_intersect(q, set.contour(c)).has_value();
      if (!all) continue;
      tangent[c] = TangentData::from_slope({hit->point.x.value(), hit->point.y.value()},
                                           hit->slope);
      live.push_back(c);
    }
    if (live.size() < 3) return;
    std::vector<bool> is_live(set.size(), false);
    for (auto c : live) is_live[c] = true;
    std::vector<std::size_t> live_pairs;
    for (std::size_t p = 0; p < pairs.size(); ++p)
      if (is_live[pairs[p].i] && is_live[pairs[p].j]) live_pairs.push_back(p);

    std::vector<bool> forms;
    if (a0 < 0.5) forms.push_back(false);
    if (a1 > 0.5) forms.push_back(true);

    for (bool ord : forms) {
      // first-order data of every live contour at the four corners
      std::vector<std::array<FirstOrder, 4>> fo(set.size());
      for (auto c : live) {
        const Homog h = homog(tangent[c], ord);
        for (int k = 0; k < 4; ++k) {
          const double a = ord ? 1.0 - corners[k].a : corners[k].a;
          const double b = ord ? -corners[k].b : corners[k].b;
          fo[c][k] = first_order(h, a, b);
        }
      }
      auto E = [&](const FlatPair& pq, const FlatPair& rs, int k) {
        const auto &P = fo[pq.i][k], &Q = fo[pq.j][k], &R = fo[rs.i][k], &S = fo[rs.j][k];
        return (P.x - Q.x) * (S.x - R.x) *
               ((R.xa - S.xa) * (P.i - Q.i) + (P.xa - Q.xa) * (S.i - R.i));
      };
      for (std::size_t u = 0; u < live_pairs.size(); ++u) {
        for (std::size_t v = u + 1; v < live_pairs.size(); ++v) {
          const FlatPair& pq = pairs[live_pairs[u]];
          const FlatPair& rs = pairs[live_pairs[v]];
          double e[4];
          bool neg = false, pos = false, zero = false;
          for (int k = 0; k < 4; ++k) {
            e[k] = E(pq, rs, k);
            neg |= e[k] < 0.0;
            pos |= e[k] > 0.0;
            zero |= e[k] == 0.0;
          }
          if (!(neg && pos) && !zero) continue;
          CurveCQuadruple quad;
          quad.contours = {set.ref(pq.i), set.ref(pq.j), set.ref(rs.i), set.ref(rs.j)};
          quad.tangents = {tangent[pq.i], tangent[pq.j], tangent[rs.i], tangent[rs.j]};
          CandidateSample s;
          s.kind = CandidateKind::CurveC;
          s.contours.assign(quad.contours.begin(), quad.contours.end());
          s.param = center;
          s.residual = 0.0;
          for (int k = 0; k < 4 && neg && pos; ++k) {
            const int k2 = (k + 1) % 4;
            if ((e[k] < 0.0 && e[k2] > 0.0) || (e[k] > 0.0 && e[k2] < 0.0)) {
              const double sgn = e[k] < 0.0 ? 1.0 : -1.0;
              auto h = [&](const LineParam& q) {
                const double a = ord ? 1.0 - q.a : q.a;
                const double b = ord ? -q.b : q.b;
                FirstOrder f[4];
                for (int w = 0; w < 4; ++w) f[w] = first_order(homog(quad.tangents[w], ord), a, b);
                return sgn * (f[0].x - f[1].x) * (f[3].x - f[2].x) *
                       ((f[2].xa - f[3].xa) * (f[0].i - f[1].i) +
                        (f[0].xa - f[1].xa) * (f[3].i - f[2].i));
              };
              s.param = bisect_param(h, corners[k], corners[k2]);
              s.residual = std::abs(h(s.param));
              break;
            }
          }
          if (!(neg && pos)) {
            for (int k = 0; k < 4; ++k)
              if (e[k] == 0.0) s.param = corners[k];
          }
          found[t] = s;
          return;
        }
      }
    }
  });

  std::vector<CandidateSample> out;
  std::vector<int> hit_cells;
  for (std::size_t t = 0; t < todo.size(); ++t) {
    if (!found[t]) continue;
    out.push_back(*found[t]);
    hit_cells.push_back(todo[t]);
  }

  // Lines through contour endpoints (and half-line bases), sampled over a.
  std::vector<std::pair<Point2, ContourRef>> ends;
  for (std::size_t c = 0; c < set.size(); ++c)
    for (const auto& e : set.contour(c).endpoints()) ends.emplace_back(e, set.ref(c));
  for (const auto& [e, ref] : ends) {
    auto b_of = [&](double a) { return (1.0 - a) * e.x - a * e.y; };
    for (int i = 0; i < grid.res_a; ++i) {
      const double a = grid.a_at(i);
      const double b = b_of(a);
      if (b < grid.region.b_min || b > grid.region.b_max) continue;
      CandidateSample s;
      s.param = LineParam(a, b);
      s.kind = CandidateKind::EndpointFamily;
      s.contours = {ref};
      out.push_back(s);
    }
    if (!c_cells) continue;
    for (int i = 0; i + 1 < grid.res_a; ++i) {
      const double lo = std::min(b_of(grid.a_at(i)), b_of(grid.a_at(i + 1)));
      const double hi = std::max(b_of(grid.a_at(i)), b_of(grid.a_at(i + 1)));
      for (int j = 0; j + 1 < grid.res_b; ++j)
        if (grid.b_at(j) <= hi && grid.b_at(j + 1) >= lo) hit_cells.push_back(grid.cell_id(i, j));
    }
  }
  if (c_cells) {
    std::sort(hit_cells.begin(), hit_cells.end());
    hit_cells.erase(std::unique(hit_cells.begin(), hit_cells.end()), hit_cells.end());
    *c_cells = std::move(hit_cells);
  }
  return out;
}

USet assemble_U(const ContourSet& set, const SamplingGrid& grid, double tol, double max_value) {
  USet u;
  u.special = sample_special_set(set, grid, tol, max_value);
  u.ultraspecial = sample_ultraspecial_set(set, grid, u.special, tol);

  std::vector<int> sp_cells;
  for (const auto& s : u.special)
    for (int c : touching_cells(grid, s.param)) sp_cells.push_back(c);
  std::vector<int> c_cells;
  u.curve_c = approximate_curveC(set, grid, &sp_cells, &c_cells);

  u.u = u.ultraspecial;
  for (const auto& s : u.special) {
    const auto cells = touching_cells(grid, s.param);
    const bool in_c = std::any_of(cells.begin(), cells.end(), [&](int c) {
      return std::binary_search(c_cells.begin(), c_cells.end(), c);
    });
    if (in_c) u.u.push_back(s);
  }
  return u;
}

}  // namespace mdist
