#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. They share no code with the library beyond the data types.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "mdist/diagram.hpp"

namespace oracle {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A diagram point as (u, v) with v = +inf for essential points; a nullopt-like
// flag marks the diagonal.
struct Pt {
  double u = 0, v = 0;
  bool diagonal = false;
};

inline double dist(const Pt& p, const Pt& q) {
  if (p.diagonal && q.diagonal) return 0.0;
  if (p.diagonal || q.diagonal) {
    const Pt& r = p.diagonal ? q : p;
    return std::isinf(r.v) ? kInf : (r.v - r.u) / 2.0;
  }
  const bool ep = std::isinf(p.v), eq = std::isinf(q.v);
  if (ep && eq) return std::abs(p.u - q.u);
  if (ep || eq) return kInf;
  return std::min(std::max(std::abs(p.u - q.u), std::abs(p.v - q.v)),
                  std::max((p.v - p.u) / 2.0, (q.v - q.u) / 2.0));
}

inline std::vector<Pt> expand(const mdist::PersistenceDiagram& d) {
  std::vector<Pt> out;
  for (const auto& p : d.points()) {
    if (p.is_delta()) continue;
    for (int k = 0; k < p.multiplicity; ++k)
      out.push_back({p.birth, p.is_proper() ? p.death : kInf, false});
  }
  return out;
}

// Minimum over all partial injections P -> Q, every unmatched point going to
// the diagonal.
inline double brute_bottleneck(const std::vector<Pt>& P, const std::vector<Pt>& Q) {
  const Pt diag{0, 0, true};
  double best = kInf;
  std::vector<bool> used(Q.size(), false);
  auto rec = [&](auto&& self, std::size_t i, double acc) -> void {
    if (acc >= best && !std::isinf(best)) return;
    if (i == P.size()) {
      double c = acc;
      for (std::size_t j = 0; j < Q.size(); ++j)
        if (!used[j]) c = std::max(c, dist(Q[j], diag));
      best = std::min(best, c);
      return;
    }
    self(self, i + 1, std::max(acc, dist(P[i], diag)));
    for (std::size_t j = 0; j < Q.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      self(self, i + 1, std::max(acc, dist(P[i], Q[j])));
      used[j] = false;
    }
  };
  rec(rec, 0, 0.0);
  return best;
}

inline double brute_bottleneck(const mdist::PersistenceDiagram& a,
                               const mdist::PersistenceDiagram& b) {
  return brute_bottleneck(expand(a), expand(b));
}

// Random diagram with at most `max_points` points counted with multiplicity,
// coordinates on a coarse lattice so that ties occur.
inline mdist::PersistenceDiagram random_diagram(std::mt19937_64& rng, int max_points,
                                                double essential_prob = 0.25) {
  std::uniform_int_distribution<int> count(0, max_points), coord(0, 12), len(1, 8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  mdist::PersistenceDiagram d(0);
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    const double u = coord(rng) * 0.5;
    if (unit(rng) < essential_prob)
      d.add_essential(u);
    else
      d.add_proper(u, u + len(rng) * 0.25 + (unit(rng) < 0.5 ? 0.0 : 0.125));
  }
  return d.normalized();
}

// Persistence pairs by the textbook union-find for degree 0 of a graph with
// vertex values f and edge values max(f(u), f(v)); used to cross-check the
// boundary-matrix reduction.
struct Pair0 {
  double birth, death;  // death = inf for surviving components
};
inline std::vector<Pair0> degree0_pairs(const std::vector<double>& f,
                                        const std::vector<std::pair<int, int>>& edges) {
  const int n = static_cast<int>(f.size());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::pair<double, std::pair<int, int>>> es;
  for (auto [u, v] : edges) es.push_back({std::max(f[u], f[v]), {u, v}});
  std::sort(es.begin(), es.end());
  std::vector<Pair0> out;
  for (const auto& [w, e] : es) {
    int ru = find(e.first), rv = find(e.second);
    if (ru == rv) continue;
    // the younger root (larger birth) dies
    if (f[ru] < f[rv] || (f[ru] == f[rv] && ru < rv)) std::swap(ru, rv);
    if (w > f[ru]) out.push_back({f[ru], w});
    parent[ru] = rv;
  }
  for (int i = 0; i < n; ++i)
    if (find(i) == i) out.push_back({f[i], kInf});
  return out;
}

}  // namespace oracle
