#include "mdist/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

namespace mdist {

DiagramPoint DiagramPoint::proper(double u, double v, int mult) {
  if (!(u < v)) throw Error("DiagramPoint: proper point needs birth < death");
  if (mult < 1) throw Error("DiagramPoint: multiplicity must be positive");
  return {Kind::Proper, u, v, mult};
}

DiagramPoint DiagramPoint::essential(double u, int mult) {
  if (!std::isfinite(u)) throw Error("DiagramPoint: essential birth must be finite");
  if (mult < 1) throw Error("DiagramPoint: multiplicity must be positive");
  return {Kind::Essential, u, 0.0, mult};
}

DiagramPoint DiagramPoint::delta() { return {Kind::Delta, 0.0, 0.0, 1}; }

ExtendedReal DiagramPoint::death_value() const {
  if (kind == Kind::Essential) return ExtendedReal::infinity();
  return death;
}

ExtendedReal DiagramPoint::distance_to_delta() const {
  switch (kind) {
    case Kind::Proper: return (death - birth) / 2.0;
    case Kind::Essential: return ExtendedReal::infinity();
    case Kind::Delta: return 0.0;
  }
  return 0.0;
}

std::string DiagramPoint::to_string() const {
  switch (kind) {
    case Kind::Delta: return "Delta";
    case Kind::Essential: return "(" + ExtendedReal(birth).to_string() + ", inf)";
    case Kind::Proper:
      return "(" + ExtendedReal(birth).to_string() + ", " + ExtendedReal(death).to_string() + ")";
  }
  return {};
}

bool point_less(const DiagramPoint& l, const DiagramPoint& r) {
  return std::tie(l.kind, l.birth, l.death) < std::tie(r.kind, r.birth, r.death);
}

void PersistenceDiagram::add_proper(double u, double v, int mult) {
  if (u == v) return;
  points_.push_back(DiagramPoint::proper(u, v, mult));
}

void PersistenceDiagram::add_essential(double u, int mult) {
  points_.push_back(DiagramPoint::essential(u, mult));
}

void PersistenceDiagram::add(const DiagramPoint& p) {
  switch (p.kind) {
    case DiagramPoint::Kind::Proper: add_proper(p.birth, p.death, p.multiplicity); break;
    case DiagramPoint::Kind::Essential: add_essential(p.birth, p.multiplicity); break;
    case DiagramPoint::Kind::Delta: break;  // implicit in every diagram
  }
}

PersistenceDiagram PersistenceDiagram::normalized() const {
  PersistenceDiagram out(degree_);
  auto pts = points_;
  std::sort(pts.begin(), pts.end(), point_less);
  for (const auto& p : pts) {
    if (!out.points_.empty()) {
      auto& last = out.points_.back();
      if (last.kind == p.kind && last.birth == p.birth && last.death == p.death) {
        last.multiplicity += p.multiplicity;
        continue;
      }
    }
    out.points_.push_back(p);
  }
  return out;
}

int PersistenceDiagram::proper_count() const {
  int n = 0;
  for (const auto& p : points_)
    if (p.is_proper()) n += p.multiplicity;
  return n;
}

int PersistenceDiagram::essential_count() const {
  int n = 0;
  for (const auto& p : points_)
    if (p.is_essential()) n += p.multiplicity;
  return n;
}

bool operator==(const PersistenceDiagram& l, const PersistenceDiagram& r) {
  return l.degree_ == r.degree_ && l.normalized().points_ == r.normalized().points_;
}

ExtendedReal point_distance(const DiagramPoint& p, const DiagramPoint& q) {
  using K = DiagramPoint::Kind;
  if (p.kind == K::Proper && q.kind == K::Proper) {
    const double direct = std::max(std::abs(p.birth - q.birth), std::abs(p.death - q.death));
    const double via_delta = std::max((p.death - p.birth) / 2.0, (q.death - q.birth) / 2.0);
    return std::min(direct, via_delta);
  }
  if (p.kind == K::Essential && q.kind == K::Essential) return std::abs(p.birth - q.birth);
  if (p.kind == K::Proper && q.kind == K::Delta) return (p.death - p.birth) / 2.0;
  if (p.kind == K::Delta && q.kind == K::Proper) return (q.death - q.birth) / 2.0;
  if (p.kind == K::Delta && q.kind == K::Delta) return 0.0;
  return ExtendedReal::infinity();
}

namespace {

std::vector<DiagramPoint> expand(const PersistenceDiagram& d, DiagramPoint::Kind kind) {
  std::vector<DiagramPoint> out;
  for (const auto& p : d.points()) {
    if (p.kind != kind) continue;
    DiagramPoint unit = p;
    unit.multiplicity = 1;
    for (int i = 0; i < p.multiplicity; ++i) out.push_back(unit);
  }
  std::sort(out.begin(), out.end(), point_less);
  return out;
}

// Hopcroft-Karp on a bipartite graph with left/right sides of equal size.
class HopcroftKarp {
 public:
  explicit HopcroftKarp(std::vector<std::vector<int>> adj)
      : adj_(std::move(adj)), n_(static_cast<int>(adj_.size())),
        match_l_(n_, -1), match_r_(n_, -1), dist_(n_) {}

  int run() {
    int size = 0;
    while (bfs()) {
      for (int u = 0; u < n_; ++u)
        if (match_l_[u] < 0 && dfs(u)) ++size;
    }
    return size;
  }

  const std::vector<int>& left_match() const { return match_l_; }

 private:
  bool bfs() {
    std::queue<int> q;
    bool found = false;
    for (int u = 0; u < n_; ++u) {
      if (match_l_[u] < 0) {
        dist_[u] = 0;
        q.push(u);
      } else {
        dist_[u] = -1;
      }
    }
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj_[u]) {
        const int w = match_r_[v];
        if (w < 0) {
          found = true;
        } else if (dist_[w] < 0) {
          dist_[w] = dist_[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  }

  bool dfs(int u) {
    for (int v : adj_[u]) {
      const int w = match_r_[v];
      if (w < 0 || (dist_[w] == dist_[u] + 1 && dfs(w))) {
        match_l_[u] = v;
        match_r_[v] = u;
        return true;
      }
    }
    dist_[u] = -1;
    return false;
  }

  std::vector<std::vector<int>> adj_;
  int n_;
  std::vector<int> match_l_, match_r_, dist_;
};

struct ProperProblem {
  std::vector<DiagramPoint> left;   // proper points of the first diagram
  std::vector<DiagramPoint> right;  // proper points of the second diagram

  // Left vertices: left[i] (i < n), then diagonal copies of right[j].
  // Right vertices: right[j] (j < m), then diagonal copies of left[i].
  std::vector<std::vector<int>> graph(double r) const {
    const int n = static_cast<int>(left.size());
    const int m = static_cast<int>(right.size());
    std::vector<std::vector<int>> adj(n + m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j)
        if (point_distance(left[i], right[j]).value() <= r) adj[i].push_back(j);
      if ((left[i].death - left[i].birth) / 2.0 <= r) adj[i].push_back(m + i);
    }
    for (int j = 0; j < m; ++j) {
      if ((right[j].death - right[j].birth) / 2.0 <= r) adj[n + j].push_back(j);
      for (int i = 0; i < n; ++i) adj[n + j].push_back(m + i);
    }
    return adj;
  }

  bool feasible(double r) const {
    HopcroftKarp hk(graph(r));
    return hk.run() == static_cast<int>(left.size() + right.size());
  }
};

}  // namespace

std::vector<double> bottleneck_candidates(const PersistenceDiagram& d1,
                                          const PersistenceDiagram& d2) {
  const auto a = expand(d1, DiagramPoint::Kind::Proper);
  const auto b = expand(d2, DiagramPoint::Kind::Proper);
  std::vector<double> c{0.0};
  for (const auto& p : a) {
    c.push_back(p.distance_to_delta().value());
    for (const auto& q : b) c.push_back(point_distance(p, q).value());
  }
  for (const auto& q : b) c.push_back(q.distance_to_delta().value());
  const auto ea = expand(d1, DiagramPoint::Kind::Essential);
  const auto eb = expand(d2, DiagramPoint::Kind::Essential);
  for (const auto& p : ea)
    for (const auto& q : eb) c.push_back(point_distance(p, q).value());
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

Matching bottleneck(const PersistenceDiagram& d1, const PersistenceDiagram& d2) {
  Matching result;
  const auto ea = expand(d1, DiagramPoint::Kind::Essential);
  const auto eb = expand(d2, DiagramPoint::Kind::Essential);
  if (ea.size() != eb.size()) {
    result.cost = ExtendedReal::infinity();
    result.witness = "essential point counts differ in degree " + std::to_string(d1.degree()) +
                     ": " + std::to_string(ea.size()) + " vs " + std::to_string(eb.size());
    return result;
  }

  double cost = 0.0;
  for (std::size_t i = 0; i < ea.size(); ++i) {
    const double c = std::abs(ea[i].birth - eb[i].birth);
    result.pairs.push_back({ea[i], eb[i], c});
    cost = std::max(cost, c);
  }

  ProperProblem problem{expand(d1, DiagramPoint::Kind::Proper),
                        expand(d2, DiagramPoint::Kind::Proper)};
  const int n = static_cast<int>(problem.left.size());
  const int m = static_cast<int>(problem.right.size());
  if (n + m > 0) {
    std::vector<double> cand{0.0};
    for (const auto& p : problem.left) {
      cand.push_back((p.death - p.birth) / 2.0);
      for (const auto& q : problem.right) cand.push_back(point_distance(p, q).value());
    }
    for (const auto& q : problem.right) cand.push_back((q.death - q.birth) / 2.0);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    // Matching everything to Delta is always feasible at the largest
    // half-persistence, so the last candidate is feasible.
    std::size_t lo = 0, hi = cand.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (problem.feasible(cand[mid]))
        hi = mid;
      else
        lo = mid + 1;
    }
    const double r = cand[lo];
    HopcroftKarp hk(problem.graph(r));
    hk.run();
    const auto& ml = hk.left_match();
    for (int i = 0; i < n; ++i) {
      const int v = ml[i];
      if (v < m)
        result.pairs.push_back({problem.left[i], problem.right[v],
                                point_distance(problem.left[i], problem.right[v])});
      else
        result.pairs.push_back({problem.left[i], DiagramPoint::delta(),
                                problem.left[i].distance_to_delta()});
    }
    for (int j = 0; j < m; ++j) {
      const int v = ml[n + j];
      if (v == j)
        result.pairs.push_back({DiagramPoint::delta(), problem.right[j],
                                problem.right[j].distance_to_delta()});
    }
    cost = std::max(cost, r);
  }
  std::stable_sort(result.pairs.begin(), result.pairs.end(),
                   [](const MatchedPair& l, const MatchedPair& r) {
                     return point_less(l.source, r.source);
                   });
  result.cost = cost;
  return result;
}

int pbnf_from_diagram(const PersistenceDiagram& d, double u, double v) {
  if (!(u < v)) throw Error("pbnf_from_diagram: requires u < v");
  int count = 0;
  for (const auto& p : d.points()) {
    if (p.is_proper() && p.birth <= u && p.death > v) count += p.multiplicity;
    if (p.is_essential() && p.birth <= u) count += p.multiplicity;
  }
  return count;
}

int multiplicity_box(const PersistenceDiagram& d, double u, double v, double eps) {
  if (!(eps > 0.0)) throw Error("multiplicity_box: eps must be positive");
  if (!(u + eps < v - eps)) throw Error("multiplicity_box: box must lie above the diagonal");
  return pbnf_from_diagram(d, u + eps, v - eps) - pbnf_from_diagram(d, u - eps, v - eps) +
         pbnf_from_diagram(d, u - eps, v + eps) - pbnf_from_diagram(d, u + eps, v + eps);
}

}  // namespace mdist
