#include "mdist/matching_distance.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mdist/parallel.hpp"

namespace mdist {

void EstimatorConfig::validate() const {
  if (resolution_a < 2 || resolution_b < 2) throw Error("config: resolutions must be >= 2");
  if (special_resolution < 2) throw Error("config: special resolution must be >= 2");
  if (!(tol > 0.0) || !(special_tol > 0.0)) throw Error("config: tolerances must be positive");
  if (!(epsilon_boundary > 0.0) || !(epsilon_boundary < 0.5))
    throw Error("config: boundary margin must lie in ]0, 1/2[");
  if (!std::isfinite(cbar)) throw Error("config: cbar must be finite");
  if (degree < -1) throw Error("config: degree must be >= 0 (or -1 for all)");
  if (u_lattice_refinement < 0) throw Error("config: lattice refinement must be >= 0");
}

std::string to_string(Method m) { return m == Method::Naive ? "naive" : "reduced"; }

double compute_cbar(const BifilteredComplex& cx1, const BifilteredComplex& cx2) {
  double c = 0.0;
  for (const auto* cx : {&cx1, &cx2})
    for (const auto& v : cx->values()) c = std::max({c, std::abs(v[0]), std::abs(v[1])});
  return c;
}

LineCost line_cost(const BifilteredComplex& cx1, const BifilteredComplex& cx2,
                   const LineParam& line, int degree) {
  const int top = std::max(cx1.dimension(), cx2.dimension());
  const int max_deg = degree >= 0 ? degree : top;
  const auto d1 = compute_diagram(cx1, line, max_deg);
  const auto d2 = compute_diagram(cx2, line, max_deg);
  LineCost out;
  out.line = line;
  out.cost = 0.0;
  const int lo = degree >= 0 ? degree : 0;
  for (int k = lo; k <= max_deg; ++k) {
    const PersistenceDiagram empty(k);
    const auto& a = k < static_cast<int>(d1.size()) ? d1[k] : empty;
    const auto& b = k < static_cast<int>(d2.size()) ? d2[k] : empty;
    const auto m = bottleneck(a, b);
    out.per_degree.push_back(m.cost);
    if (m.cost.is_infinite() && out.witness.empty()) out.witness = m.witness;
    out.cost = max(out.cost, m.cost);
  }
  return out;
}

std::vector<LineCost> line_costs(const BifilteredComplex& cx1, const BifilteredComplex& cx2,
                                 const std::vector<LineParam>& lines, int degree) {
  std::vector<LineCost> out(lines.size());
  parallel_for(lines.size(), [&](std::size_t i) { out[i] = line_cost(cx1, cx2, lines[i], degree); });
  return out;
}

namespace {

double resolve_cbar(const BifilteredComplex& cx1, const BifilteredComplex& cx2,
                    const EstimatorConfig& config) {
  const double c = config.cbar > 0.0 ? config.cbar : compute_cbar(cx1, cx2);
  return c > 0.0 ? c : 1.0;
}

void summarize(EstimateReport& r) {
  r.value = 0.0;
  r.realizer = r.per_line.empty() ? LineParam() : r.per_line.front().line;
  for (const auto& lc : r.per_line) {
    if (lc.cost > r.value) {
      r.value = lc.cost;
      r.realizer = lc.line;
      r.witness = lc.witness;
    }
  }
}

double b_at(double cbar, int j, int n) { return -cbar + 2.0 * cbar * j / (n - 1); }

}  // namespace

EstimateReport naive_estimate(const BifilteredComplex& cx1, const BifilteredComplex& cx2,
                              const EstimatorConfig& config) {
  config.validate();
  const double cbar = resolve_cbar(cx1, cx2, config);
  const double eps = config.epsilon_boundary;
  std::vector<LineParam> lines;
  lines.reserve(static_cast<std::size_t>(config.resolution_a) * config.resolution_b);
  for (int i = 0; i < config.resolution_a; ++i) {
    const double a = eps + (1.0 - 2.0 * eps) * i / (config.resolution_a - 1);
    for (int j = 0; j < config.resolution_b; ++j)
      lines.emplace_back(a, b_at(cbar, j, config.resolution_b));
  }
  EstimateReport r;
  r.method = Method::Naive;
  r.per_line = line_costs(cx1, cx2, lines, config.degree);
  summarize(r);
  return r;
}

std::vector<LineParam> reduced_lines(const BifilteredComplex& cx1, const BifilteredComplex& cx2,
                                     const ExtendedParetoGrid& grid1,
                                     const ExtendedParetoGrid& grid2,
                                     const EstimatorConfig& config, USet* u_out) {
  config.validate();
  const double cbar = resolve_cbar(cx1, cx2, config);
  std::vector<LineParam> lines;
  for (int j = 0; j < config.resolution_b; ++j)
    lines.emplace_back(0.5, b_at(cbar, j, config.resolution_b));

  double cap = std::numeric_limits<double>::infinity();
  if (config.cap_special_values && cx1.same_structure(cx2))
    cap = 2.0 * sup_norm_difference(cx1, cx2);

  const ContourSet set(grid1, grid2);
  SamplingGrid sg;
  sg.region = {config.epsilon_boundary, 1.0 - config.epsilon_boundary, -cbar, cbar};
  sg.res_a = sg.res_b = config.special_resolution;
  USet u = assemble_U(set, sg, config.special_tol, cap);

  if (config.u_lattice_refinement == 0) {
    for (const auto& s : u.u) lines.push_back(s.param);
  } else {
    const double step_a = (sg.region.a_max - sg.region.a_min) /
                          ((sg.res_a - 1) * static_cast<double>(config.u_lattice_refinement));
    const double step_b = (sg.region.b_max - sg.region.b_min) /
                          ((sg.res_b - 1) * static_cast<double>(config.u_lattice_refinement));
    std::set<std::pair<long long, long long>> occupied;
    for (const auto& s : u.u) {
      const std::pair<long long, long long> key{
          std::llround((s.param.a - sg.region.a_min) / step_a),
          std::llround((s.param.b - sg.region.b_min) / step_b)};
      if (occupied.insert(key).second) lines.push_back(s.param);
    }
  }
  if (u_out) *u_out = std::move(u);
  return lines;
}

EstimateReport reduced_estimate(const BifilteredComplex& cx1, const BifilteredComplex& cx2,
                                const ExtendedParetoGrid& grid1, const ExtendedParetoGrid& grid2,
                                const EstimatorConfig& config) {
  const auto lines = reduced_lines(cx1, cx2, grid1, grid2, config);
  EstimateReport r;
  r.method = Method::Reduced;
  r.slope_one_lines = static_cast<std::size_t>(config.resolution_b);
  r.u_lines = lines.size() - r.slope_one_lines;
  r.per_line = line_costs(cx1, cx2, lines, config.degree);
  summarize(r);
  return r;
}

VerifyReport verify_main_theorem(const BifilteredComplex& cx1, const BifilteredComplex& cx2,
                                 const ExtendedParetoGrid& grid1,
                                 const ExtendedParetoGrid& grid2, const EstimatorConfig& config) {
  VerifyReport v;
  v.tol = config.tol;
  v.naive = naive_estimate(cx1, cx2, config);
  v.reduced = reduced_estimate(cx1, cx2, grid1, grid2, config);
  if (v.naive.value.is_infinite())
    v.pass = v.reduced.value.is_infinite();
  else
    v.pass = v.reduced.value >= ExtendedReal(v.naive.value.value() - config.tol);
  return v;
}

RealizerBoundReport realizer_bound_check(const BifilteredComplex& cx1,
                                         const BifilteredComplex& cx2,
                                         const EstimateReport& report, double tol) {
  RealizerBoundReport r;
  const auto n = componentwise_sup_difference(cx1, cx2);
  r.norm1 = n[0];
  r.norm2 = n[1];
  r.realizer_a = report.realizer.a;
  if (report.value.is_infinite()) {
    r.explanation = "estimate is infinite; check skipped";
    return r;
  }
  r.distance = report.value.value();
  const double sup = std::max(r.norm1, r.norm2);
  r.hypothesis = sup - r.distance < r.norm2 - r.norm1;
  r.corollary = std::abs(r.distance - sup) <= tol && r.norm2 > r.norm1;
  if (!r.hypothesis && !r.corollary) {
    r.explanation = "hypothesis fails: ||phi-psi|| - D = " + std::to_string(sup - r.distance) +
                    " is not below ||phi2-psi2|| - ||phi1-psi1|| = " +
                    std::to_string(r.norm2 - r.norm1) + "; check skipped";
    return r;
  }
  r.bound = r.norm1 / (r.norm1 + r.norm2);
  r.pass = r.realizer_a > r.bound;
  r.explanation = std::string(r.pass ? "realizer satisfies" : "realizer violates") +
                  " a > " + std::to_string(r.bound) + " (a = " + std::to_string(r.realizer_a) +
                  ")";
  return r;
}

BoundaryReport boundary_domination_check(const BifilteredComplex& cx1,
                                         const BifilteredComplex& cx2,
                                         const EstimatorConfig& config) {
  config.validate();
  const double cbar = resolve_cbar(cx1, cx2, config);
  std::vector<LineParam> boundary, segment;
  for (double a : {0.0, 1.0})
    for (int j = 0; j < config.resolution_b; ++j)
      boundary.emplace_back(a, b_at(cbar, j, config.resolution_b));
  for (int j = 0; j < config.resolution_b; ++j)
    segment.emplace_back(0.5, b_at(cbar, j, config.resolution_b));

  BoundaryReport r;
  r.boundary = line_costs(cx1, cx2, boundary, config.degree);
  r.segment = line_costs(cx1, cx2, segment, config.degree);
  ExtendedReal seg = 0.0;
  for (const auto& lc : r.segment) seg = max(seg, lc.cost);
  if (seg.is_infinite()) {
    r.segment_max = std::numeric_limits<double>::infinity();
    return r;
  }
  r.segment_max = seg.value();
  r.worst_excess = -std::numeric_limits<double>::infinity();
  for (const auto& lc : r.boundary) {
    const double c = lc.cost.to_double();
    r.worst_excess = std::max(r.worst_excess, c - r.segment_max);
  }
  r.pass = r.worst_excess <= config.tol;
  return r;
}

}  // namespace mdist
